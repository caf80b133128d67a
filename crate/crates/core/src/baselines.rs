//! Comparison methods: plain Dempster fusion, Murphy's averaging, Deng's
//! distance-weighted averaging, and two feature-space classifiers (nearest
//! mean, k nearest neighbours).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::frame::SubsetId;
use crate::mass::{Decision, MassFunction};
use crate::scalar::Scalar;

/// Every classification method the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    Fri,
    Dst,
    Murphy,
    Deng,
    Nmc,
    Knn,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 6] = [
        FusionMethod::Fri,
        FusionMethod::Dst,
        FusionMethod::Murphy,
        FusionMethod::Deng,
        FusionMethod::Nmc,
        FusionMethod::Knn,
    ];

    /// Methods that consume generated BPAs rather than raw feature vectors.
    pub fn is_evidential(self) -> bool {
        !matches!(self, FusionMethod::Nmc | FusionMethod::Knn)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FusionMethod::Fri => "fri",
            FusionMethod::Dst => "dst",
            FusionMethod::Murphy => "murphy",
            FusionMethod::Deng => "deng",
            FusionMethod::Nmc => "nmc",
            FusionMethod::Knn => "knn",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FusionMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Dissimilarity between two BPAs used to weight Deng's average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpaDistance {
    /// sqrt(½ (m1 − m2)ᵀ D (m1 − m2)) with D(A, B) = |A ∩ B| / |A ∪ B|.
    #[default]
    Jousselme,
    /// Euclidean distance between pignistic distributions, scaled by 1/√2
    /// so it lies in [0, 1].
    PignisticEuclidean,
}

impl BpaDistance {
    pub fn distance<T: Scalar>(self, m1: &MassFunction<T>, m2: &MassFunction<T>) -> T {
        match self {
            BpaDistance::Jousselme => jousselme_distance(m1, m2),
            BpaDistance::PignisticEuclidean => pignistic_distance(m1, m2),
        }
    }
}

impl FromStr for BpaDistance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "jousselme" => Ok(BpaDistance::Jousselme),
            "pignistic" | "pignistic-euclidean" => Ok(BpaDistance::PignisticEuclidean),
            _ => Err(format!("unknown distance `{s}`")),
        }
    }
}

pub fn jousselme_distance<T: Scalar>(m1: &MassFunction<T>, m2: &MassFunction<T>) -> T {
    let mut sets: Vec<SubsetId> = m1
        .focal()
        .iter()
        .chain(m2.focal())
        .map(|(s, _)| *s)
        .collect();
    sets.sort_unstable();
    sets.dedup();
    let diff: Vec<T> = sets.iter().map(|s| m1.mass(*s) - m2.mass(*s)).collect();
    let mut quad = T::zero();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            let jaccard = T::lit(f64::from(a.intersect(*b).cardinality()))
                / T::lit(f64::from(a.union(*b).cardinality()));
            quad = quad + diff[i] * diff[j] * jaccard;
        }
    }
    (quad * T::lit(0.5)).max(T::zero()).sqrt()
}

pub fn pignistic_distance<T: Scalar>(m1: &MassFunction<T>, m2: &MassFunction<T>) -> T {
    let p = m1.pignistic();
    let q = m2.pignistic();
    let sq: T = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (*a - *b) * (*a - *b))
        .sum();
    (sq / T::lit(2.0)).sqrt()
}

fn require<T>(bpas: &[MassFunction<T>], needed: usize) -> Result<()> {
    if bpas.len() < needed {
        Err(Error::TooFewSources {
            needed,
            got: bpas.len(),
        })
    } else {
        Ok(())
    }
}

/// Left fold of Dempster's rule. Associativity makes the order immaterial up
/// to rounding; the fold is always left to right.
pub fn dst_fuse<T: Scalar>(bpas: &[MassFunction<T>]) -> Result<MassFunction<T>> {
    require(bpas, 1)?;
    bpas[1..]
        .iter()
        .try_fold(bpas[0].clone(), |acc, m| acc.combine(m))
}

/// Σ_i w_i m_i over the union of focal elements. Weights must sum to one.
pub fn weighted_average<T: Scalar>(bpas: &[MassFunction<T>], weights: &[T]) -> Result<MassFunction<T>> {
    require(bpas, 1)?;
    if weights.len() != bpas.len() {
        return Err(Error::InconsistentSources(format!(
            "{} weights for {} BPAs",
            weights.len(),
            bpas.len()
        )));
    }
    let frame = bpas[0].frame();
    if bpas.iter().any(|m| m.frame() != frame) {
        return Err(Error::FrameMismatch);
    }
    let pairs = bpas
        .iter()
        .zip(weights)
        .flat_map(|(m, w)| m.focal().iter().map(move |(s, v)| (*s, *w * *v)));
    MassFunction::new(frame, pairs)
}

/// Combines `m` with itself so that `n` copies take part (n − 1 combinations).
pub fn self_combine<T: Scalar>(m: &MassFunction<T>, n: usize) -> Result<MassFunction<T>> {
    (1..n).try_fold(m.clone(), |acc, _| acc.combine(m))
}

/// Murphy's rule: the plain average of the n BPAs fused with itself n − 1 times.
pub fn murphy_fuse<T: Scalar>(bpas: &[MassFunction<T>]) -> Result<MassFunction<T>> {
    require(bpas, 1)?;
    let w = vec![T::one() / T::lit(bpas.len() as f64); bpas.len()];
    let avg = weighted_average(bpas, &w)?;
    self_combine(&avg, bpas.len())
}

#[derive(Debug, Clone)]
pub struct DengFusion<T> {
    /// Normalized credibility of each source.
    pub credibility: Vec<T>,
    /// Set when every pairwise similarity was zero and uniform credibility
    /// was used instead.
    pub uniform_fallback: bool,
    pub averaged: MassFunction<T>,
    pub fused: MassFunction<T>,
}

/// Deng's rule: credibility-weighted average fused with itself n − 1 times.
///
/// Similarity is `1 − d(m_i, m_j)`; a source's support is the sum of its
/// similarities to the others, and credibility is support normalized over
/// all sources.
pub fn deng_fuse<T: Scalar>(bpas: &[MassFunction<T>], distance: BpaDistance) -> Result<DengFusion<T>> {
    require(bpas, 2)?;
    let n = bpas.len();
    let mut support = vec![T::zero(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let sim = (T::one() - distance.distance(&bpas[i], &bpas[j])).max(T::zero());
            support[i] = support[i] + sim;
            support[j] = support[j] + sim;
        }
    }
    let total: T = support.iter().copied().sum();
    // written negated so a NaN total also falls back
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let uniform_fallback = !(total > T::zero());
    let credibility = if uniform_fallback {
        vec![T::one() / T::lit(n as f64); n]
    } else {
        support.iter().map(|s| *s / total).collect()
    };
    let averaged = weighted_average(bpas, &credibility)?;
    let fused = self_combine(&averaged, n)?;
    Ok(DengFusion {
        credibility,
        uniform_fallback,
        averaged,
        fused,
    })
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum()
}

fn check_dim<T: Scalar>(train: &Dataset<T>, x: &[T]) -> Result<()> {
    if x.len() != train.feature_count() {
        return Err(Error::DimensionMismatch {
            expected: train.feature_count(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Nearest-mean classifier: one centroid per class.
#[derive(Debug, Clone)]
pub struct NearestMean<T> {
    centroids: Vec<Vec<T>>,
}

impl<T: Scalar> NearestMean<T> {
    pub fn fit(train: &Dataset<T>) -> Result<Self> {
        let dim = train.feature_count();
        let counts = train.class_counts();
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass(train.frame.label(empty).to_owned()));
        }
        let mut centroids = vec![vec![T::zero(); dim]; train.frame.len()];
        for s in &train.samples {
            for (acc, v) in centroids[s.class].iter_mut().zip(&s.features) {
                *acc = *acc + *v;
            }
        }
        for (c, n) in centroids.iter_mut().zip(&counts) {
            let n = T::lit(*n as f64);
            c.iter_mut().for_each(|v| *v = *v / n);
        }
        Ok(NearestMean { centroids })
    }

    pub fn centroids(&self) -> &[Vec<T>] {
        &self.centroids
    }

    /// Closest centroid; exact distance ties go to the first class in frame
    /// order and are flagged.
    pub fn predict(&self, x: &[T]) -> Decision {
        let d: Vec<T> = self.centroids.iter().map(|c| squared_distance(c, x)).collect();
        let mut best = 0;
        let mut tie = false;
        for i in 1..d.len() {
            if d[i] < d[best] {
                best = i;
                tie = false;
            } else if d[i] == d[best] {
                tie = true;
            }
        }
        Decision { class: best, tie }
    }
}

pub fn nmc_classify<T: Scalar>(train: &Dataset<T>, x: &[T]) -> Result<Decision> {
    check_dim(train, x)?;
    Ok(NearestMean::fit(train)?.predict(x))
}

/// Majority vote over the `k` Euclidean-nearest training samples. Distance
/// ties are broken by training index, vote ties by frame order (flagged).
pub fn knn_classify<T: Scalar>(train: &Dataset<T>, x: &[T], k: usize) -> Result<Decision> {
    check_dim(train, x)?;
    if k == 0 || k > train.len() {
        return Err(Error::KOutOfRange { k, n: train.len() });
    }
    let mut order: Vec<(T, usize)> = train
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| (squared_distance(&s.features, x), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; train.frame.len()];
    for (_, i) in &order[..k] {
        votes[train.samples[*i].class] += 1;
    }
    let max = *votes.iter().max().expect("non-empty frame");
    let class = votes.iter().position(|&v| v == max).expect("max present");
    let tie = votes.iter().filter(|&&v| v == max).count() > 1;
    Ok(Decision { class, tie })
}
