//! Contribution-based source reliability (the fuzzy reliability index).
//!
//! Each evidence source (a feature, in classification) is scored on every
//! labelled training object by how much its decision confidence favours the
//! true class over the others. Summed contributions give the reliability
//! `R_j`; min-max scaling turns those into weights `W_j`, which are then used
//! as Shafer discount factors before Dempster fusion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::dst_fuse;
use crate::error::{Error, Result};
use crate::frame::SubsetId;
use crate::ifs::confidence_vector;
use crate::mass::{Decision, MassFunction, Pignistic};
use crate::scalar::Scalar;

/// Correct-decision contribution of one BPA for an object whose true class
/// is `true_class`: dc(A*) minus the mean dc over the remaining classes.
/// Always within `[-2, 2]`.
pub fn contribution<T: Scalar>(m: &MassFunction<T>, true_class: SubsetId) -> Result<T> {
    let truth = true_class.singleton_index().ok_or(Error::NotASingleton)?;
    m.frame().check(true_class)?;
    let k = m.frame().len();
    if k < 2 {
        return Err(Error::DegenerateFrame);
    }
    let dc = confidence_vector(m);
    let others: T = dc
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != truth)
        .map(|(_, v)| *v)
        .sum();
    Ok(dc[truth] - others / T::lit((k - 1) as f64))
}

/// R_j: the plain sum of a source's contributions.
pub fn source_reliability<T: Scalar>(contributions: &[T]) -> T {
    contributions.iter().copied().sum()
}

/// Min-max normalized weights. When every reliability is equal, every
/// source gets weight 1.
pub fn source_weights<T: Scalar>(reliabilities: &[T]) -> Vec<T> {
    let min = reliabilities.iter().copied().fold(T::infinity(), T::min);
    let max = reliabilities.iter().copied().fold(T::neg_infinity(), T::max);
    let span = max - min;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN span counts as flat
    if !(span > T::zero()) {
        return vec![T::one(); reliabilities.len()];
    }
    reliabilities.iter().map(|r| (*r - min) / span).collect()
}

/// Per-source BPAs for one labelled training object.
#[derive(Debug, Clone)]
pub struct LabeledBpaSet<T> {
    pub object_id: usize,
    pub bpas: Vec<MassFunction<T>>,
    pub truth: SubsetId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SourceReliability<T> {
    pub name: String,
    #[serde(rename = "R")]
    pub reliability: T,
    #[serde(rename = "W")]
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReliabilityReport<T> {
    pub sources: Vec<SourceReliability<T>>,
    /// `contributions[j][n]` = C_jn, kept only on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> ReliabilityReport<T> {
    /// A report carrying externally supplied weights (reliabilities set to
    /// the weights themselves).
    pub fn from_weights<S: Into<String>>(names: impl IntoIterator<Item = S>, weights: &[T]) -> Self {
        ReliabilityReport {
            sources: names
                .into_iter()
                .zip(weights)
                .map(|(name, w)| SourceReliability {
                    name: name.into(),
                    reliability: *w,
                    weight: *w,
                })
                .collect(),
            contributions: None,
        }
    }

    pub fn weights(&self) -> Vec<T> {
        self.sources.iter().map(|s| s.weight).collect()
    }

    pub fn reliabilities(&self) -> Vec<T> {
        self.sources.iter().map(|s| s.reliability).collect()
    }

    /// Names and weights as two aligned text rows, 2 decimals.
    pub fn table(&self) -> String {
        let width = self
            .sources
            .iter()
            .map(|s| s.name.len().max(6))
            .collect::<Vec<_>>();
        let head: Vec<String> = self
            .sources
            .iter()
            .zip(&width)
            .map(|(s, w)| format!("{:>w$}", s.name, w = w))
            .collect();
        let row: Vec<String> = self
            .sources
            .iter()
            .zip(&width)
            .map(|(s, w)| format!("{:>w$.2}", s.weight.to_f64_lossy(), w = w))
            .collect();
        format!("     {}\nFRI  {}", head.join("  "), row.join("  "))
    }
}

/// Runs the reliability accumulation over a labelled training set.
///
/// Contributions are computed per object in parallel and summed in object
/// order, so the result is bit-stable for a given input order. Source `j`
/// of every object is named `names[j]`.
pub fn train<T: Scalar>(
    names: &[String],
    data: &[LabeledBpaSet<T>],
    keep_contributions: bool,
) -> Result<ReliabilityReport<T>> {
    let first = data.first().ok_or(Error::EmptyTrainingSet)?;
    let sources = first.bpas.len();
    if sources == 0 {
        return Err(Error::InconsistentSources("objects carry no BPAs".into()));
    }
    if names.len() != sources {
        return Err(Error::InconsistentSources(format!(
            "{} source names for {} sources",
            names.len(),
            sources
        )));
    }
    let frame = first.bpas[0].frame();
    for obj in data {
        if obj.bpas.len() != sources {
            return Err(Error::InconsistentSources(format!(
                "object {} has {} BPAs, expected {}",
                obj.object_id,
                obj.bpas.len(),
                sources
            )));
        }
        if obj.bpas.iter().any(|m| m.frame() != frame) {
            return Err(Error::InconsistentSources(format!(
                "object {} mixes frames",
                obj.object_id
            )));
        }
    }

    let per_object: Vec<Vec<T>> = data
        .par_iter()
        .map(|obj| {
            obj.bpas
                .iter()
                .map(|m| contribution(m, obj.truth))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;

    let by_source: Vec<Vec<T>> = (0..sources)
        .map(|j| per_object.iter().map(|row| row[j]).collect())
        .collect();
    let reliabilities: Vec<T> = by_source.iter().map(|c| source_reliability(c)).collect();
    let weights = source_weights(&reliabilities);

    Ok(ReliabilityReport {
        sources: names
            .iter()
            .zip(reliabilities.iter().zip(&weights))
            .map(|(name, (r, w))| SourceReliability {
                name: name.clone(),
                reliability: *r,
                weight: *w,
            })
            .collect(),
        contributions: keep_contributions.then_some(by_source),
    })
}

/// Intermediate and final products of weighted classification.
#[derive(Debug, Clone)]
pub struct Classification<T> {
    pub discounted: Vec<MassFunction<T>>,
    pub fused: MassFunction<T>,
    pub pignistic: Pignistic<T>,
    pub decision: Decision,
}

/// Discounts each source's BPA by its weight, fuses left to right with
/// Dempster's rule, and decides on the pignistic argmax.
pub fn classify<T: Scalar>(
    report: &ReliabilityReport<T>,
    bpas: &[MassFunction<T>],
) -> Result<Classification<T>> {
    classify_weighted(&report.weights(), bpas)
}

pub fn classify_weighted<T: Scalar>(
    weights: &[T],
    bpas: &[MassFunction<T>],
) -> Result<Classification<T>> {
    if weights.len() != bpas.len() {
        return Err(Error::InconsistentSources(format!(
            "{} weights for {} BPAs",
            weights.len(),
            bpas.len()
        )));
    }
    let discounted = bpas
        .iter()
        .zip(weights)
        .map(|(m, w)| m.discount(*w))
        .collect::<Result<Vec<_>>>()?;
    let fused = dst_fuse(&discounted)?;
    let pignistic = fused.pignistic();
    let decision = pignistic.decide();
    Ok(Classification {
        discounted,
        fused,
        pignistic,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use approx::assert_abs_diff_eq;

    fn abc() -> Frame {
        Frame::new(["A", "B", "C"]).unwrap()
    }

    fn mass(f: &Frame, pairs: &[(&[&str], f64)]) -> MassFunction<f64> {
        MassFunction::from_labels(f, pairs).unwrap()
    }

    #[test]
    fn contribution_cases() {
        let f = abc();
        let b = f.subset_of(&["B"]).unwrap();
        let s1 = mass(&f, &[(&["A"], 0.4), (&["B"], 0.2), (&["C"], 0.2), (&["B", "C"], 0.2)]);
        let s3 = mass(&f, &[(&["A"], 0.15), (&["B"], 0.55), (&["A", "C"], 0.2), (&["A", "B", "C"], 0.1)]);
        let s4 = mass(&f, &[(&["A"], 0.3), (&["B"], 0.3), (&["C"], 0.3), (&["A", "B", "C"], 0.1)]);
        assert_abs_diff_eq!(contribution(&s1, b).unwrap(), -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(contribution(&s3, b).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(contribution(&s4, b).unwrap(), 0.0, epsilon = 1e-12);
        let perfect = MassFunction::<f64>::certain(&f, b).unwrap();
        assert_eq!(contribution(&perfect, b).unwrap(), 2.0);
        assert_eq!(contribution(&MassFunction::<f64>::vacuous(&f), b).unwrap(), 0.0);
        assert!(matches!(contribution(&s1, f.theta()), Err(Error::NotASingleton)));

        let one = Frame::new(["only"]).unwrap();
        let m = MassFunction::<f64>::vacuous(&one);
        assert!(matches!(
            contribution(&m, SubsetId::singleton(0)),
            Err(Error::DegenerateFrame)
        ));
    }

    #[test]
    fn reliability_sums() {
        assert_abs_diff_eq!(source_reliability(&[0.5, 0.6, 0.3]), 1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(source_reliability(&[0.2, -0.25, -0.15]), -0.2, epsilon = 1e-12);
        assert_eq!(source_reliability::<f64>(&[]), 0.0);
    }

    #[test]
    fn weights() {
        let w = source_weights(&[1.4, -0.2, 0.75]);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 0.59375, epsilon = 1e-12);
        assert_eq!(source_weights(&[5.0, 5.0, 5.0]), vec![1.0; 3]);
        assert_eq!(source_weights(&[0.0, 1.0]), vec![0.0, 1.0]);
        assert_eq!(source_weights(&[-3.0]), vec![1.0]);
    }

    #[test]
    fn train_single_perfect_source() {
        let f = abc();
        let b = f.subset_of(&["B"]).unwrap();
        let data = vec![LabeledBpaSet {
            object_id: 0,
            bpas: vec![MassFunction::certain(&f, b).unwrap()],
            truth: b,
        }];
        let report = train(&["s".to_owned()], &data, true).unwrap();
        assert_eq!(report.reliabilities(), vec![2.0]);
        assert_eq!(report.weights(), vec![1.0]);
        assert_eq!(report.contributions, Some(vec![vec![2.0]]));
    }

    #[test]
    fn train_errors() {
        let f = abc();
        let b = f.subset_of(&["B"]).unwrap();
        assert!(matches!(
            train::<f64>(&[], &[], false),
            Err(Error::EmptyTrainingSet)
        ));
        let data = vec![
            LabeledBpaSet {
                object_id: 0,
                bpas: vec![MassFunction::<f64>::vacuous(&f); 2],
                truth: b,
            },
            LabeledBpaSet {
                object_id: 1,
                bpas: vec![MassFunction::<f64>::vacuous(&f)],
                truth: b,
            },
        ];
        let names = vec!["a".to_owned(), "b".to_owned()];
        assert!(matches!(
            train(&names, &data, false),
            Err(Error::InconsistentSources(_))
        ));
    }

    #[test]
    fn classify_vacuous_is_uniform_and_tied() {
        let f = abc();
        let bpas = vec![MassFunction::<f64>::vacuous(&f); 3];
        let out = classify_weighted(&[0.2, 1.0, 0.7], &bpas).unwrap();
        for p in out.pignistic.probs() {
            assert_abs_diff_eq!(*p, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert!(out.decision.tie);
        assert_eq!(out.decision.class, 0);
    }

    #[test]
    fn unit_weights_match_plain_fusion() {
        let f = abc();
        let a = mass(&f, &[(&["A"], 0.6), (&["A", "B"], 0.4)]);
        let b = mass(&f, &[(&["B"], 0.3), (&["A", "B", "C"], 0.7)]);
        let out = classify_weighted(&[1.0, 1.0], &[a.clone(), b.clone()]).unwrap();
        assert!(out.fused.approx_eq(&a.combine(&b).unwrap(), 1e-12));
    }

    #[test]
    fn report_json_shape() {
        let r = ReliabilityReport::from_weights(["petal_length"], &[0.5]);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"sources":[{"name":"petal_length","R":0.5,"W":0.5}]}"#);
        let back: ReliabilityReport<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
