//! Mass functions (basic probability assignments) and the classical
//! Dempster-Shafer operators on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{Frame, SubsetId};
use crate::scalar::Scalar;

/// A normalized mass function over a [`Frame`].
///
/// Only focal elements are stored, sorted by subset bits. `m(∅) = 0` and
/// `Σ m = 1` hold for every value of this type.
#[derive(Clone, PartialEq)]
pub struct MassFunction<T> {
    frame: Frame,
    focal: Vec<(SubsetId, T)>,
}

impl<T: Scalar> MassFunction<T> {
    /// Builds a mass function from `(subset, mass)` pairs.
    ///
    /// Repeated subsets are summed and zero entries dropped. The total must be
    /// within [`Scalar::normalization_tolerance`] of one; it is then rescaled
    /// to sum to one exactly.
    pub fn new<I>(frame: &Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetId, T)>,
    {
        let mut acc: BTreeMap<SubsetId, T> = BTreeMap::new();
        for (subset, value) in assignments {
            frame.check(subset)?;
            if !value.is_finite() {
                return Err(Error::NonFiniteMass);
            }
            if value < T::zero() {
                return Err(Error::NegativeMass(value.to_f64_lossy()));
            }
            if subset.is_empty() {
                if value > T::zero() {
                    return Err(Error::MassOnEmptySet);
                }
                continue;
            }
            let slot = acc.entry(subset).or_insert_with(T::zero);
            *slot = *slot + value;
        }
        let sum: T = acc.values().copied().sum();
        if (sum - T::one()).abs() > T::normalization_tolerance() {
            return Err(Error::NotNormalized {
                sum: sum.to_f64_lossy(),
            });
        }
        Ok(Self::from_accumulated(frame.clone(), acc))
    }

    /// Convenience constructor taking label lists instead of subset ids.
    pub fn from_labels<S: AsRef<str>>(frame: &Frame, assignments: &[(&[S], T)]) -> Result<Self> {
        let pairs = assignments
            .iter()
            .map(|(labels, v)| Ok((frame.subset_of(labels)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, pairs)
    }

    /// Total ignorance, `m(Θ) = 1`.
    pub fn vacuous(frame: &Frame) -> Self {
        MassFunction {
            frame: frame.clone(),
            focal: vec![(frame.theta(), T::one())],
        }
    }

    /// All mass on a single non-empty subset.
    pub fn certain(frame: &Frame, subset: SubsetId) -> Result<Self> {
        Self::new(frame, [(subset, T::one())])
    }

    /// Drops zero entries and rescales so the stored masses sum to one.
    /// Callers guarantee a positive total.
    fn from_accumulated(frame: Frame, acc: BTreeMap<SubsetId, T>) -> Self {
        let sum: T = acc.values().copied().sum();
        let focal = acc
            .into_iter()
            .filter(|(_, v)| *v > T::zero())
            .map(|(s, v)| (s, v / sum))
            .collect();
        MassFunction { frame, focal }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements sorted by subset bits.
    pub fn focal(&self) -> &[(SubsetId, T)] {
        &self.focal
    }

    pub fn mass(&self, subset: SubsetId) -> T {
        self.focal
            .binary_search_by_key(&subset, |(s, _)| *s)
            .map(|i| self.focal[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal[0].0 == self.frame.theta()
    }

    /// Every focal element is a singleton.
    pub fn is_bayesian(&self) -> bool {
        self.focal.iter().all(|(s, _)| s.is_singleton())
    }

    /// Bel(A): mass committed to subsets of `a`.
    // folds from +0 because float `Sum` starts at -0 and empty sums would print as -0
    pub fn belief(&self, a: SubsetId) -> T {
        self.focal
            .iter()
            .filter(|(b, _)| b.is_subset_of(a))
            .fold(T::zero(), |acc, (_, v)| acc + *v)
    }

    /// Pl(A): mass on focal elements that intersect `a`.
    pub fn plausibility(&self, a: SubsetId) -> T {
        self.focal
            .iter()
            .filter(|(b, _)| b.intersects(a))
            .fold(T::zero(), |acc, (_, v)| acc + *v)
    }

    fn same_frame(&self, other: &Self) -> Result<()> {
        if self.frame == other.frame {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    /// Conflict coefficient K: product mass falling on disjoint pairs.
    pub fn conflict(&self, other: &Self) -> Result<T> {
        self.same_frame(other)?;
        let mut k = T::zero();
        for (b, x) in &self.focal {
            for (c, y) in &other.focal {
                if !b.intersects(*c) {
                    k = k + *x * *y;
                }
            }
        }
        Ok(k)
    }

    /// Dempster's rule of combination.
    ///
    /// The normalizer `1 − K` is accumulated directly from the non-conflicting
    /// products, which keeps near-total-conflict cases (Zadeh's example)
    /// accurate.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        let mut acc: BTreeMap<SubsetId, T> = BTreeMap::new();
        let mut agreement = T::zero();
        let mut conflict = T::zero();
        for (b, x) in &self.focal {
            for (c, y) in &other.focal {
                let product = *x * *y;
                let meet = b.intersect(*c);
                if meet.is_empty() {
                    conflict = conflict + product;
                } else {
                    agreement = agreement + product;
                    let slot = acc.entry(meet).or_insert_with(T::zero);
                    *slot = *slot + product;
                }
            }
        }
        if agreement < T::conflict_tolerance() {
            return Err(Error::TotalConflict {
                conflict: conflict.to_f64_lossy(),
            });
        }
        Ok(Self::from_accumulated(self.frame.clone(), acc))
    }

    /// Pignistic probability transformation.
    ///
    /// BetP(x) = Σ_{B ∋ x} m(B) / (|B| (1 − m(∅))); the denominator's
    /// `1 − m(∅)` is always 1 here since the empty set is never focal.
    pub fn pignistic(&self) -> Pignistic<T> {
        let mut probs = vec![T::zero(); self.frame.len()];
        for (b, v) in &self.focal {
            let share = *v / T::lit(f64::from(b.cardinality()));
            for i in b.members() {
                probs[i] = probs[i] + share;
            }
        }
        Pignistic {
            frame: self.frame.clone(),
            probs,
        }
    }

    /// Shafer discounting with reliability `lambda`.
    ///
    /// m'(A) = λ m(A) for A ⊂ Θ and m'(Θ) = 1 − λ + λ m(Θ).
    pub fn discount(&self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::LambdaOutOfRange(lambda.to_f64_lossy()));
        }
        let theta = self.frame.theta();
        let mut acc: BTreeMap<SubsetId, T> = self
            .focal
            .iter()
            .filter(|(s, _)| *s != theta)
            .map(|(s, v)| (*s, lambda * *v))
            .collect();
        acc.insert(theta, T::one() - lambda + lambda * self.mass(theta));
        Ok(Self::from_accumulated(self.frame.clone(), acc))
    }

    /// Same frame, same focal sets, masses within `tol` of each other.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.frame == other.frame
            && self
                .frame
                .subsets()
                .all(|s| (self.mass(s) - other.mass(s)).abs() <= tol)
    }

    /// Converts to another scalar type, renormalizing in the target type.
    pub fn cast<U: Scalar>(&self) -> MassFunction<U> {
        let acc = self
            .focal
            .iter()
            .map(|(s, v)| (*s, U::lit(v.to_f64_lossy())))
            .collect();
        MassFunction::from_accumulated(self.frame.clone(), acc)
    }

    pub fn to_doc(&self) -> MassDoc<T> {
        MassDoc {
            focal: self
                .focal
                .iter()
                .map(|(s, v)| FocalDoc {
                    set: self
                        .frame
                        .subset_labels(*s)
                        .into_iter()
                        .map(str::to_owned)
                        .collect(),
                    mass: *v,
                })
                .collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for MassFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (s, v) in &self.focal {
            map.entry(&self.frame.format_subset(*s), v);
        }
        map.finish()
    }
}

impl<T: Scalar> fmt::Display for MassFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .focal
            .iter()
            .map(|(s, v)| format!("{}: {:.4}", self.frame.format_subset(*s), v))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// One focal element in the JSON form `{"set": ["B", "C"], "mass": 0.2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FocalDoc<T> {
    pub set: Vec<String>,
    pub mass: T,
}

/// JSON form of a mass function: `{"focal": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MassDoc<T> {
    pub focal: Vec<FocalDoc<T>>,
}

impl<T: Scalar> MassDoc<T> {
    pub fn into_mass(self, frame: &Frame) -> Result<MassFunction<T>> {
        let pairs = self
            .focal
            .into_iter()
            .map(|f| Ok((frame.subset_of(&f.set)?, f.mass)))
            .collect::<Result<Vec<_>>>()?;
        MassFunction::new(frame, pairs)
    }
}

impl<T: Scalar> Serialize for MassFunction<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MassFunction", 1)?;
        st.serialize_field("focal", &self.to_doc().focal)?;
        st.end()
    }
}

/// A probability distribution over the singletons of a frame.
#[derive(Clone, PartialEq)]
pub struct Pignistic<T> {
    frame: Frame,
    probs: Vec<T>,
}

impl<T: Scalar> Pignistic<T> {
    pub fn uniform(frame: &Frame) -> Self {
        let p = T::one() / T::lit(frame.len() as f64);
        Pignistic {
            frame: frame.clone(),
            probs: vec![p; frame.len()],
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> T {
        self.probs[index]
    }

    /// Most probable class. Exact ties go to the first label in frame order
    /// and are flagged.
    pub fn decide(&self) -> Decision {
        let mut best = 0;
        let mut tie = false;
        for (i, p) in self.probs.iter().enumerate().skip(1) {
            if *p > self.probs[best] {
                best = i;
                tie = false;
            } else if *p == self.probs[best] {
                tie = true;
            }
        }
        Decision { class: best, tie }
    }
}

impl<T: fmt::Debug> fmt::Debug for Pignistic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (l, p) in self.frame.labels().iter().zip(&self.probs) {
            map.entry(l, p);
        }
        map.finish()
    }
}

impl<T: Scalar> Serialize for Pignistic<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.probs.len()))?;
        for (l, p) in self.frame.labels().iter().zip(&self.probs) {
            map.serialize_entry(l, p)?;
        }
        map.end()
    }
}

/// A predicted class index plus whether the maximum was shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub class: usize,
    pub tie: bool,
}
