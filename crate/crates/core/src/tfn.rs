//! Triangular fuzzy number feature models and BPA generation from them.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::frame::{Frame, SubsetId};
use crate::mass::MassFunction;
use crate::scalar::Scalar;

/// A triangular fuzzy number `(a, b, c)` with `a <= b <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
#[serde(bound = "T: Scalar")]
pub struct TriangularFuzzyNumber<T> {
    a: T,
    b: T,
    c: T,
}

impl<T: Scalar> TriangularFuzzyNumber<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        if a > b || b > c {
            return Err(Error::InvalidTfn {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                c: c.to_f64_lossy(),
            });
        }
        Ok(TriangularFuzzyNumber { a, b, c })
    }

    /// Fits `(min, mean, max)` of the readings.
    pub fn fit(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        let min = values.iter().copied().fold(T::infinity(), T::min);
        let max = values.iter().copied().fold(T::neg_infinity(), T::max);
        let mean = values.iter().copied().sum::<T>() / T::lit(values.len() as f64);
        // rounding can push the mean a hair outside [min, max] for constant samples
        Self::new(min, mean.max(min).min(max), max)
    }

    pub fn lower(&self) -> T {
        self.a
    }

    pub fn mode(&self) -> T {
        self.b
    }

    pub fn upper(&self) -> T {
        self.c
    }

    /// Piecewise-linear membership: 0 outside `[a, c]`, rising on `[a, b]`,
    /// falling on `(b, c]`. Degenerate edges (`a == b` or `b == c`) collapse
    /// to membership 1 at the mode.
    pub fn membership(&self, x: T) -> T {
        let TriangularFuzzyNumber { a, b, c } = *self;
        if x < a || x > c || x.is_nan() {
            T::zero()
        } else if x <= b {
            if b == a {
                T::one()
            } else {
                (x - a) / (b - a)
            }
        } else {
            (c - x) / (c - b)
        }
    }
}

impl<T: Scalar> From<TriangularFuzzyNumber<T>> for [f64; 3] {
    fn from(t: TriangularFuzzyNumber<T>) -> Self {
        [t.a.to_f64_lossy(), t.b.to_f64_lossy(), t.c.to_f64_lossy()]
    }
}

impl<T: Scalar> TryFrom<[f64; 3]> for TriangularFuzzyNumber<T> {
    type Error = Error;

    fn try_from([a, b, c]: [f64; 3]) -> Result<Self> {
        Self::new(T::lit(a), T::lit(b), T::lit(c))
    }
}

/// Turns per-class membership degrees into a mass function.
///
/// Classes with zero membership are ignored. With no supporting class the
/// result is vacuous; with one, all mass goes to that singleton. Otherwise
/// every class whose membership is strictly above the minimum keeps its
/// membership as singleton mass, the minimum-tied classes pool theirs onto
/// the union of all supporting classes, and everything is normalized by the
/// total membership.
pub fn bpa_from_memberships<T: Scalar>(frame: &Frame, memberships: &[T]) -> MassFunction<T> {
    debug_assert_eq!(memberships.len(), frame.len());
    let support: Vec<(usize, T)> = memberships
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, mu)| *mu > T::zero())
        .collect();
    match support.as_slice() {
        [] => MassFunction::vacuous(frame),
        [(only, _)] => MassFunction::certain(frame, SubsetId::singleton(*only))
            .expect("singleton within frame"),
        _ => {
            let floor = support
                .iter()
                .map(|(_, mu)| *mu)
                .fold(T::infinity(), T::min);
            let union = support
                .iter()
                .fold(SubsetId::EMPTY, |u, (i, _)| u.union(SubsetId::singleton(*i)));
            let total: T = support.iter().map(|(_, mu)| *mu).sum();
            let pairs = support.iter().map(|(i, mu)| {
                let target = if *mu > floor {
                    SubsetId::singleton(*i)
                } else {
                    union
                };
                (target, *mu / total)
            });
            MassFunction::new(frame, pairs).expect("normalized by construction")
        }
    }
}

/// One TFN per (feature, class): the trained model behind BPA generation.
#[derive(Debug, Clone, PartialEq)]
pub struct TfnModel<T> {
    frame: Frame,
    features: Vec<FeatureModel<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureModel<T> {
    pub name: String,
    /// Indexed by class position in the frame.
    pub classes: Vec<TriangularFuzzyNumber<T>>,
}

impl<T: Scalar> TfnModel<T> {
    pub fn new(frame: Frame, features: Vec<FeatureModel<T>>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Schema("model needs at least one feature".into()));
        }
        if let Some(bad) = features.iter().find(|f| f.classes.len() != frame.len()) {
            return Err(Error::Schema(format!(
                "feature `{}` has {} class models for a frame of {}",
                bad.name,
                bad.classes.len(),
                frame.len()
            )));
        }
        Ok(TfnModel { frame, features })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn features(&self) -> &[FeatureModel<T>] {
        &self.features
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn tfn(&self, feature: usize, class: usize) -> &TriangularFuzzyNumber<T> {
        &self.features[feature].classes[class]
    }

    pub fn memberships(&self, feature: usize, x: T) -> Result<Vec<T>> {
        let model = self.features.get(feature).ok_or(Error::FeatureOutOfRange {
            index: feature,
            count: self.features.len(),
        })?;
        Ok(model.classes.iter().map(|t| t.membership(x)).collect())
    }

    /// BPA produced by one feature (evidence source) for reading `x`.
    pub fn generate_bpa(&self, feature: usize, x: T) -> Result<MassFunction<T>> {
        let mu = self.memberships(feature, x)?;
        Ok(bpa_from_memberships(&self.frame, &mu))
    }

    /// One BPA per feature for a full feature vector.
    pub fn generate_all(&self, xs: &[T]) -> Result<Vec<MassFunction<T>>> {
        if xs.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: xs.len(),
            });
        }
        xs.iter()
            .enumerate()
            .map(|(j, x)| self.generate_bpa(j, *x))
            .collect()
    }

    /// `{"frame": [...], "features": [{"name": ..., "classes": {"Se": [a, b, c]}}]}`
    pub fn to_json(&self) -> Value {
        let features = self
            .features
            .iter()
            .map(|f| {
                let classes: Map<String, Value> = self
                    .frame
                    .labels()
                    .iter()
                    .zip(&f.classes)
                    .map(|(l, t)| (l.clone(), serde_json::json!(<[f64; 3]>::from(*t))))
                    .collect();
                serde_json::json!({ "name": f.name, "classes": classes })
            })
            .collect::<Vec<_>>();
        serde_json::json!({ "frame": self.frame.labels(), "features": features })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let features = value
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("missing `features` array".into()))?;
        let frame = match value.get("frame") {
            Some(labels) => Frame::new(serde_json::from_value::<Vec<String>>(labels.clone())?)?,
            None => {
                let first = features
                    .first()
                    .and_then(|f| f.get("classes"))
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Schema("missing `classes` object".into()))?;
                Frame::new(first.keys().cloned())?
            }
        };
        let features = features
            .iter()
            .map(|f| {
                let name = f
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Schema("feature without `name`".into()))?
                    .to_owned();
                let classes = f
                    .get("classes")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Schema(format!("feature `{name}` without `classes`")))?;
                let tfns = frame
                    .labels()
                    .iter()
                    .map(|l| {
                        let raw = classes.get(l).ok_or_else(|| {
                            Error::Schema(format!("feature `{name}` has no model for `{l}`"))
                        })?;
                        let abc: [f64; 3] = serde_json::from_value(raw.clone())?;
                        TriangularFuzzyNumber::try_from(abc)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FeatureModel {
                    name,
                    classes: tfns,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TfnModel::new(frame, features)
    }
}
