//! Intuitionistic fuzzy values and their bridge to belief functions.
//!
//! A mass function and a class `A` map to the IFV `⟨Bel(A), 1 − Pl(A)⟩`, so
//! the belief interval `[Bel, Pl]` is the same object as `[μ, 1 − ν]`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::SubsetId;
use crate::mass::MassFunction;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntuitionisticFuzzyValue<T> {
    mu: T,
    nu: T,
}

impl<T: Scalar> IntuitionisticFuzzyValue<T> {
    pub fn new(mu: T, nu: T) -> Result<Self> {
        let ok = mu >= T::zero() && nu >= T::zero() && mu + nu <= T::one() + T::epsilon();
        if !ok {
            return Err(Error::InvalidIfv {
                mu: mu.to_f64_lossy(),
                nu: nu.to_f64_lossy(),
            });
        }
        Ok(IntuitionisticFuzzyValue { mu, nu })
    }

    /// Membership degree μ.
    pub fn membership(&self) -> T {
        self.mu
    }

    /// Non-membership degree ν.
    pub fn non_membership(&self) -> T {
        self.nu
    }

    /// π = 1 − μ − ν.
    pub fn hesitancy(&self) -> T {
        T::one() - self.mu - self.nu
    }

    /// S = μ − ν.
    pub fn score(&self) -> T {
        self.mu - self.nu
    }

    /// H = μ + ν.
    pub fn accuracy(&self) -> T {
        self.mu + self.nu
    }

    /// Compares by score, then by accuracy. `Greater` means `self` ranks higher.
    pub fn rank(&self, other: &Self) -> Ordering {
        self.score()
            .partial_cmp(&other.score())
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                self.accuracy()
                    .partial_cmp(&other.accuracy())
                    .unwrap_or(Ordering::Equal)
            })
    }

    /// Alternate rendering as the interval `[μ, 1 − ν]`.
    pub fn interval(&self) -> IfvInterval<T> {
        IfvInterval(*self)
    }
}

impl<T: Scalar> fmt::Display for IntuitionisticFuzzyValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:.4}, {:.4}⟩", self.mu, self.nu)
    }
}

pub struct IfvInterval<T>(IntuitionisticFuzzyValue<T>);

impl<T: Scalar> fmt::Display for IfvInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.4}, {:.4}]", self.0.mu, T::one() - self.0.nu)
    }
}

/// `⟨Bel(A), 1 − Pl(A)⟩`.
pub fn ifv_from_mass<T: Scalar>(m: &MassFunction<T>, a: SubsetId) -> IntuitionisticFuzzyValue<T> {
    let mu = m.belief(a);
    let nu = (T::one() - m.plausibility(a)).max(T::zero());
    // Bel <= Pl term by term, so μ + ν <= 1 up to rounding
    IntuitionisticFuzzyValue { mu, nu }
}

/// dc(A) = Bel(A) + Pl(A) − 1, the score of the bridged IFV.
pub fn decision_confidence<T: Scalar>(m: &MassFunction<T>, class: SubsetId) -> Result<T> {
    if !class.is_singleton() {
        return Err(Error::NotASingleton);
    }
    m.frame().check(class)?;
    Ok(m.belief(class) + m.plausibility(class) - T::one())
}

/// Decision confidence of every singleton, in frame order.
pub fn confidence_vector<T: Scalar>(m: &MassFunction<T>) -> Vec<T> {
    m.frame()
        .singletons()
        .map(|s| m.belief(s) + m.plausibility(s) - T::one())
        .collect()
}
