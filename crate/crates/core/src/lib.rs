//! Belief-function classification with contribution-based source reliability.
//!
//! Each feature acts as an evidence source. Triangular fuzzy numbers fitted on
//! training data turn a reading into a mass function; every source is scored
//! by how much its decision confidence favours the true class over the
//! others, and the resulting min-max weights drive Shafer discounting before
//! Dempster fusion and a pignistic decision.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` or `f32`); the
//! `*F64`/`*F32` aliases below pin the common cases.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod frame;
pub mod fri;
pub mod ifs;
pub mod mass;
pub mod pipeline;
pub mod replay;
pub mod scalar;
pub mod tfn;

pub use baselines::{BpaDistance, FusionMethod};
pub use dataset::{load_dataset, Dataset, Schema, SplitSpec};
pub use error::{Error, Result};
pub use frame::{Frame, SubsetId};
pub use fri::{ReliabilityReport, SourceReliability};
pub use ifs::IntuitionisticFuzzyValue;
pub use mass::{Decision, MassFunction, Pignistic};
pub use pipeline::{EvalOptions, EvalResult, TiePolicy};
pub use scalar::Scalar;
pub use tfn::{TfnModel, TriangularFuzzyNumber};

pub type MassFunctionF64 = MassFunction<f64>;
pub type MassFunctionF32 = MassFunction<f32>;
pub type PignisticF64 = Pignistic<f64>;
pub type PignisticF32 = Pignistic<f32>;
pub type TriangularFuzzyNumberF64 = TriangularFuzzyNumber<f64>;
pub type TriangularFuzzyNumberF32 = TriangularFuzzyNumber<f32>;
pub type TfnModelF64 = TfnModel<f64>;
pub type TfnModelF32 = TfnModel<f32>;
pub type IfvF64 = IntuitionisticFuzzyValue<f64>;
pub type IfvF32 = IntuitionisticFuzzyValue<f32>;
pub type ReliabilityReportF64 = ReliabilityReport<f64>;
pub type ReliabilityReportF32 = ReliabilityReport<f32>;
pub type DatasetF64 = Dataset<f64>;
pub type DatasetF32 = Dataset<f32>;
