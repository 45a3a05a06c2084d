//! Probabilistic Boolean networks in algebraic form, their quotients under
//! lumpable equivalence relations, and controller synthesis through those
//! quotients.

pub mod algebra;
pub mod control;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod quotient;
pub mod relations;

pub use algebra::{CanonicalIndex, LogicalMatrix, SparseMatrix, StochasticMatrix, ZeroOneMatrix, DEFAULT_TOLERANCE};
pub use control::{CostSpec, Policy, StabilizationCertificate, StateFeedback};
pub use error::{Error, Result};
pub use model::{NetworkDef, Pbn};
pub use quotient::QuotientSystem;
pub use relations::{Partition, ProjectionPair};
