//! Low-rank approximation of symmetric positive semidefinite kernel matrices
//! with standard, ensemble and boosting Nyström learners.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: symmetric eigendecomposition, rank-k truncation, truncated
//!   pseudoinverse and the ridge normal-equation solver.
//! - [`kernels`]: Gaussian/linear kernels, Gram matrices and column access.
//! - [`sampling`]: uniform column draws and the k-means / PAM / Park–Jun
//!   k-medoids clusterings used to choose residual columns.
//! - [`nystrom`]: the factored Nyström learner and weighted mixtures.
//! - [`weighting`]: uniform, exponential and ridge mixture weights.
//! - [`methods`]: the standard, ensemble and boosting drivers.

pub mod error;
pub mod kernels;
pub mod linalg;
pub mod methods;
pub mod nystrom;
pub mod sampling;
pub mod weighting;

pub use error::{Error, Result};
pub use kernels::{Dataset, GramMatrix, KernelAccess, KernelColumns, KernelSpec};
pub use linalg::DenseMatrix;
pub use methods::{
    boosting_nystrom, ensemble_nystrom, parse_method_name, standard_run, BoostConfig,
    ClusteringKind, EnsembleConfig, ErrorTrace, Method, TracePoint,
};
pub use nystrom::{MixtureModel, NystromFactor};
pub use sampling::{IndexSet, RngState};
pub use weighting::{SchemeKind, WeightScheme};
