//! Query-efficient posterior estimation for expensive likelihoods.
//!
//! The likelihood of a model is often only available through an expensive
//! black-box oracle. This crate models the log-joint density with a Gaussian
//! process, selects each new likelihood query by maximising an acquisition
//! utility over the parameter space, and turns the fitted surrogate into a
//! normalized posterior estimate on a grid. Alongside the active strategies
//! (exponentiated variance and negative expected divergence) it ships the
//! usual comparison baselines (Metropolis-Hastings with density estimation or
//! regression, rejection ABC, uniform random queries, expected improvement,
//! and variance-only active regression) plus synthetic benchmark problems
//! with analytic ground truth and the evaluation machinery to score them.

pub mod active;
pub mod baselines;
pub mod density;
pub mod error;
pub mod evaluation;
pub mod gp;
pub mod problems;
pub mod space;

pub use active::{BapeConfig, QueryLog, QueryRecord, UtilityKind};
pub use density::{GridDensity, RectGrid};
pub use error::{Error, OracleError, Result};
pub use evaluation::{Checkpoint, ExperimentTrace};
pub use gp::{GpHyperParams, GpPosterior, TrainingSet};
pub use problems::{Functional, Oracle, Prior, Problem};
pub use space::ParamSpace;
