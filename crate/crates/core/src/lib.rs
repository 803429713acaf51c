//! Conformalized matrix completion.
//!
//! Distribution-free confidence intervals for the unobserved entries of a
//! partially observed matrix. Any low-rank completer can serve as the base
//! estimator; a weighted split-conformal calibration layer turns its point
//! estimates into intervals whose average coverage over the missing entries
//! is guaranteed under entrywise Bernoulli sampling, with weights driven by
//! (estimated or oracle) observation propensities.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`sample`] — observation masks, train/calibration splits;
//! 2. [`completion`] — ALS and nuclear-norm base completers plus the
//!    model-based noise/scale estimates and baseline intervals;
//! 3. [`propensity`] — homogeneous, logistic row+column, and one-bit
//!    estimators of the observation probabilities;
//! 4. [`conformal`] — weighted residual quantiles and the one-shot, exact
//!    split, and full conformal interval constructors;
//! 5. [`metrics`] — coverage/length scoring and multi-trial aggregation;
//! 6. [`experiments`] — synthetic generators, the trial runner, and the
//!    masked-real-matrix evaluation protocol behind the `confmc` CLI.
//!
//! With the default `parallel` feature, independent trials (and the grid
//! refits of full conformal) run on rayon with per-trial deterministic RNG
//! streams; disabling the feature falls back to sequential loops with
//! identical output.

pub mod completion;
pub mod conformal;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mat;
pub mod metrics;
pub(crate) mod par;
pub mod propensity;
pub mod rng;
pub mod sample;
pub mod stats;

pub use error::{Error, Result};
pub use mat::{BoolMat, Mat};
pub use rng::RandomSource;
