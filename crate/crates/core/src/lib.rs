//! Benchmark engine for human activity recognition on smartphone inertial data.
//!
//! The crate is split along the experiment pipeline:
//!
//! - [`dataset`]: loading and validating the UCI HAR directory layout.
//! - [`signal`]: the preprocessing chain (median and Butterworth filtering,
//!   gravity separation, jerk, magnitude, FFT) and the 561-entry feature catalog.
//! - [`minirocket`]: the deterministic MiniRocket transform with a closed-form
//!   ridge classifier head.
//! - [`gbdt`]: a second-order gradient-boosted tree classifier with L1/L2
//!   regularization and learned missing-value directions.
//! - [`evaluation`]: Monte Carlo cross-validation, metrics and reports.
//! - [`reference`]: published reference numbers used as comparison rows.

pub mod dataset;
pub mod evaluation;
pub mod gbdt;
pub mod minirocket;
pub mod reference;
pub mod signal;

pub use dataset::{Activity, Channel, DatasetBundle, DatasetError, FeatureMatrix, InertialTensor};
pub use evaluation::{
    run_mccv, ConfusionMatrix, EvalError, EvalReport, InputSpec, MccvConfig, ModelSpec,
};
pub use gbdt::{GbdtEnsemble, GbdtError, TrainConfig};
pub use minirocket::{MiniRocketConfig, MiniRocketError, MiniRocketModel};
pub use signal::{FeatureCatalog, SignalError};

/// Version string recorded in serialized models and run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
