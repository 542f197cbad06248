//! MiniRocket: a fixed set of 84 dilated convolution kernels, biases drawn from
//! quantiles of training convolutions, proportion-of-positive-values pooling,
//! and a ridge classifier on the pooled features.

pub mod kernels;
pub mod plan;
pub mod ridge;
pub mod transform;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kernels::{KernelSet, KERNEL_LEN, N_KERNELS};
pub use plan::{DilationPlan, Padding, DEFAULT_TARGET_FEATURES};
pub use ridge::{default_lambda_grid, RidgeHead};
pub use transform::{fit_biases, transform, BiasTable};

/// Format version of serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MiniRocketError {
    #[error("series of length {got} is shorter than the kernel length {needed}")]
    InputTooShort { needed: usize, got: usize },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("every transformed feature has zero variance")]
    DegenerateFeatures,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("model format: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiniRocketConfig {
    pub target_features: usize,
    pub lambda_grid: Vec<f64>,
    pub seed: u64,
}

impl Default for MiniRocketConfig {
    fn default() -> Self {
        Self {
            target_features: DEFAULT_TARGET_FEATURES,
            lambda_grid: default_lambda_grid(),
            seed: 0,
        }
    }
}

/// A fitted model. Immutable; prediction is safe from many threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiniRocketModel {
    pub format_version: u32,
    pub library_version: String,
    pub kernel_hash: String,
    pub seed: u64,
    pub plan: DilationPlan,
    pub biases: BiasTable,
    pub head: RidgeHead,
    #[serde(skip, default)]
    kernels: KernelSet,
}

impl MiniRocketModel {
    /// Fits on univariate series `x` (`n × L`) with class labels `y`.
    pub fn fit(
        x: ArrayView2<'_, f64>,
        y: &[usize],
        config: &MiniRocketConfig,
    ) -> Result<Self, MiniRocketError> {
        if x.nrows() == 0 {
            return Err(MiniRocketError::EmptyTrainingSet);
        }
        if y.len() != x.nrows() {
            return Err(MiniRocketError::LengthMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        let kernels = KernelSet::canonical();
        let plan = DilationPlan::new(x.ncols(), config.target_features)?;
        let biases = fit_biases(x, &plan, &kernels, config.seed)?;
        let features = transform(x, &plan, &kernels, &biases)?;
        let head = RidgeHead::fit(features.view(), y, &config.lambda_grid)?;
        log::debug!(
            "minirocket: {} features, lambda {}, {} dropped",
            plan.n_features(),
            head.lambda,
            head.dropped.len()
        );
        Ok(Self {
            format_version: MODEL_FORMAT_VERSION,
            library_version: crate::VERSION.to_string(),
            kernel_hash: kernels.hash(),
            seed: config.seed,
            plan,
            biases,
            head,
            kernels,
        })
    }

    pub fn classes(&self) -> &[usize] {
        &self.head.classes
    }

    pub fn lambda(&self) -> f64 {
        self.head.lambda
    }

    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f32>, MiniRocketError> {
        transform(x, &self.plan, &self.kernels, &self.biases)
    }

    /// Raw ridge decision values, one column per entry of [`classes`](Self::classes).
    pub fn decision_function(
        &self,
        x: ArrayView2<'_, f64>,
    ) -> Result<Array2<f64>, MiniRocketError> {
        self.head.decision_function(self.transform(x)?.view())
    }

    /// Predicted labels (argmax score) and the score matrix.
    pub fn predict(
        &self,
        x: ArrayView2<'_, f64>,
    ) -> Result<(Vec<usize>, Array2<f64>), MiniRocketError> {
        let scores = self.decision_function(x)?;
        let labels = ridge::argmax_rows(&scores, &self.head.classes);
        Ok((labels, scores))
    }

    pub fn to_json(&self) -> Result<String, MiniRocketError> {
        serde_json::to_string(self).map_err(|e| MiniRocketError::Format(e.to_string()))
    }

    /// Restores a model, checking the format version and the kernel set hash.
    pub fn from_json(text: &str) -> Result<Self, MiniRocketError> {
        let mut model: Self =
            serde_json::from_str(text).map_err(|e| MiniRocketError::Format(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(MiniRocketError::Format(format!(
                "unsupported format version {}",
                model.format_version
            )));
        }
        model.kernels = KernelSet::canonical();
        if model.kernels.hash() != model.kernel_hash {
            return Err(MiniRocketError::Format("kernel set hash mismatch".into()));
        }
        Ok(model)
    }
}
