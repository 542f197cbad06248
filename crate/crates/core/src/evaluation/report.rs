//! Serializable run results.

use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::{EvalError, MccvConfig, ModelSpec};

/// Bumped whenever the JSON layout of [`EvalReport`] changes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub iteration: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub auc: f64,
    pub train_time_s: f64,
    pub predict_time_s: f64,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub library_version: String,
    /// `gbdt` or `minirocket`.
    pub model: String,
    /// `precomputed` or a channel name.
    pub input: String,
    pub model_spec: ModelSpec,
    pub mccv: MccvConfig,
    pub iterations: Vec<IterationResult>,
    pub accuracy: MeanStd,
    pub macro_f1: MeanStd,
    pub auc: MeanStd,
    pub train_time_s: MeanStd,
    pub predict_time_s: MeanStd,
    /// Sum of the per-iteration matrices.
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub(crate) fn assemble(
        model_spec: ModelSpec,
        input: String,
        mccv: MccvConfig,
        iterations: Vec<IterationResult>,
        n_classes: usize,
    ) -> Self {
        let col = |f: fn(&IterationResult) -> f64| {
            MeanStd::of(&iterations.iter().map(f).collect::<Vec<_>>())
        };
        let mut confusion = ConfusionMatrix::new(n_classes);
        for it in &iterations {
            confusion.merge(&it.confusion);
        }
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            library_version: crate::VERSION.to_string(),
            model: model_spec.tag().to_string(),
            input,
            accuracy: col(|r| r.accuracy),
            macro_f1: col(|r| r.macro_f1),
            auc: col(|r| r.auc),
            train_time_s: col(|r| r.train_time_s),
            predict_time_s: col(|r| r.predict_time_s),
            model_spec,
            mccv,
            iterations,
            confusion,
        }
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for it in &mut r.iterations {
            it.train_time_s = 0.0;
            it.predict_time_s = 0.0;
        }
        r.train_time_s = MeanStd {
            mean: 0.0,
            std: 0.0,
        };
        r.predict_time_s = MeanStd {
            mean: 0.0,
            std: 0.0,
        };
        r
    }

    pub fn to_json(&self) -> Result<String, EvalError> {
        serde_json::to_string_pretty(self).map_err(|e| EvalError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        serde_json::from_str(text).map_err(|e| EvalError::Format(e.to_string()))
    }

    /// One row per iteration, then an aggregate row of `mean±std` cells.
    pub fn to_csv(&self) -> Result<String, EvalError> {
        let fmt_err = |e: csv::Error| EvalError::Format(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["Iteration", "Accuracy", "F1", "AUC", "Training Time (sec)"])
            .map_err(fmt_err)?;
        for it in &self.iterations {
            w.write_record([
                it.iteration.to_string(),
                format!("{:.4}", it.accuracy),
                format!("{:.4}", it.macro_f1),
                format!("{:.4}", it.auc),
                format!("{:.1}", it.train_time_s),
            ])
            .map_err(fmt_err)?;
        }
        let pm = |m: MeanStd| format!("{:.4}±{:.4}", m.mean, m.std);
        w.write_record([
            "mean±std".to_string(),
            pm(self.accuracy),
            pm(self.macro_f1),
            pm(self.auc),
            format!("{:.1}", self.train_time_s.mean),
        ])
        .map_err(fmt_err)?;
        let bytes = w
            .into_inner()
            .map_err(|e| EvalError::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| EvalError::Format(e.to_string()))
    }
}
