//! Monte Carlo cross-validation: repeated seeded splits, fit, predict, score.

mod confusion;
pub mod metrics;
mod report;
pub mod split;

use std::time::Instant;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Activity, Channel, DatasetBundle, DatasetError};
use crate::gbdt::{GbdtEnsemble, GbdtError, TrainConfig};
use crate::minirocket::{MiniRocketConfig, MiniRocketError, MiniRocketModel};

pub use confusion::ConfusionMatrix;
pub use metrics::{accuracy, macro_f1, ovo_auc, per_class_f1};
pub use report::{EvalReport, IterationResult, MeanStd, REPORT_SCHEMA_VERSION};
pub use split::{split, split_by_subject, split_stratified, SplitPlan, SplitStrategy};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("degenerate split: {n_train} train and {n_test} test instances")]
    DegenerateSplit { n_train: usize, n_test: usize },
    #[error("empty input")]
    Empty,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("class index {0} out of range")]
    LabelOutOfRange(usize),
    #[error("fewer than two classes present")]
    SingleClass,
    #[error("incompatible input: {0}")]
    IncompatibleInput(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("report format: {0}")]
    Format(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error(transparent)]
    MiniRocket(#[from] MiniRocketError),
}

/// Classifier and its hyperparameters. The `seed` inside each config is
/// replaced by the iteration seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Gbdt(TrainConfig),
    #[serde(rename = "minirocket")]
    MiniRocket(MiniRocketConfig),
}

impl ModelSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelSpec::Gbdt(_) => "gbdt",
            ModelSpec::MiniRocket(_) => "minirocket",
        }
    }
}

/// What each instance looks like to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    /// The 561-column feature matrix (read as a series by MiniRocket).
    Precomputed,
    /// One raw inertial channel, 128 samples per instance.
    Channel(Channel),
}

impl InputSpec {
    pub fn tag(&self) -> String {
        match self {
            InputSpec::Precomputed => "precomputed".into(),
            InputSpec::Channel(c) => c.name().into(),
        }
    }
}

impl std::str::FromStr for InputSpec {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "precomputed" {
            Ok(InputSpec::Precomputed)
        } else {
            s.parse().map(InputSpec::Channel)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MccvConfig {
    pub iterations: usize,
    pub train_fraction: f64,
    /// Iteration `i` uses seed `seed_base + i` for its split and its model.
    pub seed_base: u64,
    pub strategy: SplitStrategy,
}

impl Default for MccvConfig {
    fn default() -> Self {
        Self {
            iterations: 10,
            train_fraction: 0.7,
            seed_base: 0,
            strategy: SplitStrategy::Random,
        }
    }
}

/// Scores in model class order spread into `n_classes` columns; classes the
/// model never saw rank below everything.
fn expand_scores(scores: &Array2<f64>, classes: &[usize], n_classes: usize) -> Array2<f64> {
    let mut out = Array2::from_elem((scores.nrows(), n_classes), f64::NEG_INFINITY);
    for (j, &c) in classes.iter().enumerate() {
        out.column_mut(c).assign(&scores.column(j));
    }
    out
}

/// Fits on the training rows and returns `(predictions, scores, train s, predict s)`.
fn fit_predict(
    model: &ModelSpec,
    x_train: ArrayView2<'_, f64>,
    y_train: &[usize],
    x_test: ArrayView2<'_, f64>,
    seed: u64,
) -> Result<(Vec<usize>, Array2<f64>, f64, f64), EvalError> {
    let n_classes = Activity::COUNT;
    match model {
        ModelSpec::Gbdt(cfg) => {
            let cfg = TrainConfig {
                seed,
                ..cfg.clone()
            };
            let t0 = Instant::now();
            let m = GbdtEnsemble::train(x_train, y_train, &cfg)?;
            let train_s = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let proba = m.predict_proba(x_test)?;
            let pred = m.predict(x_test)?;
            let predict_s = t1.elapsed().as_secs_f64();
            Ok((
                pred,
                expand_scores(&proba, &m.classes, n_classes),
                train_s,
                predict_s,
            ))
        }
        ModelSpec::MiniRocket(cfg) => {
            let cfg = MiniRocketConfig {
                seed,
                ..cfg.clone()
            };
            let t0 = Instant::now();
            let m = MiniRocketModel::fit(x_train, y_train, &cfg)?;
            let train_s = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let (pred, scores) = m.predict(x_test)?;
            let predict_s = t1.elapsed().as_secs_f64();
            Ok((
                pred,
                expand_scores(&scores, m.classes(), n_classes),
                train_s,
                predict_s,
            ))
        }
    }
}

fn input_matrix(
    bundle: &DatasetBundle,
    model: &ModelSpec,
    input: InputSpec,
) -> Result<Array2<f64>, EvalError> {
    match (model, input) {
        (_, InputSpec::Precomputed) => Ok(bundle.features().values().clone()),
        (ModelSpec::MiniRocket(_), InputSpec::Channel(c)) => {
            Ok(bundle.inertial().channel(c).to_owned())
        }
        (ModelSpec::Gbdt(_), InputSpec::Channel(c)) => Err(EvalError::IncompatibleInput(format!(
            "gbdt requires the precomputed feature matrix, not raw channel {c}"
        ))),
    }
}

/// Runs `config.iterations` independent split/fit/score rounds.
///
/// Iterations run one after another so wall-clock timings are not skewed by
/// contention; each model parallelizes internally.
pub fn run_mccv(
    bundle: &DatasetBundle,
    model: &ModelSpec,
    input: InputSpec,
    config: &MccvConfig,
) -> Result<EvalReport, EvalError> {
    if config.iterations == 0 {
        return Err(EvalError::InvalidConfig(
            "iterations must be at least 1".into(),
        ));
    }
    let x = input_matrix(bundle, model, input)?;
    let y = bundle.label_indices();
    let n = y.len();
    let mut results = Vec::with_capacity(config.iterations);
    for iteration in 0..config.iterations {
        let seed = config.seed_base + iteration as u64;
        let plan = SplitPlan {
            iteration,
            train_fraction: config.train_fraction,
            n_total: n,
            seed,
        };
        let (train, test) = match config.strategy {
            SplitStrategy::Random => split(&plan)?,
            SplitStrategy::Stratified => split_stratified(&plan, &y)?,
            SplitStrategy::SubjectDisjoint => split_by_subject(&plan, bundle.subjects())?,
        };
        let x_train = x.select(Axis(0), &train);
        let x_test = x.select(Axis(0), &test);
        let y_train: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let y_test: Vec<usize> = test.iter().map(|&i| y[i]).collect();

        let (pred, scores, train_time_s, predict_time_s) =
            fit_predict(model, x_train.view(), &y_train, x_test.view(), seed)?;
        let mut confusion = ConfusionMatrix::new(Activity::COUNT);
        confusion.add(&y_test, &pred)?;
        let result = IterationResult {
            iteration,
            seed,
            n_train: train.len(),
            n_test: test.len(),
            accuracy: accuracy(&y_test, &pred)?,
            macro_f1: macro_f1(&y_test, &pred, Activity::COUNT)?,
            auc: ovo_auc(&y_test, scores.view())?,
            train_time_s,
            predict_time_s,
            confusion,
        };
        log::info!(
            "{} on {}: iteration {iteration} accuracy {:.4} f1 {:.4} auc {:.4} fit {:.2}s",
            model.tag(),
            input.tag(),
            result.accuracy,
            result.macro_f1,
            result.auc,
            result.train_time_s
        );
        results.push(result);
    }
    Ok(EvalReport::assemble(
        model.clone(),
        input.tag(),
        config.clone(),
        results,
        Activity::COUNT,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synthetic::{generate, SyntheticConfig};

    fn bundle() -> DatasetBundle {
        generate(&SyntheticConfig {
            windows_per_class: 12,
            n_subjects: 6,
            noise: 0.5,
            seed: 11,
        })
        .unwrap()
    }

    fn small_gbdt() -> ModelSpec {
        ModelSpec::Gbdt(TrainConfig {
            rounds: 5,
            max_depth: 3,
            ..TrainConfig::default()
        })
    }

    #[test]
    fn single_iteration_has_zero_std() {
        let cfg = MccvConfig {
            iterations: 1,
            ..MccvConfig::default()
        };
        let r = run_mccv(&bundle(), &small_gbdt(), InputSpec::Precomputed, &cfg).unwrap();
        assert_eq!(r.iterations.len(), 1);
        assert_eq!((r.accuracy.std, r.macro_f1.std, r.auc.std), (0.0, 0.0, 0.0));
        assert_eq!(r.iterations[0].n_train + r.iterations[0].n_test, 72);
        assert_eq!(r.model, "gbdt");
        assert_eq!(r.input, "precomputed");
    }

    #[test]
    fn reports_reproduce_without_timings() {
        let b = bundle();
        let cfg = MccvConfig {
            iterations: 2,
            ..MccvConfig::default()
        };
        let a = run_mccv(&b, &small_gbdt(), InputSpec::Precomputed, &cfg).unwrap();
        let c = run_mccv(&b, &small_gbdt(), InputSpec::Precomputed, &cfg).unwrap();
        assert_eq!(a.without_timings(), c.without_timings());
        assert_eq!(
            a.without_timings().to_json().unwrap(),
            c.without_timings().to_json().unwrap()
        );
        let pooled = a.confusion.accuracy();
        let pct = a.confusion.percent();
        let diag: f64 = (0..6).map(|i| pct[i][i]).sum();
        assert!((diag / 100.0 - pooled).abs() < 1e-12);
        assert!([a.accuracy.mean, a.macro_f1.mean, a.auc.mean]
            .iter()
            .all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn gbdt_rejects_raw_channels() {
        let cfg = MccvConfig {
            iterations: 1,
            ..MccvConfig::default()
        };
        let err = run_mccv(
            &bundle(),
            &small_gbdt(),
            InputSpec::Channel(Channel::TotalAccX),
            &cfg,
        );
        assert!(matches!(err, Err(EvalError::IncompatibleInput(_))));
    }

    #[test]
    fn minirocket_on_a_raw_channel() {
        let model = ModelSpec::MiniRocket(MiniRocketConfig {
            target_features: 840,
            ..MiniRocketConfig::default()
        });
        let cfg = MccvConfig {
            iterations: 2,
            ..MccvConfig::default()
        };
        let r = run_mccv(
            &bundle(),
            &model,
            InputSpec::Channel(Channel::TotalAccY),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.input, "total_acc_y");
        assert_eq!(r.confusion.total(), 2 * 22);
        assert!(r.auc.mean > 0.5);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let cfg = MccvConfig {
            iterations: 2,
            strategy: SplitStrategy::Stratified,
            ..MccvConfig::default()
        };
        let r = run_mccv(&bundle(), &small_gbdt(), InputSpec::Precomputed, &cfg).unwrap();
        assert_eq!(EvalReport::from_json(&r.to_json().unwrap()).unwrap(), r);
        let csv = r.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "Iteration,Accuracy,F1,AUC,Training Time (sec)");
        assert!(lines[3].starts_with("mean±std,"));
    }

    #[test]
    fn input_spec_parses() {
        assert_eq!(
            "precomputed".parse::<InputSpec>().unwrap(),
            InputSpec::Precomputed
        );
        assert_eq!(
            "body_gyro_z".parse::<InputSpec>().unwrap(),
            InputSpec::Channel(Channel::BodyGyroZ)
        );
        assert!("nope".parse::<InputSpec>().is_err());
    }

    #[test]
    fn missing_training_class_scores_are_expanded() {
        let s = Array2::from_shape_vec((2, 2), vec![0.1, 0.9, 0.8, 0.2]).unwrap();
        let e = expand_scores(&s, &[1, 4], 6);
        assert_eq!(e[[0, 1]], 0.1);
        assert_eq!(e[[1, 4]], 0.2);
        assert_eq!(e[[0, 0]], f64::NEG_INFINITY);
    }
}
