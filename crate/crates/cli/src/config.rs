//! Flat JSON experiment configuration; command-line flags override file values.

use std::path::{Path, PathBuf};

use harbench::evaluation::SplitStrategy;
use harbench::gbdt::SplitMethod;
use harbench::minirocket::default_lambda_grid;
use harbench::{InputSpec, MccvConfig, MiniRocketConfig, ModelSpec, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Gbdt,
    Minirocket,
}

/// Every key is optional in the file; required ones are checked by
/// [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset_root: Option<PathBuf>,
    pub model: Option<ModelKind>,
    /// `precomputed`, `channel:<name>` or a bare channel name.
    pub input: Option<String>,
    pub iterations: Option<usize>,
    pub train_fraction: Option<f64>,
    pub seed_base: Option<u64>,
    pub split_strategy: Option<SplitStrategy>,
    pub output_dir: Option<PathBuf>,
    // gradient-boosting overrides
    pub rounds: Option<usize>,
    pub max_depth: Option<usize>,
    pub eta: Option<f64>,
    pub lambda_l2: Option<f64>,
    pub alpha_l1: Option<f64>,
    pub gamma: Option<f64>,
    pub min_child_weight: Option<f64>,
    pub n_bins: Option<usize>,
    pub split_method: Option<SplitMethod>,
    // MiniRocket overrides
    pub target_features: Option<usize>,
    pub lambda_grid: Option<Vec<f64>>,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub dataset_root: PathBuf,
    pub output_dir: PathBuf,
    pub model: ModelSpec,
    pub input: InputSpec,
    pub mccv: MccvConfig,
}

pub fn parse_input(text: &str) -> Result<InputSpec, CliError> {
    let name = text.strip_prefix("channel:").unwrap_or(text);
    name.parse().map_err(|_| {
        CliError::Validation(format!(
            "unknown input {text:?}; use precomputed or channel:<name>"
        ))
    })
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
    }

    /// Values set in `flags` replace those in `self`.
    pub fn overridden_by(mut self, flags: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            dataset_root,
            model,
            input,
            iterations,
            train_fraction,
            seed_base,
            split_strategy,
            output_dir,
            rounds,
            max_depth,
            eta,
            lambda_l2,
            alpha_l1,
            gamma,
            min_child_weight,
            n_bins,
            split_method,
            target_features,
            lambda_grid
        );
        self
    }

    /// Checks every field and the model/input combination without touching data.
    pub fn resolve(&self) -> Result<ResolvedExperiment, CliError> {
        let missing = |k: &str| CliError::Validation(format!("missing required setting {k:?}"));
        let dataset_root = self
            .dataset_root
            .clone()
            .ok_or_else(|| missing("dataset_root"))?;
        let output_dir = self
            .output_dir
            .clone()
            .ok_or_else(|| missing("output_dir"))?;
        let kind = self.model.ok_or_else(|| missing("model"))?;
        let input = parse_input(self.input.as_deref().unwrap_or("precomputed"))?;

        let gbdt_keys = [
            self.rounds.is_some(),
            self.max_depth.is_some(),
            self.eta.is_some(),
            self.lambda_l2.is_some(),
            self.alpha_l1.is_some(),
            self.gamma.is_some(),
            self.min_child_weight.is_some(),
            self.n_bins.is_some(),
            self.split_method.is_some(),
        ];
        let rocket_keys = [self.target_features.is_some(), self.lambda_grid.is_some()];
        let model = match kind {
            ModelKind::Gbdt => {
                if rocket_keys.iter().any(|&b| b) {
                    return Err(CliError::Validation(
                        "MiniRocket settings given for model gbdt".into(),
                    ));
                }
                if let InputSpec::Channel(c) = input {
                    return Err(CliError::Validation(format!(
                        "incompatible input: gbdt requires precomputed features, not channel {c}"
                    )));
                }
                let d = TrainConfig::default();
                let cfg = TrainConfig {
                    rounds: self.rounds.unwrap_or(d.rounds),
                    max_depth: self.max_depth.unwrap_or(d.max_depth),
                    eta: self.eta.unwrap_or(d.eta),
                    lambda_l2: self.lambda_l2.unwrap_or(d.lambda_l2),
                    alpha_l1: self.alpha_l1.unwrap_or(d.alpha_l1),
                    gamma: self.gamma.unwrap_or(d.gamma),
                    min_child_weight: self.min_child_weight.unwrap_or(d.min_child_weight),
                    n_bins: self.n_bins.unwrap_or(d.n_bins),
                    seed: 0,
                    method: self.split_method.unwrap_or(d.method),
                };
                cfg.validate()
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                ModelSpec::Gbdt(cfg)
            }
            ModelKind::Minirocket => {
                if gbdt_keys.iter().any(|&b| b) {
                    return Err(CliError::Validation(
                        "gradient-boosting settings given for model minirocket".into(),
                    ));
                }
                let d = MiniRocketConfig::default();
                let cfg = MiniRocketConfig {
                    target_features: self.target_features.unwrap_or(d.target_features),
                    lambda_grid: self.lambda_grid.clone().unwrap_or_else(default_lambda_grid),
                    seed: 0,
                };
                if cfg.target_features < harbench::minirocket::N_KERNELS {
                    return Err(CliError::Validation(format!(
                        "target_features must be at least {}",
                        harbench::minirocket::N_KERNELS
                    )));
                }
                if cfg.lambda_grid.is_empty()
                    || cfg.lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0.0))
                {
                    return Err(CliError::Validation(
                        "lambda_grid must hold positive finite values".into(),
                    ));
                }
                ModelSpec::MiniRocket(cfg)
            }
        };

        let d = MccvConfig::default();
        let mccv = MccvConfig {
            iterations: self.iterations.unwrap_or(d.iterations),
            train_fraction: self.train_fraction.unwrap_or(d.train_fraction),
            seed_base: self.seed_base.unwrap_or(d.seed_base),
            strategy: self.split_strategy.unwrap_or(d.strategy),
        };
        if mccv.iterations == 0 {
            return Err(CliError::Validation("iterations must be at least 1".into()));
        }
        if !(mccv.train_fraction > 0.0 && mccv.train_fraction < 1.0) {
            return Err(CliError::Validation(format!(
                "train_fraction must be in (0, 1), got {}",
                mccv.train_fraction
            )));
        }
        Ok(ResolvedExperiment {
            dataset_root,
            output_dir,
            model,
            input,
            mccv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            dataset_root: Some("data".into()),
            output_dir: Some("out".into()),
            model: Some(ModelKind::Gbdt),
            ..Default::default()
        }
    }

    #[test]
    fn flags_take_precedence() {
        let file = ExperimentConfig {
            iterations: Some(3),
            eta: Some(0.1),
            ..base()
        };
        let flags = ExperimentConfig {
            iterations: Some(5),
            ..Default::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.iterations, Some(5));
        assert_eq!(merged.eta, Some(0.1));
    }

    #[test]
    fn defaults_resolve() {
        let r = base().resolve().unwrap();
        assert_eq!(r.mccv, MccvConfig::default());
        assert_eq!(r.input, InputSpec::Precomputed);
        assert_eq!(r.model, ModelSpec::Gbdt(TrainConfig::default()));
    }

    #[test]
    fn rejects_bad_combinations() {
        let gbdt_raw = ExperimentConfig {
            input: Some("channel:total_acc_x".into()),
            ..base()
        };
        assert!(
            matches!(gbdt_raw.resolve(), Err(CliError::Validation(m)) if m.contains("incompatible"))
        );
        let mixed = ExperimentConfig {
            target_features: Some(1000),
            ..base()
        };
        assert!(mixed.resolve().is_err());
        let frac = ExperimentConfig {
            train_fraction: Some(1.5),
            ..base()
        };
        assert!(frac.resolve().is_err());
        assert!(ExperimentConfig::default().resolve().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"model":"gbdt","colour":"red"}"#);
        assert!(err.is_err());
    }

    #[test]
    fn inputs_parse_with_or_without_prefix() {
        assert_eq!(parse_input("precomputed").unwrap(), InputSpec::Precomputed);
        assert_eq!(
            parse_input("channel:body_acc_z").unwrap(),
            InputSpec::Channel(harbench::Channel::BodyAccZ)
        );
        assert_eq!(
            parse_input("body_acc_z").unwrap(),
            InputSpec::Channel(harbench::Channel::BodyAccZ)
        );
        assert!(parse_input("channel:nose").is_err());
    }
}
