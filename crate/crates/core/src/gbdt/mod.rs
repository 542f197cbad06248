//! Gradient-boosted decision trees for multiclass classification.
//!
//! Each round fits one regression tree per class to the softmax gradients
//! `g = p − 1[y = k]` and hessians `h = p(1 − p)`, with L2 (`λ`) and L1 (`α`)
//! penalties on leaf weights and a minimum split gain `γ`. Missing values
//! (NaN) are routed both ways during split search and the better direction
//! is stored with the split.

pub mod binning;
pub mod train;
pub mod tree;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use binning::{BinnedMatrix, FeatureBins};
pub use tree::{leaf_weight, soft_threshold, split_gain, Node, Tree};

use train::TreeBuilder;

/// Format version of serialized ensembles.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Hessian floor keeping leaf denominators positive.
const MIN_HESSIAN: f64 = 1e-16;

#[derive(Debug, Error)]
pub enum GbdtError {
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("training data is empty or has fewer than two rows")]
    EmptyData,
    #[error("non-finite value at row {row}, feature {feature} (only NaN marks a missing value)")]
    NonFiniteLabelOrFeature { row: usize, feature: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model format: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMethod {
    /// Quantile-binned histograms.
    #[default]
    Histogram,
    /// Every midpoint between distinct node values.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub rounds: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub lambda_l2: f64,
    pub alpha_l1: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub n_bins: usize,
    pub seed: u64,
    pub method: SplitMethod,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            max_depth: 6,
            eta: 0.3,
            lambda_l2: 1.0,
            alpha_l1: 0.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            n_bins: 256,
            seed: 0,
            method: SplitMethod::Histogram,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |msg: &str| Err(GbdtError::InvalidConfig(msg.to_string()));
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad("eta must be positive");
        }
        for (name, v) in [
            ("lambda_l2", self.lambda_l2),
            ("alpha_l1", self.alpha_l1),
            ("gamma", self.gamma),
            ("min_child_weight", self.min_child_weight),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(GbdtError::InvalidConfig(format!("{name} must be >= 0")));
            }
        }
        if self.n_bins < 2 || self.n_bins > u16::MAX as usize {
            return bad("n_bins must be in 2..=65535");
        }
        Ok(())
    }
}

/// A trained ensemble: `rounds × classes` trees, round-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtEnsemble {
    pub format_version: u32,
    pub library_version: String,
    pub config: TrainConfig,
    pub n_features: usize,
    pub classes: Vec<usize>,
    /// Initial margin per class (log prior).
    pub base_score: Vec<f64>,
    pub trees: Vec<Tree>,
    pub importance: Vec<f64>,
}

/// Row-wise softmax of margins, in place.
pub fn softmax_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
}

fn check_finite(x: ArrayView2<'_, f64>) -> Result<(), GbdtError> {
    for ((row, feature), v) in x.indexed_iter() {
        if v.is_infinite() {
            return Err(GbdtError::NonFiniteLabelOrFeature { row, feature });
        }
    }
    Ok(())
}

impl GbdtEnsemble {
    /// Trains on `x` (`n × d`, NaN = missing) with class labels `y`.
    pub fn train(
        x: ArrayView2<'_, f64>,
        y: &[usize],
        config: &TrainConfig,
    ) -> Result<Self, GbdtError> {
        config.validate()?;
        let (n, d) = x.dim();
        if n < 2 || d == 0 {
            return Err(GbdtError::EmptyData);
        }
        if y.len() != n {
            return Err(GbdtError::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        check_finite(x)?;
        let mut classes = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(GbdtError::SingleClass);
        }
        let k = classes.len();
        let target: Vec<usize> = y
            .iter()
            .map(|label| classes.binary_search(label).expect("label in class list"))
            .collect();
        let base_score: Vec<f64> = (0..k)
            .map(|c| (target.iter().filter(|&&t| t == c).count() as f64 / n as f64).ln())
            .collect();

        let binned = match config.method {
            SplitMethod::Histogram => Some(BinnedMatrix::new(x, config.n_bins)),
            SplitMethod::Exact => None,
        };
        let mut margin = Array2::from_shape_fn((n, k), |(_, c)| base_score[c]);
        let mut trees = Vec::with_capacity(config.rounds * k);
        let mut importance = vec![0.0; d];
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();

        for _ in 0..config.rounds {
            let mut prob = margin.clone();
            softmax_rows(&mut prob);
            for c in 0..k {
                for i in 0..n {
                    let p = prob[[i, c]];
                    grad[i] = p - if target[i] == c { 1.0 } else { 0.0 };
                    hess[i] = (p * (1.0 - p)).max(MIN_HESSIAN);
                }
                let builder = TreeBuilder {
                    x,
                    binned: binned.as_ref(),
                    grad: &grad,
                    hess: &hess,
                    config,
                };
                let tree = builder.build((0..n).collect());
                for (f, g) in tree.split_gains() {
                    importance[f] += g;
                }
                for (i, row) in rows.iter().enumerate() {
                    margin[[i, c]] += tree.predict_row(row);
                }
                trees.push(tree);
            }
        }
        Ok(Self {
            format_version: MODEL_FORMAT_VERSION,
            library_version: crate::VERSION.to_string(),
            config: config.clone(),
            n_features: d,
            classes,
            base_score,
            trees,
            importance,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn n_rounds(&self) -> usize {
        self.trees.len() / self.n_classes()
    }

    /// Margins after the first `rounds` rounds.
    pub fn predict_margin_rounds(
        &self,
        x: ArrayView2<'_, f64>,
        rounds: usize,
    ) -> Result<Array2<f64>, GbdtError> {
        if x.ncols() != self.n_features {
            return Err(GbdtError::DimensionMismatch {
                expected: self.n_features,
                got: x.ncols(),
            });
        }
        let k = self.n_classes();
        let rounds = rounds.min(self.n_rounds());
        let mut out = Array2::from_shape_fn((x.nrows(), k), |(_, c)| self.base_score[c]);
        for (i, row) in x.rows().into_iter().enumerate() {
            let row = row.to_vec();
            for (t, tree) in self.trees[..rounds * k].iter().enumerate() {
                out[[i, t % k]] += tree.predict_row(&row);
            }
        }
        Ok(out)
    }

    pub fn predict_margin(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>, GbdtError> {
        self.predict_margin_rounds(x, self.n_rounds())
    }

    /// Class probabilities, one column per entry of `classes`; rows sum to 1.
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>, GbdtError> {
        let mut m = self.predict_margin(x)?;
        softmax_rows(&mut m);
        Ok(m)
    }

    /// Most probable class per row; ties go to the lowest class.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>, GbdtError> {
        let p = self.predict_margin(x)?;
        Ok(p.rows()
            .into_iter()
            .map(|r| {
                let mut best = 0;
                for (c, v) in r.iter().enumerate() {
                    if *v > r[best] {
                        best = c;
                    }
                }
                self.classes[best]
            })
            .collect())
    }

    /// Total split gain per feature.
    pub fn feature_importance(&self) -> &[f64] {
        &self.importance
    }

    pub fn to_json(&self) -> Result<String, GbdtError> {
        serde_json::to_string(self).map_err(|e| GbdtError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, GbdtError> {
        let model: Self =
            serde_json::from_str(text).map_err(|e| GbdtError::Format(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(GbdtError::Format(format!(
                "unsupported format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// Mean multiclass log-loss of probabilities `p` (columns in class order).
pub fn log_loss(p: &Array2<f64>, target: &[usize]) -> f64 {
    let n = target.len() as f64;
    target
        .iter()
        .enumerate()
        .map(|(i, &t)| -p[[i, t]].max(1e-300).ln())
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xor(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1.0..1.0));
        let y = x
            .rows()
            .into_iter()
            .map(|r| usize::from((r[0] > 0.0) != (r[1] > 0.0)))
            .collect();
        (x, y)
    }

    fn blobs(n: usize, d: usize, k: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % k).collect();
        let x = Array2::from_shape_fn((n, d), |(i, j)| {
            let centre = if j == 0 { y[i] as f64 } else { 0.0 };
            centre + rng.random_range(-0.8..0.8)
        });
        (x, y)
    }

    #[test]
    fn xor_is_learned_at_depth_two() {
        let (x, y) = xor(200, 1);
        let config = TrainConfig {
            rounds: 20,
            max_depth: 2,
            ..Default::default()
        };
        let m = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y);
        assert_eq!(m.trees.len(), 40);
        assert!(m.trees.iter().all(|t| t.depth() <= 2));
    }

    #[test]
    fn zero_rounds_on_balanced_data_is_uniform() {
        let (x, y) = blobs(60, 2, 3, 2);
        let config = TrainConfig {
            rounds: 0,
            ..Default::default()
        };
        let m = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
        let p = m.predict_proba(x.view()).unwrap();
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        assert!(m.feature_importance().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (x, y) = blobs(90, 3, 3, 3);
        let m = GbdtEnsemble::train(
            x.view(),
            &y,
            &TrainConfig {
                rounds: 10,
                ..Default::default()
            },
        )
        .unwrap();
        let p = m.predict_proba(x.view()).unwrap();
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn training_is_deterministic_and_round_trips() {
        let (x, y) = blobs(80, 4, 4, 4);
        let config = TrainConfig {
            rounds: 5,
            ..Default::default()
        };
        let a = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
        let b = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
        assert_eq!(a, b);
        let back = GbdtEnsemble::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(
            back.predict_proba(x.view()).unwrap(),
            a.predict_proba(x.view()).unwrap()
        );
    }

    #[test]
    fn errors() {
        let (x, y) = blobs(10, 2, 2, 5);
        let cfg = TrainConfig::default();
        assert!(matches!(
            GbdtEnsemble::train(x.view(), &[1; 10], &cfg),
            Err(GbdtError::SingleClass)
        ));
        assert!(matches!(
            GbdtEnsemble::train(x.slice(ndarray::s![0..1, ..]), &y[..1], &cfg),
            Err(GbdtError::EmptyData)
        ));
        let mut bad = x.clone();
        bad[[3, 1]] = f64::INFINITY;
        assert!(matches!(
            GbdtEnsemble::train(bad.view(), &y, &cfg),
            Err(GbdtError::NonFiniteLabelOrFeature { row: 3, feature: 1 })
        ));
        let mut missing = x.clone();
        missing[[3, 1]] = f64::NAN;
        assert!(GbdtEnsemble::train(missing.view(), &y, &cfg).is_ok());
        let m = GbdtEnsemble::train(
            x.view(),
            &y,
            &TrainConfig {
                rounds: 2,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert!(matches!(
            m.predict_proba(x.slice(ndarray::s![.., 0..1])),
            Err(GbdtError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(TrainConfig { n_bins: 1, ..cfg }.validate().is_err());
    }

    #[test]
    fn missing_values_learn_a_default_direction() {
        // class 1 lives at high x and at missing x
        let n = 120;
        let mut x = Array2::zeros((n, 1));
        let mut y = vec![0; n];
        for i in 0..n {
            match i % 3 {
                0 => x[[i, 0]] = -1.0 - (i as f64) / n as f64,
                1 => {
                    x[[i, 0]] = 1.0 + (i as f64) / n as f64;
                    y[i] = 1;
                }
                _ => {
                    x[[i, 0]] = f64::NAN;
                    y[i] = 1;
                }
            }
        }
        let config = TrainConfig {
            rounds: 1,
            max_depth: 1,
            ..Default::default()
        };
        let m = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
        let Node::Split {
            default_left,
            threshold,
            left,
            right,
            ..
        } = m.trees[1].nodes[0]
        else {
            panic!("expected a split");
        };
        assert!(!default_left);
        // a missing row follows the stored direction, checked against both routes
        let tree = &m.trees[1];
        let via_left = tree.nodes[left].clone();
        let via_right = tree.nodes[right].clone();
        let leaf = &tree.nodes[tree.leaf_index(&[f64::NAN])];
        assert_eq!(leaf, &via_right);
        assert_ne!(leaf, &via_left);
        assert_eq!(
            tree.predict_row(&[f64::NAN]),
            tree.predict_row(&[threshold + 1.0])
        );
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }

    #[test]
    fn importance_follows_informative_feature() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 500;
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Array2::from_shape_fn((n, 2), |(i, j)| {
            if j == 0 {
                y[i] as f64 + rng.random_range(-0.7..0.7)
            } else {
                rng.random_range(-1.0..1.0)
            }
        });
        let m = GbdtEnsemble::train(
            x.view(),
            &y,
            &TrainConfig {
                rounds: 10,
                ..Default::default()
            },
        )
        .unwrap();
        let imp = m.feature_importance();
        assert!(imp[0] > imp[1]);
        assert!(imp.iter().all(|v| *v >= 0.0));

        let single = x.slice(ndarray::s![.., 0..1]);
        let m = GbdtEnsemble::train(
            single,
            &y,
            &TrainConfig {
                rounds: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.feature_importance()[0] > 0.0);
    }

    #[test]
    fn training_loss_does_not_increase() {
        let (x, y) = blobs(150, 3, 3, 7);
        for eta in [0.1, 0.3, 1.0] {
            let config = TrainConfig {
                rounds: 15,
                eta,
                ..Default::default()
            };
            let m = GbdtEnsemble::train(x.view(), &y, &config).unwrap();
            let mut prev = f64::INFINITY;
            for r in 0..=15 {
                let mut p = m.predict_margin_rounds(x.view(), r).unwrap();
                softmax_rows(&mut p);
                let loss = log_loss(&p, &y);
                assert!(loss <= prev + 1e-12, "eta {eta} round {r}: {loss} > {prev}");
                prev = loss;
            }
        }
    }

    #[test]
    fn histogram_matches_exact_greedy_when_bins_cover_all_values() {
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(10..=64);
            let d = rng.random_range(1..=4);
            let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-5.0..5.0));
            let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            if y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let base = TrainConfig {
                rounds: 3,
                max_depth: 3,
                n_bins: 128,
                ..Default::default()
            };
            let hist = GbdtEnsemble::train(x.view(), &y, &base).unwrap();
            let exact = GbdtEnsemble::train(
                x.view(),
                &y,
                &TrainConfig {
                    method: SplitMethod::Exact,
                    ..base
                },
            )
            .unwrap();
            for (a, b) in hist.trees.iter().zip(&exact.trees) {
                assert_eq!(a.nodes.len(), b.nodes.len(), "seed {seed}");
                for (na, nb) in a.nodes.iter().zip(&b.nodes) {
                    match (na, nb) {
                        (Node::Leaf { weight: wa }, Node::Leaf { weight: wb }) => {
                            assert!((wa - wb).abs() < 1e-9)
                        }
                        (
                            Node::Split {
                                feature: fa,
                                gain: ga,
                                ..
                            },
                            Node::Split {
                                feature: fb,
                                gain: gb,
                                ..
                            },
                        ) => {
                            assert_eq!(fa, fb);
                            assert!((ga - gb).abs() < 1e-9 * ga.abs().max(1.0));
                        }
                        _ => panic!("structure differs (seed {seed})"),
                    }
                }
            }
            let pa = hist.predict_proba(x.view()).unwrap();
            let pb = exact.predict_proba(x.view()).unwrap();
            assert!((pa - pb).iter().all(|v| v.abs() < 1e-9));
        }
    }

    fn softmax_loss(logits: &[f64], target: usize) -> f64 {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = logits.iter().map(|v| (v - max).exp()).sum();
        -(logits[target] - max - s.ln())
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences(
            logits in proptest::collection::vec(-4.0f64..4.0, 2..7),
            t in 0usize..7,
        ) {
            let k = logits.len();
            let t = t % k;
            let mut m = Array2::from_shape_vec((1, k), logits.clone()).unwrap();
            softmax_rows(&mut m);
            for c in 0..k {
                let g = m[[0, c]] - if c == t { 1.0 } else { 0.0 };
                let eps = 1e-6;
                let mut up = logits.clone();
                up[c] += eps;
                let mut down = logits.clone();
                down[c] -= eps;
                let num = (softmax_loss(&up, t) - softmax_loss(&down, t)) / (2.0 * eps);
                prop_assert!((num - g).abs() <= 1e-6 * g.abs().max(1e-3), "{num} vs {g}");
            }
        }
    }
}
