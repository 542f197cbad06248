//! Confusion counts accumulated across iterations.

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn add(&mut self, y_true: &[usize], y_pred: &[usize]) -> Result<(), EvalError> {
        if y_true.len() != y_pred.len() {
            return Err(EvalError::LengthMismatch {
                expected: y_true.len(),
                got: y_pred.len(),
            });
        }
        let k = self.n_classes();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= k || p >= k {
                return Err(EvalError::LabelOutOfRange(t.max(p)));
            }
            self.counts[t][p] += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) {
        for (row, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, v) in row.iter_mut().zip(o) {
                *c += v;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// Pooled accuracy over everything accumulated.
    pub fn accuracy(&self) -> f64 {
        self.diagonal() as f64 / self.total() as f64
    }

    /// Each cell as a percentage of all accumulated test instances.
    pub fn percent(&self) -> Vec<Vec<f64>> {
        let total = self.total() as f64;
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| {
                        if total > 0.0 {
                            c as f64 * 100.0 / total
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Unordered class pair `(a, b)` with `a < b` whose combined off-diagonal
    /// count `counts[a][b] + counts[b][a]` is largest; the first pair wins ties.
    pub fn most_confused_pair(&self) -> Option<(usize, usize, u64)> {
        let k = self.n_classes();
        let mut best: Option<(usize, usize, u64)> = None;
        for a in 0..k {
            for b in a + 1..k {
                let v = self.counts[a][b] + self.counts[b][a];
                if best.is_none_or(|(_, _, m)| v > m) {
                    best = Some((a, b, v));
                }
            }
        }
        best
    }
}
