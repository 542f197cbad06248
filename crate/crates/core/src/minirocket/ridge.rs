//! One-vs-rest ridge classifier with leave-one-out selection of the penalty.
//!
//! Features are standardized with training statistics and targets are ±1 per
//! class, centered so the intercept is the target mean. With `Z` the
//! standardized design (`n × p`) and `Yc` the centered targets, a single
//! symmetric eigendecomposition serves every penalty on the grid:
//!
//! - `n ≤ p`: `Z Zᵀ = Q S Qᵀ`, `W = Zᵀ Q (S + λ)⁻¹ Qᵀ Yc`,
//!   `h_ii = 1/n + Σ_j Q_ij² s_j / (s_j + λ)`.
//! - `n > p`: `Zᵀ Z = V S Vᵀ`, `U = Z V`, `W = V (S + λ)⁻¹ Uᵀ Yc`,
//!   `h_ii = 1/n + Σ_j U_ij² / (s_j + λ)`.
//!
//! The leave-one-out residual is `r_i / (1 − h_ii)`.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::MiniRocketError;

/// Ten geometric points from `1e-3` to `1e3`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..10)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeHead {
    /// Sorted class labels; score column `k` belongs to `classes[k]`.
    pub classes: Vec<usize>,
    /// Input columns used, in order.
    pub kept: Vec<usize>,
    /// Input columns dropped for zero training variance.
    pub dropped: Vec<usize>,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// `classes × kept`, row-major.
    pub weights: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub lambda: f64,
    /// Mean squared leave-one-out error for every grid point.
    pub loo_errors: Vec<f64>,
}

pub(crate) struct Standardized {
    pub z: Mat<f64>,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

pub(crate) fn standardize(x: ArrayView2<'_, f32>) -> Result<Standardized, MiniRocketError> {
    let (n, p) = x.dim();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut mean = Vec::new();
    let mut scale = Vec::new();
    for j in 0..p {
        let col = x.column(j);
        let m = col.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
        let var = col.iter().map(|&v| (v as f64 - m).powi(2)).sum::<f64>() / n as f64;
        if var > 0.0 {
            kept.push(j);
            mean.push(m);
            scale.push(var.sqrt());
        } else {
            dropped.push(j);
        }
    }
    if kept.is_empty() {
        return Err(MiniRocketError::DegenerateFeatures);
    }
    let z = Mat::from_fn(n, kept.len(), |i, k| {
        (x[[i, kept[k]]] as f64 - mean[k]) / scale[k]
    });
    Ok(Standardized {
        z,
        kept,
        dropped,
        mean,
        scale,
    })
}

fn gram(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, 1.0, Par::Seq);
    out
}

/// Eigenvalues (clamped at 0) and eigenvectors of a symmetric matrix.
fn eigh(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>), MiniRocketError> {
    let n = a.nrows();
    let mut s = Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let mut buf = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        Par::Seq,
        Default::default(),
    ));
    self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| MiniRocketError::Numerical(format!("{e:?}")))?;
    let values = (0..n).map(|i| s.column_vector()[i].max(0.0)).collect();
    Ok((values, u))
}

/// Closed-form ridge over a prepared design. `yc` is `n × k`, centered.
pub(crate) struct RidgeSolver {
    n: usize,
    /// Eigenvalues shared by both branches.
    s: Vec<f64>,
    /// `Q` (dual) or `U = Z V` (primal), `n × r`.
    basis: Mat<f64>,
    /// `V` for the primal branch.
    v: Option<Mat<f64>>,
    /// `basisᵀ Yc`, `r × k`.
    proj: Mat<f64>,
    yc: Mat<f64>,
}

impl RidgeSolver {
    pub fn new(z: MatRef<'_, f64>, yc: MatRef<'_, f64>) -> Result<Self, MiniRocketError> {
        let (n, p) = (z.nrows(), z.ncols());
        let (s, basis, v) = if n <= p {
            let g = gram(z, z.transpose());
            let (s, q) = eigh(g.as_ref())?;
            (s, q, None)
        } else {
            let g = gram(z.transpose(), z);
            let (s, v) = eigh(g.as_ref())?;
            let u = gram(z, v.as_ref());
            (s, u, Some(v))
        };
        let proj = gram(basis.transpose(), yc);
        Ok(Self {
            n,
            s,
            basis,
            v,
            proj,
            yc: yc.to_owned(),
        })
    }

    /// Mean squared leave-one-out residual over every entry of `Yc`.
    pub fn loo_error(&self, lambda: f64) -> f64 {
        let k = self.yc.ncols();
        let r = self.s.len();
        let dual = self.v.is_none();
        // fitted = basis · diag(f) · proj
        let f: Vec<f64> = self
            .s
            .iter()
            .map(|&s| {
                if dual {
                    s / (s + lambda)
                } else {
                    1.0 / (s + lambda)
                }
            })
            .collect();
        let mut h = vec![1.0 / self.n as f64; self.n];
        let mut fitted = vec![0.0; self.n * k];
        #[allow(clippy::needless_range_loop)]
        for j in 0..r {
            let col = self.basis.col(j);
            for i in 0..self.n {
                let b = col[i];
                h[i] += b * b * f[j];
                for c in 0..k {
                    fitted[i * k + c] += b * f[j] * self.proj[(j, c)];
                }
            }
        }
        let mut total = 0.0;
        for i in 0..self.n {
            let denom = 1.0 - h[i];
            for c in 0..k {
                let resid = self.yc[(i, c)] - fitted[i * k + c];
                total += if denom > 1e-12 {
                    (resid / denom).powi(2)
                } else {
                    f64::INFINITY
                };
            }
        }
        total / (self.n * k) as f64
    }

    /// Weights `p × k` for one penalty.
    pub fn weights(&self, z: MatRef<'_, f64>, lambda: f64) -> Mat<f64> {
        let k = self.yc.ncols();
        let scaled = Mat::from_fn(self.s.len(), k, |j, c| {
            self.proj[(j, c)] / (self.s[j] + lambda)
        });
        match &self.v {
            None => {
                let inner = gram(self.basis.as_ref(), scaled.as_ref());
                gram(z.transpose(), inner.as_ref())
            }
            Some(v) => gram(v.as_ref(), scaled.as_ref()),
        }
    }
}

impl RidgeHead {
    /// Fits on `x` (`n × p`) and labels `y`, choosing the penalty from `grid`
    /// by leave-one-out error; ties go to the earlier grid point.
    pub fn fit(x: ArrayView2<'_, f32>, y: &[usize], grid: &[f64]) -> Result<Self, MiniRocketError> {
        let n = x.nrows();
        if n == 0 {
            return Err(MiniRocketError::EmptyTrainingSet);
        }
        if y.len() != n {
            return Err(MiniRocketError::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(MiniRocketError::InvalidConfig(
                "lambda grid must be non-empty and positive".into(),
            ));
        }
        let mut classes: Vec<usize> = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(MiniRocketError::SingleClass);
        }
        let std = standardize(x)?;
        let k = classes.len();
        let targets = Mat::from_fn(n, k, |i, c| if y[i] == classes[c] { 1.0 } else { -1.0 });
        let intercepts: Vec<f64> = (0..k)
            .map(|c| (0..n).map(|i| targets[(i, c)]).sum::<f64>() / n as f64)
            .collect();
        let yc = Mat::from_fn(n, k, |i, c| targets[(i, c)] - intercepts[c]);

        let solver = RidgeSolver::new(std.z.as_ref(), yc.as_ref())?;
        let loo_errors: Vec<f64> = grid.iter().map(|&l| solver.loo_error(l)).collect();
        let mut best = 0;
        for (i, e) in loo_errors.iter().enumerate() {
            if *e < loo_errors[best] {
                best = i;
            }
        }
        let lambda = grid[best];
        let w = solver.weights(std.z.as_ref(), lambda);
        let p = std.kept.len();
        let weights = (0..k)
            .flat_map(|c| (0..p).map(move |j| (c, j)))
            .map(|(c, j)| w[(j, c)])
            .collect();
        Ok(Self {
            classes,
            kept: std.kept,
            dropped: std.dropped,
            mean: std.mean,
            scale: std.scale,
            weights,
            intercepts,
            lambda,
            loo_errors,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.kept.len() + self.dropped.len()
    }

    /// Raw decision values, `n × classes`.
    pub fn decision_function(
        &self,
        x: ArrayView2<'_, f32>,
    ) -> Result<Array2<f64>, MiniRocketError> {
        if x.ncols() != self.n_inputs() {
            return Err(MiniRocketError::LengthMismatch {
                expected: self.n_inputs(),
                got: x.ncols(),
            });
        }
        let p = self.kept.len();
        let k = self.classes.len();
        let mut out = Array2::zeros((x.nrows(), k));
        let mut z = vec![0.0; p];
        for (i, row) in x.rows().into_iter().enumerate() {
            for (j, &col) in self.kept.iter().enumerate() {
                z[j] = (row[col] as f64 - self.mean[j]) / self.scale[j];
            }
            for c in 0..k {
                let w = &self.weights[c * p..(c + 1) * p];
                out[[i, c]] =
                    self.intercepts[c] + w.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        Ok(out)
    }

    /// Argmax class label per row; ties go to the lowest class.
    pub fn predict(&self, x: ArrayView2<'_, f32>) -> Result<Vec<usize>, MiniRocketError> {
        let scores = self.decision_function(x)?;
        Ok(argmax_rows(&scores, &self.classes))
    }
}

pub(crate) fn argmax_rows(scores: &Array2<f64>, classes: &[usize]) -> Vec<usize> {
    scores
        .rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            for (c, v) in r.iter().enumerate() {
                if *v > r[best] {
                    best = c;
                }
            }
            classes[best]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn mat(rows: usize, cols: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    /// Minimizes `‖Yc − Z W‖² + λ‖W‖²` by gradient descent to convergence.
    fn gd_ridge(z: &Mat<f64>, yc: &Mat<f64>, lambda: f64) -> Vec<Vec<f64>> {
        let (n, p) = (z.nrows(), z.ncols());
        let k = yc.ncols();
        let mut w = vec![vec![0.0; p]; k];
        let step = 1e-2;
        for _ in 0..200_000 {
            let mut max_g: f64 = 0.0;
            for c in 0..k {
                let mut grad = vec![0.0; p];
                for i in 0..n {
                    let mut pred = 0.0;
                    for j in 0..p {
                        pred += z[(i, j)] * w[c][j];
                    }
                    let r = pred - yc[(i, c)];
                    for j in 0..p {
                        grad[j] += 2.0 * r * z[(i, j)];
                    }
                }
                for j in 0..p {
                    grad[j] += 2.0 * lambda * w[c][j];
                    w[c][j] -= step * grad[j];
                    max_g = max_g.max(grad[j].abs());
                }
            }
            if max_g < 1e-13 {
                break;
            }
        }
        w
    }

    #[test]
    fn closed_form_matches_gradient_descent() {
        for (n, p) in [(20, 5), (5, 20)] {
            let z = mat(n, p, 1);
            let yc = mat(n, 2, 2);
            let lambda = 0.7;
            let solver = RidgeSolver::new(z.as_ref(), yc.as_ref()).unwrap();
            let w = solver.weights(z.as_ref(), lambda);
            let oracle = gd_ridge(&z, &yc, lambda);
            for c in 0..2 {
                for j in 0..p {
                    let d = (w[(j, c)] - oracle[c][j]).abs();
                    assert!(d < 1e-8, "n={n} p={p} |dw|={d}");
                }
            }
        }
    }

    #[test]
    fn loo_matches_explicit_refits() {
        for (n, p) in [(12, 4), (6, 10)] {
            let z0 = mat(n, p, 3);
            let y0 = mat(n, 1, 4);
            let lambda = 0.5;
            // the closed form assumes centering inside every fold
            let center = |m: &Mat<f64>, rows: &[usize]| -> (Mat<f64>, Vec<f64>) {
                let means: Vec<f64> = (0..m.ncols())
                    .map(|j| rows.iter().map(|&i| m[(i, j)]).sum::<f64>() / rows.len() as f64)
                    .collect();
                (
                    Mat::from_fn(rows.len(), m.ncols(), |r, j| m[(rows[r], j)] - means[j]),
                    means,
                )
            };
            let all: Vec<usize> = (0..n).collect();
            let (z, _) = center(&z0, &all);
            let (yc, _) = center(&y0, &all);
            let solver = RidgeSolver::new(z.as_ref(), yc.as_ref()).unwrap();
            let fast = solver.loo_error(lambda);

            let mut slow = 0.0;
            for held in 0..n {
                let rows: Vec<usize> = all.iter().copied().filter(|&i| i != held).collect();
                let (zt, zm) = center(&z0, &rows);
                let (yt, ym) = center(&y0, &rows);
                let s = RidgeSolver::new(zt.as_ref(), yt.as_ref()).unwrap();
                let w = s.weights(zt.as_ref(), lambda);
                let mut pred = ym[0];
                for j in 0..p {
                    pred += (z0[(held, j)] - zm[j]) * w[(j, 0)];
                }
                slow += (y0[(held, 0)] - pred).powi(2);
            }
            slow /= n as f64;
            assert!(
                (fast - slow).abs() < 1e-9 * slow.max(1.0),
                "n={n} {fast} vs {slow}"
            );
        }
    }

    fn blobs(n: usize, d: usize, seed: u64) -> (Array2<f32>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Array2::from_shape_fn((n, d), |(i, _)| {
            let centre = if y[i] == 0 { -3.0 } else { 3.0 };
            (centre + normal.sample(&mut rng)) as f32
        });
        (x, y)
    }

    #[test]
    fn separable_blobs_are_fit_exactly() {
        let (x, y) = blobs(200, 10, 5);
        let head = RidgeHead::fit(x.view(), &y, &default_lambda_grid()).unwrap();
        assert_eq!(head.predict(x.view()).unwrap(), y);
        assert_eq!(head.loo_errors.len(), 10);
    }

    #[test]
    fn single_class_and_degenerate_inputs() {
        let x = Array2::<f32>::ones((5, 3));
        assert!(matches!(
            RidgeHead::fit(x.view(), &[1; 5], &default_lambda_grid()),
            Err(MiniRocketError::SingleClass)
        ));
        assert!(matches!(
            RidgeHead::fit(x.view(), &[0, 1, 0, 1, 0], &default_lambda_grid()),
            Err(MiniRocketError::DegenerateFeatures)
        ));
    }

    #[test]
    fn zero_variance_columns_are_dropped_and_recorded() {
        let (mut x, y) = blobs(40, 4, 6);
        x.column_mut(2).fill(0.25);
        let head = RidgeHead::fit(x.view(), &y, &default_lambda_grid()).unwrap();
        assert_eq!(head.dropped, vec![2]);
        assert_eq!(head.kept, vec![0, 1, 3]);
        assert_eq!(head.decision_function(x.view()).unwrap().dim(), (40, 2));
    }

    #[test]
    fn grid_is_geometric() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[9] - 1e3).abs() < 1e-9);
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-9);
        }
    }
}
