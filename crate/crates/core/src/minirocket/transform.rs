//! Dilated convolution, quantile bias fitting and PPV pooling.
//!
//! The convolution of kernel `w` with dilation `d` at output `t` is
//! `Σ_k w_k · x[t + (k − 4)·d]` with zeros outside the series. Since every
//! weight is −1 or +2, it equals `−Σ_k s_k + 3·(s_a + s_b + s_c)` where `s_k`
//! is the series shifted by `(k − 4)·d` and `a, b, c` are the +2 positions.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{KernelSet, KERNEL_LEN};
use super::plan::{DilationPlan, Padding, Slot};
use super::MiniRocketError;
use crate::signal::stats::quantile_sorted;

const HALF: usize = KERNEL_LEN / 2;

/// `(√5 − 1) / 2`, the fractional part of the golden ratio.
const PHI: f64 = 0.618_033_988_749_894_9;

/// Low-discrepancy quantile used for global feature index `j`.
pub fn quantile_for(feature_index: usize) -> f64 {
    ((feature_index + 1) as f64 * PHI).fract()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasTable {
    pub biases: Vec<f64>,
    pub fit_seed: u64,
    /// Training instances available when sampling.
    pub sample_size: usize,
}

/// The nine shifted copies of one series at one dilation, plus `−Σ_k s_k`.
struct Shifted {
    rows: Vec<f64>,
    alpha: Vec<f64>,
    len: usize,
}

impl Shifted {
    fn new(x: ArrayView1<'_, f64>, dilation: usize) -> Self {
        let len = x.len();
        let mut rows = vec![0.0; KERNEL_LEN * len];
        let mut alpha = vec![0.0; len];
        for k in 0..KERNEL_LEN {
            let row = &mut rows[k * len..(k + 1) * len];
            let offset = (k as isize - HALF as isize) * dilation as isize;
            for (t, slot) in row.iter_mut().enumerate() {
                let src = t as isize + offset;
                if (0..len as isize).contains(&src) {
                    *slot = x[src as usize];
                }
            }
            for (a, v) in alpha.iter_mut().zip(row.iter()) {
                *a -= v;
            }
        }
        Self { rows, alpha, len }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.len..(k + 1) * self.len]
    }

    /// Full same-padded convolution output of kernel `[a, b, c]` into `out`.
    fn convolve(&self, [a, b, c]: [usize; 3], out: &mut [f64]) {
        let (ra, rb, rc) = (self.row(a), self.row(b), self.row(c));
        for t in 0..self.len {
            out[t] = self.alpha[t] + 3.0 * (ra[t] + rb[t] + rc[t]);
        }
    }
}

/// Output range pooled by a slot.
fn pooled(c: &[f64], padding: Padding, dilation: usize) -> &[f64] {
    match padding {
        Padding::Same => c,
        Padding::Valid => {
            let pad = HALF * dilation;
            &c[pad..c.len() - pad]
        }
    }
}

/// Proportion of strictly positive values `c > bias`.
pub fn ppv(c: &[f64], bias: f64) -> f64 {
    let hits = c.iter().filter(|&&v| v > bias).count();
    hits as f64 / c.len() as f64
}

fn check_length(x: &ArrayView2<'_, f64>, plan: &DilationPlan) -> Result<(), MiniRocketError> {
    if x.ncols() != plan.input_length {
        return Err(MiniRocketError::LengthMismatch {
            expected: plan.input_length,
            got: x.ncols(),
        });
    }
    Ok(())
}

/// Instance sampled for a slot: a ChaCha8 stream keyed by `(seed, slot)`.
fn sampled_instance(seed: u64, slot: usize, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(slot as u64);
    rng.random_range(0..n)
}

pub fn fit_biases(
    x: ArrayView2<'_, f64>,
    plan: &DilationPlan,
    kernels: &KernelSet,
    seed: u64,
) -> Result<BiasTable, MiniRocketError> {
    if x.nrows() == 0 {
        return Err(MiniRocketError::EmptyTrainingSet);
    }
    check_length(&x, plan)?;
    let n = x.nrows();
    let slots = plan.slots();
    let per_slot: Vec<Vec<f64>> = slots
        .par_iter()
        .map(|slot| {
            let row = x.row(sampled_instance(seed, slot.index, n));
            let shifted = Shifted::new(row, slot.dilation);
            let mut c = vec![0.0; plan.input_length];
            shifted.convolve(kernels.indices()[slot.kernel_index], &mut c);
            c.sort_unstable_by(f64::total_cmp);
            (0..slot.n_features)
                .map(|f| quantile_sorted(&c, quantile_for(slot.feature_offset + f)))
                .collect()
        })
        .collect();
    Ok(BiasTable {
        biases: per_slot.into_iter().flatten().collect(),
        fit_seed: seed,
        sample_size: n,
    })
}

/// PPV features of one series, written into `out` (length `plan.n_features()`).
fn transform_one(
    x: ArrayView1<'_, f64>,
    plan: &DilationPlan,
    kernels: &KernelSet,
    slots: &[Slot],
    biases: &[f64],
    out: &mut [f32],
) {
    let mut c = vec![0.0; plan.input_length];
    for (di, &dilation) in plan.dilations.iter().enumerate() {
        let shifted = Shifted::new(x, dilation);
        for slot in slots.iter().filter(|s| s.dilation_index == di) {
            shifted.convolve(kernels.indices()[slot.kernel_index], &mut c);
            let region = pooled(&c, slot.padding, dilation);
            for f in 0..slot.n_features {
                let j = slot.feature_offset + f;
                out[j] = ppv(region, biases[j]) as f32;
            }
        }
    }
}

/// `n × F` PPV matrix. Values lie in `[0, 1]`; rows are computed in parallel
/// and each row is independent of the thread count.
pub fn transform(
    x: ArrayView2<'_, f64>,
    plan: &DilationPlan,
    kernels: &KernelSet,
    table: &BiasTable,
) -> Result<Array2<f32>, MiniRocketError> {
    check_length(&x, plan)?;
    let f = plan.n_features();
    if table.biases.len() != f {
        return Err(MiniRocketError::LengthMismatch {
            expected: f,
            got: table.biases.len(),
        });
    }
    let slots = plan.slots();
    let mut out = Array2::<f32>::zeros((x.nrows(), f));
    out.as_slice_mut()
        .expect("standard layout")
        .par_chunks_mut(f)
        .enumerate()
        .for_each(|(i, row)| transform_one(x.row(i), plan, kernels, &slots, &table.biases, row));
    Ok(out)
}
