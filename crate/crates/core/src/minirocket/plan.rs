//! Dilation schedule: which dilations are used and how many features (biases)
//! each (kernel, dilation) pair contributes.

use serde::{Deserialize, Serialize};

use super::kernels::{KERNEL_LEN, N_KERNELS};
use super::MiniRocketError;

pub const DEFAULT_TARGET_FEATURES: usize = 9_996;
pub const MAX_DILATIONS_PER_KERNEL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// Zero padding of `4·dilation` on both sides; PPV over all `L` outputs.
    Same,
    /// PPV over the outputs that do not touch the padding.
    Valid,
}

/// One (dilation, kernel) slot of the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// `dilation_index · 84 + kernel_index`.
    pub index: usize,
    pub dilation_index: usize,
    pub kernel_index: usize,
    pub dilation: usize,
    pub padding: Padding,
    /// Offset of the first feature of this slot in the output vector.
    pub feature_offset: usize,
    pub n_features: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationPlan {
    pub input_length: usize,
    pub target_features: usize,
    pub dilations: Vec<usize>,
    pub features_per_dilation: Vec<usize>,
}

/// `n` points evenly spaced on `[start, stop]`; the last one is exactly `stop`.
fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let step = (stop - start) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
    out[n - 1] = stop;
    out
}

impl DilationPlan {
    pub fn new(input_length: usize, target_features: usize) -> Result<Self, MiniRocketError> {
        if input_length < KERNEL_LEN {
            return Err(MiniRocketError::InputTooShort {
                needed: KERNEL_LEN,
                got: input_length,
            });
        }
        if target_features < N_KERNELS {
            return Err(MiniRocketError::InvalidConfig(format!(
                "target_features must be at least {N_KERNELS}, got {target_features}"
            )));
        }
        let per_kernel = target_features / N_KERNELS;
        let n_dilations = per_kernel.min(MAX_DILATIONS_PER_KERNEL);
        let multiplier = per_kernel as f64 / n_dilations as f64;
        let max_exponent = ((input_length - 1) as f64 / (KERNEL_LEN - 1) as f64).log2();

        let mut dilations: Vec<usize> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for e in linspace(0.0, max_exponent, n_dilations) {
            let d = 2f64.powf(e) as usize;
            if dilations.last() == Some(&d) {
                *counts.last_mut().expect("non-empty") += 1;
            } else {
                dilations.push(d);
                counts.push(1);
            }
        }
        let mut features_per_dilation: Vec<usize> = counts
            .iter()
            .map(|&c| (c as f64 * multiplier) as usize)
            .collect();
        let mut remainder = per_kernel - features_per_dilation.iter().sum::<usize>();
        let mut i = 0;
        while remainder > 0 {
            features_per_dilation[i] += 1;
            remainder -= 1;
            i = (i + 1) % features_per_dilation.len();
        }
        Ok(Self {
            input_length,
            target_features,
            dilations,
            features_per_dilation,
        })
    }

    pub fn n_features(&self) -> usize {
        N_KERNELS * self.features_per_dilation.iter().sum::<usize>()
    }

    pub fn n_slots(&self) -> usize {
        N_KERNELS * self.dilations.len()
    }

    /// Padding alternates with `dilation_index + kernel_index`.
    pub fn padding(dilation_index: usize, kernel_index: usize) -> Padding {
        if (dilation_index % 2 + kernel_index).is_multiple_of(2) {
            Padding::Same
        } else {
            Padding::Valid
        }
    }

    /// Slots in output order: dilation-major, then kernel.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::with_capacity(self.n_slots());
        let mut offset = 0;
        for (di, (&dilation, &nf)) in self
            .dilations
            .iter()
            .zip(&self.features_per_dilation)
            .enumerate()
        {
            for ki in 0..N_KERNELS {
                out.push(Slot {
                    index: di * N_KERNELS + ki,
                    dilation_index: di,
                    kernel_index: ki,
                    dilation,
                    padding: Self::padding(di, ki),
                    feature_offset: offset,
                    n_features: nf,
                });
                offset += nf;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_length_plan() {
        let p = DilationPlan::new(128, DEFAULT_TARGET_FEATURES).unwrap();
        assert_eq!(p.dilations, (1..=15).collect::<Vec<_>>());
        assert_eq!(
            p.features_per_dilation,
            vec![30, 19, 12, 12, 8, 4, 8, 4, 4, 3, 3, 3, 3, 3, 3]
        );
        assert_eq!(p.n_features(), 9_996);
        assert!(p.dilations.iter().all(|&d| d <= (128 - 1) / 8));
    }

    #[test]
    fn feature_vector_length_plan() {
        let p = DilationPlan::new(561, DEFAULT_TARGET_FEATURES).unwrap();
        assert_eq!(
            p.dilations,
            vec![
                1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 13, 15, 17, 20, 23, 26, 30, 35, 40, 46, 53, 61, 70
            ]
        );
        assert_eq!(
            p.features_per_dilation,
            vec![23, 12, 8, 4, 8, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 3, 3]
        );
        assert_eq!(p.n_features(), 9_996);
        assert_eq!(*p.dilations.last().unwrap(), 70);
    }

    #[test]
    fn short_series_use_dilation_one() {
        for len in [9, 12, 16] {
            let p = DilationPlan::new(len, DEFAULT_TARGET_FEATURES).unwrap();
            assert_eq!(p.dilations, vec![1]);
            assert_eq!(p.features_per_dilation, vec![119]);
        }
    }

    #[test]
    fn rejects_short_input_and_tiny_target() {
        assert!(matches!(
            DilationPlan::new(8, 9_996),
            Err(MiniRocketError::InputTooShort { needed: 9, got: 8 })
        ));
        assert!(DilationPlan::new(128, 83).is_err());
        assert_eq!(DilationPlan::new(128, 84).unwrap().n_features(), 84);
    }

    #[test]
    fn padding_alternates_and_is_balanced() {
        let p = DilationPlan::new(128, DEFAULT_TARGET_FEATURES).unwrap();
        let slots = p.slots();
        let same = slots.iter().filter(|s| s.padding == Padding::Same).count();
        assert_eq!(slots.len(), 84 * 15);
        assert!(same.abs_diff(slots.len() - same) <= 1);
        assert_eq!(slots[0].padding, Padding::Same);
        assert_eq!(slots[1].padding, Padding::Valid);
        assert_eq!(slots[84].padding, Padding::Valid);
        let last = slots.last().unwrap();
        assert_eq!(last.feature_offset + last.n_features, p.n_features());
    }
}
