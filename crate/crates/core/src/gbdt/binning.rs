//! Per-feature bin edges computed once from the training data.
//!
//! A value `x` falls in bin `#{cuts ≤ x}`, so the split "bin ≤ b" is the same
//! as `x < cuts[b]`. Missing values (NaN) occupy a dedicated last bin.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBins {
    /// Strictly increasing cut points.
    pub cuts: Vec<f64>,
}

impl FeatureBins {
    /// Builds cuts from the finite values of one feature. With at most
    /// `max_value_bins` distinct values every midpoint is a cut; otherwise cuts
    /// sit at evenly spaced ranks.
    pub fn from_values(values: impl Iterator<Item = f64>, max_value_bins: usize) -> Self {
        let mut sorted: Vec<f64> = values.filter(|v| !v.is_nan()).collect();
        sorted.sort_unstable_by(f64::total_cmp);
        let mut distinct = sorted.clone();
        distinct.dedup();
        let mut cuts = Vec::new();
        if distinct.len() <= max_value_bins {
            cuts.extend(distinct.windows(2).map(|w| midpoint(w[0], w[1])));
        } else {
            let m = sorted.len();
            for b in 1..max_value_bins {
                let idx = b * m / max_value_bins;
                let (lo, hi) = (sorted[idx - 1], sorted[idx]);
                if lo < hi {
                    let c = midpoint(lo, hi);
                    if cuts.last().is_none_or(|&last| c > last) {
                        cuts.push(c);
                    }
                }
            }
        }
        Self { cuts }
    }

    /// Value bins plus the missing bin.
    pub fn n_bins(&self) -> usize {
        self.cuts.len() + 2
    }

    pub fn missing_bin(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn bin(&self, x: f64) -> usize {
        if x.is_nan() {
            self.missing_bin()
        } else {
            self.cuts.partition_point(|&c| c <= x)
        }
    }
}

/// Midpoint that stays strictly inside `(lo, hi]` even for adjacent floats.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m > lo {
        m
    } else {
        hi
    }
}

/// Feature-major bin indices of a training matrix.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    pub features: Vec<FeatureBins>,
    /// `columns[f][i]` is the bin of sample `i` on feature `f`.
    pub columns: Vec<Vec<u16>>,
}

impl BinnedMatrix {
    pub fn new(x: ArrayView2<'_, f64>, n_bins: usize) -> Self {
        let max_value_bins = (n_bins - 1).clamp(1, u16::MAX as usize - 1);
        let (features, columns) = (0..x.ncols())
            .into_par_iter()
            .map(|f| {
                let col = x.column(f);
                let bins = FeatureBins::from_values(col.iter().copied(), max_value_bins);
                let idx = col.iter().map(|&v| bins.bin(v) as u16).collect();
                (bins, idx)
            })
            .unzip();
        Self { features, columns }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    #[test]
    fn few_distinct_values_use_midpoints() {
        let b = FeatureBins::from_values([3.0, 1.0, 2.0, 1.0, f64::NAN].into_iter(), 255);
        assert_eq!(b.cuts, vec![1.5, 2.5]);
        assert_eq!(b.bin(1.0), 0);
        assert_eq!(b.bin(1.5), 1);
        assert_eq!(b.bin(2.0), 1);
        assert_eq!(b.bin(9.0), 2);
        assert_eq!(b.bin(f64::NAN), 3);
        assert_eq!(b.n_bins(), 4);
    }

    #[test]
    fn many_values_are_capped() {
        let b = FeatureBins::from_values((0..1000).map(|i| i as f64), 15);
        assert!(b.cuts.len() <= 14);
        assert!(b.cuts.windows(2).all(|w| w[0] < w[1]));
        let counts = (0..1000).fold(vec![0; 16], |mut acc, i| {
            acc[b.bin(i as f64)] += 1;
            acc
        });
        assert!(
            counts.iter().take(15).all(|&c| (60..=75).contains(&c)),
            "{counts:?}"
        );
    }

    #[test]
    fn constant_feature_has_one_value_bin() {
        let b = FeatureBins::from_values([4.0; 5].into_iter(), 255);
        assert!(b.cuts.is_empty());
        assert_eq!(b.bin(4.0), 0);
    }

    proptest! {
        #[test]
        fn bin_order_matches_threshold_rule(
            values in proptest::collection::vec(-100.0f64..100.0, 1..200),
            probe in -120.0f64..120.0,
            max_bins in 2usize..40,
        ) {
            let b = FeatureBins::from_values(values.iter().copied(), max_bins);
            let k = b.bin(probe);
            for (i, &c) in b.cuts.iter().enumerate() {
                prop_assert_eq!(k <= i, probe < c);
            }
            prop_assert!(b.cuts.len() < max_bins.max(2));
        }
    }
}
