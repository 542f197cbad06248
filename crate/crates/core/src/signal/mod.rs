//! Inertial signal processing and the handcrafted feature catalog.

mod catalog;
pub mod filter;
pub mod spectrum;
pub mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    compute_feature_matrix, compute_feature_vector, AngleKind, CatalogEntry, Component,
    DecisionConstants, Domain, FeatureCatalog, Source, Variable, VariableKind,
};
pub use filter::{
    butterworth_lowpass, butterworth_lowpass_with, jerk, magnitude, median_filter,
    split_gravity_body, Butterworth, FilterSpec, Phase, Triaxial,
};
pub use spectrum::{
    bands_energy, real_fft_magnitudes, spectral_features, SpectralFeatures, Spectrum,
};
pub use stats::{
    angle, basic_stats, burg, burg_ar_coefficients, correlation, sma, BasicStats, BurgFit,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("median window {window} must be odd, >= 3 and no longer than the series ({len:?})")]
    BadWindow { window: usize, len: Option<usize> },
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("input series have different lengths")]
    LengthMismatch,
    #[error("expected length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("zero-length vector has no direction")]
    ZeroVector,
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
}

/// Fixed-width sliding window: 2.56 s at 50 Hz with 50% overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length_samples: usize,
    pub overlap_samples: usize,
    pub sample_rate_hz: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            length_samples: 128,
            overlap_samples: 64,
            sample_rate_hz: 50.0,
        }
    }
}

impl WindowSpec {
    pub fn duration_s(&self) -> f64 {
        self.length_samples as f64 / self.sample_rate_hz
    }

    pub fn step(&self) -> usize {
        self.length_samples - self.overlap_samples
    }

    /// Start offsets of every complete window in a recording of `len` samples.
    pub fn starts(&self, len: usize) -> impl Iterator<Item = usize> + '_ {
        let step = self.step().max(1);
        let last = len.checked_sub(self.length_samples);
        (0..)
            .map(move |i| i * step)
            .take_while(move |s| last.is_some_and(|l| *s <= l))
    }

    /// Cuts a continuous recording into windows.
    pub fn windows<'a>(&'a self, signal: &'a [f64]) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.starts(signal.len())
            .map(move |s| &signal[s..s + self.length_samples])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_is_two_point_five_six_seconds() {
        let w = WindowSpec::default();
        assert_eq!(w.duration_s(), 2.56);
        assert_eq!(w.overlap_samples * 2, w.length_samples);
    }

    #[test]
    fn windows_overlap_by_half() {
        let w = WindowSpec::default();
        let signal: Vec<f64> = (0..320).map(|i| i as f64).collect();
        let starts: Vec<usize> = w.starts(signal.len()).collect();
        assert_eq!(starts, vec![0, 64, 128, 192]);
        let windows: Vec<&[f64]> = w.windows(&signal).collect();
        assert_eq!(windows[1][0], 64.0);
        assert!(windows.iter().all(|w| w.len() == 128));
        assert_eq!(w.starts(100).count(), 0);
    }
}
