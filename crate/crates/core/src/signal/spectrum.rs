//! Frequency-domain view of a 128-sample window.
//!
//! The magnitude spectrum keeps bins `1..=64` of the 128-point DFT: the DC
//! term is dropped (it duplicates the time-domain mean) and the Nyquist bin is
//! kept. Bin `k` sits at `k · fs / 128` Hz.

use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::SignalError;

pub const FFT_LEN: usize = 128;
pub const SPECTRUM_BINS: usize = FFT_LEN / 2;

/// Band edges (inclusive, 1-based bins) used by the band-energy features.
pub const BANDS: [(usize, usize); 14] = [
    (1, 8),
    (9, 16),
    (17, 24),
    (25, 32),
    (33, 40),
    (41, 48),
    (49, 56),
    (57, 64),
    (1, 16),
    (17, 32),
    (33, 48),
    (49, 64),
    (1, 24),
    (25, 48),
];

fn fft128() -> &'static Arc<dyn Fft<f64>> {
    static PLAN: OnceLock<Arc<dyn Fft<f64>>> = OnceLock::new();
    PLAN.get_or_init(|| FftPlanner::new().plan_fft_forward(FFT_LEN))
}

/// Magnitudes of bins `1..=n`; bin `k` is stored at index `k - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn from_magnitudes(magnitudes: Vec<f64>) -> Self {
        Self { magnitudes }
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Magnitude of 1-based bin `k`.
    pub fn bin(&self, k: usize) -> f64 {
        self.magnitudes[k - 1]
    }

    /// Centre frequency of bin `k` for a `2·len`-point transform.
    pub fn frequency_hz(&self, k: usize, sample_rate_hz: f64) -> f64 {
        k as f64 * sample_rate_hz / (2 * self.magnitudes.len()) as f64
    }
}

/// Full complex 128-point DFT.
pub fn fft_full(window: &[f64]) -> Result<Vec<Complex64>, SignalError> {
    if window.len() != FFT_LEN {
        return Err(SignalError::BadLength {
            expected: FFT_LEN,
            got: window.len(),
        });
    }
    let mut buf: Vec<Complex64> = window.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft128().process(&mut buf);
    Ok(buf)
}

pub fn real_fft_magnitudes(window: &[f64]) -> Result<Spectrum, SignalError> {
    let full = fft_full(window)?;
    Ok(Spectrum {
        magnitudes: full[1..=SPECTRUM_BINS].iter().map(|c| c.norm()).collect(),
    })
}

/// Zero-pads (or truncates) to 128 samples before transforming. Jerk signals
/// are one sample short of a full window.
pub fn padded_fft_magnitudes(x: &[f64]) -> Spectrum {
    let mut w = [0.0; FFT_LEN];
    let n = x.len().min(FFT_LEN);
    w[..n].copy_from_slice(&x[..n]);
    real_fft_magnitudes(&w).expect("fixed length")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeatures {
    /// 1-based bin of the largest magnitude; ties go to the lowest bin.
    pub max_bin: usize,
    /// `max_bin / len`, in `(0, 1]`.
    pub max_inds: f64,
    /// Magnitude-weighted mean frequency in Hz.
    pub mean_freq: f64,
    /// Set for an all-zero spectrum; `mean_freq` is then 0.
    pub degenerate: bool,
}

pub fn spectral_features(
    spectrum: &Spectrum,
    sample_rate_hz: f64,
) -> Result<SpectralFeatures, SignalError> {
    if spectrum.is_empty() {
        return Err(SignalError::BadLength {
            expected: SPECTRUM_BINS,
            got: 0,
        });
    }
    let mags = spectrum.magnitudes();
    let mut max_bin = 1;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[max_bin - 1] {
            max_bin = i + 1;
        }
    }
    let total: f64 = mags.iter().sum();
    let (mean_freq, degenerate) = if total == 0.0 {
        (0.0, true)
    } else {
        let weighted: f64 = mags
            .iter()
            .enumerate()
            .map(|(i, m)| spectrum.frequency_hz(i + 1, sample_rate_hz) * m)
            .sum();
        (weighted / total, false)
    };
    Ok(SpectralFeatures {
        max_bin,
        max_inds: max_bin as f64 / mags.len() as f64,
        mean_freq,
        degenerate,
    })
}

/// Mean squared magnitude over each band in [`BANDS`].
pub fn bands_energy(spectrum: &Spectrum) -> Result<[f64; 14], SignalError> {
    if spectrum.len() != SPECTRUM_BINS {
        return Err(SignalError::BadLength {
            expected: SPECTRUM_BINS,
            got: spectrum.len(),
        });
    }
    let mut out = [0.0; 14];
    for (slot, &(lo, hi)) in out.iter_mut().zip(BANDS.iter()) {
        let sum: f64 = (lo..=hi).map(|k| spectrum.bin(k).powi(2)).sum();
        *slot = sum / (hi - lo + 1) as f64;
    }
    Ok(out)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// O(N²) DFT, independent of the FFT path.
    fn direct_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, &v)| {
                        let phi = -2.0 * PI * (k * t) as f64 / n as f64;
                        Complex64::new(v * phi.cos(), v * phi.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn cosine_at_bin_five_is_a_single_peak() {
        let x: Vec<f64> = (0..128)
            .map(|t| (2.0 * PI * 5.0 * t as f64 / 128.0).cos())
            .collect();
        let s = real_fft_magnitudes(&x).unwrap();
        assert_eq!(s.len(), 64);
        assert!((s.bin(5) - 64.0).abs() < 1e-9);
        for k in (1..=64).filter(|&k| k != 5) {
            assert!(s.bin(k) < 1e-9, "bin {k} = {}", s.bin(k));
        }
        assert_eq!(spectral_features(&s, 50.0).unwrap().max_bin, 5);
    }

    #[test]
    fn zeros_give_zero_spectrum() {
        let s = real_fft_magnitudes(&[0.0; 128]).unwrap();
        assert!(s.magnitudes().iter().all(|m| *m == 0.0));
        let f = spectral_features(&s, 50.0).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.mean_freq, 0.0);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(matches!(
            real_fft_magnitudes(&[0.0; 127]),
            Err(SignalError::BadLength {
                expected: 128,
                got: 127
            })
        ));
    }

    #[test]
    fn fft_matches_direct_dft_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fast = fft_full(&x).unwrap();
            let slow = direct_dft(&x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-9);
            }
            let time: f64 = x.iter().map(|v| v * v).sum();
            let freq: f64 = fast.iter().map(|c| c.norm_sqr()).sum::<f64>() / 128.0;
            assert!(((time - freq) / time).abs() < 1e-9);
            let mags = real_fft_magnitudes(&x).unwrap();
            for k in 1..=64 {
                assert!((mags.bin(k) - slow[k].norm()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_bin_spectral_features() {
        let mut m = vec![0.0; 64];
        m[4] = 3.0;
        let f = spectral_features(&Spectrum::from_magnitudes(m), 50.0).unwrap();
        assert_eq!(f.max_bin, 5);
        assert_eq!(f.max_inds, 5.0 / 64.0);
        assert!((f.mean_freq - 5.0 * 50.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn flat_spectrum_mean_frequency() {
        let f = spectral_features(&Spectrum::from_magnitudes(vec![1.0; 64]), 50.0).unwrap();
        let mean: f64 = (1..=64).map(|k| k as f64 * 50.0 / 128.0).sum::<f64>() / 64.0;
        assert!((f.mean_freq - mean).abs() < 1e-12);
        assert_eq!(f.max_bin, 1);
    }

    #[test]
    fn two_equal_bins_tie_to_lower_index() {
        let mut m = vec![0.0; 64];
        m[1] = 2.0;
        m[5] = 2.0;
        let f = spectral_features(&Spectrum::from_magnitudes(m), 50.0).unwrap();
        assert_eq!(f.max_bin, 2);
        assert!((f.mean_freq - 4.0 * 50.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn bands_energy_examples() {
        let flat = bands_energy(&Spectrum::from_magnitudes(vec![1.0; 64])).unwrap();
        assert!(flat.iter().all(|e| *e == 1.0));

        let mut m = vec![0.0; 64];
        m[2] = 1.0; // bin 3
        let e = bands_energy(&Spectrum::from_magnitudes(m)).unwrap();
        for (i, &(lo, hi)) in BANDS.iter().enumerate() {
            assert_eq!(e[i] > 0.0, (lo..=hi).contains(&3), "band {lo}-{hi}");
        }

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..5.0)).collect();
        let e = bands_energy(&Spectrum::from_magnitudes(m.clone())).unwrap();
        for (i, &(lo, hi)) in BANDS.iter().enumerate() {
            let mut s = 0.0;
            for k in lo..=hi {
                s += m[k - 1] * m[k - 1];
            }
            let direct = s / (hi - lo + 1) as f64;
            assert!((e[i] - direct).abs() <= 1e-12 * direct.max(1.0));
        }
        assert!(bands_energy(&Spectrum::from_magnitudes(vec![1.0; 10])).is_err());
    }
}
