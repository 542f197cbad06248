//! Per-window statistics: moments, robust spreads, entropy, Burg AR fit,
//! signal magnitude area, correlation and vector angles.

use serde::{Deserialize, Serialize};

use super::SignalError;

/// Order of the autoregressive model fitted to every time-domain signal.
pub const AR_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicStats {
    pub mean: f64,
    /// Population standard deviation (divides by `n`).
    pub std: f64,
    /// Median absolute deviation from the median.
    pub mad: f64,
    pub max: f64,
    pub min: f64,
    /// `Σx² / n`.
    pub energy: f64,
    pub iqr: f64,
    pub entropy: f64,
    pub skewness: f64,
    /// Non-excess kurtosis.
    pub kurtosis: f64,
    /// Set when `std == 0`; skewness and kurtosis are then reported as 0.
    pub degenerate: bool,
}

pub fn basic_stats(x: &[f64]) -> Result<BasicStats, SignalError> {
    if x.is_empty() {
        return Err(SignalError::SeriesTooShort { needed: 1, got: 0 });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = m2.sqrt();
    let degenerate = std == 0.0;
    let (skewness, kurtosis) = if degenerate {
        (0.0, 0.0)
    } else {
        (m3 / (m2 * std), m4 / (m2 * m2))
    };

    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let med = quantile_sorted(&sorted, 0.5);
    let mut dev: Vec<f64> = x.iter().map(|v| (v - med).abs()).collect();
    dev.sort_unstable_by(f64::total_cmp);

    Ok(BasicStats {
        mean,
        std,
        mad: quantile_sorted(&dev, 0.5),
        max: sorted[sorted.len() - 1],
        min: sorted[0],
        energy: x.iter().map(|v| v * v).sum::<f64>() / n,
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        entropy: entropy(x),
        skewness,
        kurtosis,
        degenerate,
    })
}

/// Quantile of already sorted data, interpolating linearly between order
/// statistics at position `q (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Shannon entropy (nats) of `p_k = |x_k| / Σ|x_j|`; 0 for an all-zero signal.
pub fn entropy(x: &[f64]) -> f64 {
    let total: f64 = x.iter().map(|v| v.abs()).sum();
    if total == 0.0 {
        return 0.0;
    }
    -x.iter()
        .map(|v| v.abs() / total)
        .filter(|p| *p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Burg fit of an AR model of the given order.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgFit {
    /// Prediction-form coefficients: `x_t ≈ Σ_k coefficients[k-1] · x_{t-k}`.
    pub coefficients: Vec<f64>,
    pub reflection: Vec<f64>,
}

/// Burg's recursion: each stage picks the reflection coefficient minimizing the
/// summed forward and backward prediction error power.
pub fn burg(x: &[f64], order: usize) -> Result<BurgFit, SignalError> {
    let n = x.len();
    if n <= order {
        return Err(SignalError::SeriesTooShort {
            needed: order + 1,
            got: n,
        });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    if x.iter().all(|v| *v == mean) || x.iter().all(|v| *v == x[0]) {
        return Err(SignalError::ZeroVariance);
    }

    let mut f = x.to_vec();
    let mut b = x.to_vec();
    // polynomial 1 + a_1 z^-1 + ... ; prediction coefficients are -a_k
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut reflection = Vec::with_capacity(order);
    for m in 0..order {
        let (mut num, mut den) = (0.0, 0.0);
        for t in m + 1..n {
            num += f[t] * b[t - 1];
            den += f[t] * f[t] + b[t - 1] * b[t - 1];
        }
        if den == 0.0 {
            return Err(SignalError::ZeroVariance);
        }
        let k = -2.0 * num / den;
        reflection.push(k);

        let prev = a.clone();
        for i in 1..=m + 1 {
            a[i] = prev[i] + k * prev[m + 1 - i];
        }
        for t in (m + 1..n).rev() {
            let ft = f[t];
            f[t] = ft + k * b[t - 1];
            b[t] = b[t - 1] + k * ft;
        }
    }
    Ok(BurgFit {
        coefficients: a[1..].iter().map(|v| -v).collect(),
        reflection,
    })
}

pub fn burg_ar_coefficients(x: &[f64], order: usize) -> Result<Vec<f64>, SignalError> {
    burg(x, order).map(|fit| fit.coefficients)
}

/// Signal magnitude area: `(Σ|x| + Σ|y| + Σ|z|) / n`.
pub fn sma(x: &[f64], y: &[f64], z: &[f64]) -> Result<f64, SignalError> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(SignalError::LengthMismatch);
    }
    if x.is_empty() {
        return Err(SignalError::SeriesTooShort { needed: 1, got: 0 });
    }
    let total: f64 = x
        .iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| a.abs() + b.abs() + c.abs())
        .sum();
    Ok(total / x.len() as f64)
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64, SignalError> {
    if a.len() != b.len() {
        return Err(SignalError::LengthMismatch);
    }
    if a.len() < 2 {
        return Err(SignalError::SeriesTooShort {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(SignalError::ZeroVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Angle in `[0, π]` between two 3-vectors.
pub fn angle(u: [f64; 3], v: [f64; 3]) -> Result<f64, SignalError> {
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let nv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(SignalError::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Direct-formula statistics, written without sharing helpers with the
    /// implementation.
    mod oracle {
        pub fn mean(x: &[f64]) -> f64 {
            let mut s = 0.0;
            for v in x {
                s += v;
            }
            s / x.len() as f64
        }

        pub fn moment(x: &[f64], k: i32) -> f64 {
            let m = mean(x);
            x.iter().map(|v| (v - m).powi(k)).sum::<f64>() / x.len() as f64
        }

        /// Type-7 quantile via explicit sorting.
        pub fn quantile(x: &[f64], q: f64) -> f64 {
            let mut s = x.to_vec();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let h = (s.len() - 1) as f64 * q;
            let i = h as usize;
            if i + 1 < s.len() {
                s[i] + (h - i as f64) * (s[i + 1] - s[i])
            } else {
                s[i]
            }
        }

        pub fn entropy(x: &[f64]) -> f64 {
            let total: f64 = x.iter().map(|v| v.abs()).sum();
            let mut h = 0.0;
            for v in x {
                if *v != 0.0 {
                    let p = v.abs() / total;
                    h -= p * p.ln();
                }
            }
            h
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn constant_series_stats() {
        let s = basic_stats(&[2.0; 10]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.mad, 0.0);
        assert_eq!(s.energy, 4.0);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.kurtosis, 0.0);
        assert!(s.degenerate);
    }

    #[test]
    fn energy_of_small_series() {
        assert_eq!(basic_stats(&[1.0, 2.0, 2.0]).unwrap().energy, 3.0);
        assert!(basic_stats(&[]).is_err());
    }

    #[test]
    fn stats_match_direct_formulas_on_random_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(2..150);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let s = basic_stats(&x).unwrap();
            let m2 = oracle::moment(&x, 2);
            let med = oracle::quantile(&x, 0.5);
            let dev: Vec<f64> = x.iter().map(|v| (v - med).abs()).collect();
            assert!(close(s.mean, oracle::mean(&x)));
            assert!(close(s.std, m2.sqrt()));
            assert!(close(s.mad, oracle::quantile(&dev, 0.5)));
            assert!(close(s.max, x.iter().cloned().fold(f64::MIN, f64::max)));
            assert!(close(s.min, x.iter().cloned().fold(f64::MAX, f64::min)));
            assert!(close(
                s.energy,
                x.iter().map(|v| v * v).sum::<f64>() / n as f64
            ));
            assert!(close(
                s.iqr,
                oracle::quantile(&x, 0.75) - oracle::quantile(&x, 0.25)
            ));
            assert!(close(s.entropy, oracle::entropy(&x)));
            assert!(close(s.skewness, oracle::moment(&x, 3) / m2.powf(1.5)));
            assert!(close(s.kurtosis, oracle::moment(&x, 4) / (m2 * m2)));
        }
    }

    #[test]
    fn entropy_conventions() {
        assert_eq!(entropy(&[0.0; 8]), 0.0);
        // uniform magnitudes -> ln(n)
        assert!((entropy(&[1.0, -1.0, 1.0, -1.0]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&[0.0, 3.0, 0.0]), 0.0);
    }

    #[test]
    fn burg_recovers_ar1_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = vec![0.0; 10_000];
        for t in 1..x.len() {
            // uniform noise with unit variance
            let e: f64 = rng.random_range(-3f64.sqrt()..3f64.sqrt());
            x[t] = 0.5 * x[t - 1] + e;
        }
        let c = burg_ar_coefficients(&x, AR_ORDER).unwrap();
        assert_eq!(c.len(), 4);
        assert!((c[0] - 0.5).abs() < 0.05, "a1 = {}", c[0]);
        assert!(c[1..].iter().all(|v| v.abs() < 0.05));
    }

    #[test]
    fn burg_exact_on_ar2_sinusoid_is_stable() {
        let x: Vec<f64> = (0..128)
            .map(|i| (0.3 * i as f64).sin() + 0.01 * (i % 7) as f64)
            .collect();
        let fit = burg(&x, 4).unwrap();
        assert!(fit.reflection.iter().all(|k| k.abs() < 1.0));
    }

    #[test]
    fn burg_rejects_constant_series() {
        assert!(matches!(
            burg(&[1.5; 30], 4),
            Err(SignalError::ZeroVariance)
        ));
        assert!(matches!(
            burg(&[1.0, 2.0], 4),
            Err(SignalError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn burg_reflection_coefficients_inside_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let n = rng.random_range(6..200);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fit = burg(&x, 4).unwrap();
            assert!(
                fit.reflection.iter().all(|k| k.abs() < 1.0),
                "{:?}",
                fit.reflection
            );
        }
    }

    #[test]
    fn sma_examples() {
        assert_eq!(sma(&[1.0; 5], &[1.0; 5], &[1.0; 5]).unwrap(), 3.0);
        assert_eq!(sma(&[0.0; 5], &[0.0; 5], &[0.0; 5]).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..64);
            let v: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let mut direct = 0.0;
            for i in 0..n {
                direct += v[0][i].abs();
                direct += v[1][i].abs();
                direct += v[2][i].abs();
            }
            assert!(close(sma(&v[0], &v[1], &v[2]).unwrap(), direct / n as f64));
        }
        assert!(sma(&[1.0], &[1.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn correlation_examples() {
        let a: Vec<f64> = (0..20).map(|i| (i as f64).sqrt()).collect();
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((correlation(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
        let n = 200;
        let s: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).sin())
            .collect();
        let c: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).cos())
            .collect();
        assert!(correlation(&s, &c).unwrap().abs() < 1e-9);
        assert!(matches!(
            correlation(&a, &[1.0; 20]),
            Err(SignalError::ZeroVariance)
        ));
    }

    #[test]
    fn angle_examples() {
        assert!((angle([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(angle([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]).unwrap(), 0.0);
        assert!((angle([1.0, 2.0, 3.0], [-1.0, -2.0, -3.0]).unwrap() - PI).abs() < 1e-7);
        assert!(matches!(
            angle([0.0; 3], [1.0, 0.0, 0.0]),
            Err(SignalError::ZeroVector)
        ));
    }
}
