//! Time-domain preprocessing: median despiking, Butterworth low-pass filtering,
//! gravity/body separation, jerk and Euclidean magnitude.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SignalError;

/// Order of the gravity separation filter.
pub const GRAVITY_FILTER_ORDER: usize = 3;
/// Corner frequency of the gravity separation filter.
pub const GRAVITY_CUTOFF_HZ: f64 = 0.3;
/// Corner frequency of the noise filter applied to every raw axis.
pub const NOISE_CUTOFF_HZ: f64 = 20.0;
pub const NOISE_FILTER_ORDER: usize = 3;
/// Despike window; the narrowest window a median filter can use.
pub const MEDIAN_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    ButterworthLowpass {
        order: usize,
        cutoff_hz: f64,
        sample_rate_hz: f64,
    },
    Median {
        window: usize,
        sample_rate_hz: f64,
    },
}

impl FilterSpec {
    pub fn butterworth(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Self {
        FilterSpec::ButterworthLowpass {
            order,
            cutoff_hz,
            sample_rate_hz,
        }
    }

    /// Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SignalError> {
        match *self {
            FilterSpec::ButterworthLowpass {
                order,
                cutoff_hz,
                sample_rate_hz,
            } => {
                if order == 0 {
                    return Err(SignalError::InvalidFilter("order must be >= 1".into()));
                }
                if !(sample_rate_hz > 0.0) {
                    return Err(SignalError::InvalidFilter(
                        "sample rate must be positive".into(),
                    ));
                }
                if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0) {
                    return Err(SignalError::InvalidFilter(format!(
                        "cutoff {cutoff_hz} Hz must lie in (0, {}) Hz",
                        sample_rate_hz / 2.0
                    )));
                }
                Ok(())
            }
            FilterSpec::Median {
                window,
                sample_rate_hz,
            } => {
                if !(sample_rate_hz > 0.0) {
                    return Err(SignalError::InvalidFilter(
                        "sample rate must be positive".into(),
                    ));
                }
                if window < 3 || window % 2 == 0 {
                    return Err(SignalError::BadWindow { window, len: None });
                }
                Ok(())
            }
        }
    }
}

/// How a Butterworth filter is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Forward then backward pass; no phase distortion, squared magnitude.
    #[default]
    ZeroPhase,
    /// A single causal pass from a zero initial state.
    SinglePass,
}

/// Second-order section in transposed direct form II, `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Filter state that corresponds to a unit-step steady state.
    fn step_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[1] * g;
        let z1 = self.b[1] - self.a[0] * g + z2;
        [z1, z2]
    }

    fn run(&self, x: &mut [f64], mut z: [f64; 2]) {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + z[0];
            z[0] = b1 * input - a1 * y + z[1];
            z[1] = b2 * input - a2 * y;
            *v = y;
        }
    }

    /// Complex response at normalized angular frequency `w` (rad/sample).
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        let num = self.b[0] + self.b[1] * z1 + self.b[2] * z2;
        let den = 1.0 + self.a[0] * z1 + self.a[1] * z2;
        num / den
    }
}

/// Digital Butterworth low-pass filter as a cascade of second-order sections,
/// designed by bilinear transform with frequency pre-warping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Butterworth {
    order: usize,
    sections: Vec<Biquad>,
}

impl Butterworth {
    pub fn lowpass(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self, SignalError> {
        FilterSpec::butterworth(order, cutoff_hz, sample_rate_hz).validate()?;
        let fs2 = 2.0 * sample_rate_hz;
        let warped = fs2 * (PI * cutoff_hz / sample_rate_hz).tan();
        let to_z = |p: Complex64| (fs2 + p) / (fs2 - p);

        let mut sections = Vec::with_capacity(order.div_ceil(2));
        if order % 2 == 1 {
            let z = to_z(Complex64::new(-warped, 0.0)).re;
            // (1 + z^-1) / (1 - z z^-1), scaled to unit gain at DC
            let g = (1.0 - z) / 2.0;
            sections.push(Biquad {
                b: [g, g, 0.0],
                a: [-z, 0.0],
            });
        }
        for k in 0..order / 2 {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            let z = to_z(Complex64::from_polar(warped, theta));
            let a1 = -2.0 * z.re;
            let a2 = z.norm_sqr();
            let g = (1.0 + a1 + a2) / 4.0;
            sections.push(Biquad {
                b: [g, 2.0 * g, g],
                a: [a1, a2],
            });
        }
        Ok(Self { order, sections })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Product of the per-section gains at zero frequency.
    pub fn dc_gain(&self) -> f64 {
        self.sections.iter().map(Biquad::dc_gain).product()
    }

    /// Single-pass magnitude response at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / sample_rate_hz;
        self.sections
            .iter()
            .map(|s| s.response(w))
            .product::<Complex64>()
            .norm()
    }

    /// Shortest series the forward-backward scheme accepts.
    pub fn min_len(&self) -> usize {
        3 * self.order
    }

    pub fn apply(&self, x: &[f64], phase: Phase) -> Result<Vec<f64>, SignalError> {
        match phase {
            Phase::SinglePass => {
                let mut y = x.to_vec();
                for s in &self.sections {
                    s.run(&mut y, [0.0, 0.0]);
                }
                Ok(y)
            }
            Phase::ZeroPhase => self.filtfilt(x),
        }
    }

    /// Forward-backward filtering with odd extension at both ends and
    /// steady-state initial conditions, so constants pass through untouched.
    fn filtfilt(&self, x: &[f64]) -> Result<Vec<f64>, SignalError> {
        let n = x.len();
        if n < self.min_len() || n < 2 {
            return Err(SignalError::SeriesTooShort {
                needed: self.min_len().max(2),
                got: n,
            });
        }
        let first_order = self
            .sections
            .iter()
            .filter(|s| s.b[2] == 0.0 && s.a[1] == 0.0)
            .count();
        let ntaps = 2 * self.sections.len() + 1 - first_order;
        let pad = (3 * ntaps).min(n - 1);

        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        self.run_with_steady_state(&mut ext);
        ext.reverse();
        self.run_with_steady_state(&mut ext);
        ext.reverse();
        Ok(ext[pad..pad + n].to_vec())
    }

    fn run_with_steady_state(&self, x: &mut [f64]) {
        let mut scale = x[0];
        for s in &self.sections {
            let [z1, z2] = s.step_state();
            s.run(x, [z1 * scale, z2 * scale]);
            scale *= s.dc_gain();
        }
    }
}

/// Zero-phase Butterworth low-pass of `x` described by `spec`.
pub fn butterworth_lowpass(x: &[f64], spec: &FilterSpec) -> Result<Vec<f64>, SignalError> {
    butterworth_lowpass_with(x, spec, Phase::ZeroPhase)
}

pub fn butterworth_lowpass_with(
    x: &[f64],
    spec: &FilterSpec,
    phase: Phase,
) -> Result<Vec<f64>, SignalError> {
    match *spec {
        FilterSpec::ButterworthLowpass {
            order,
            cutoff_hz,
            sample_rate_hz,
        } => Butterworth::lowpass(order, cutoff_hz, sample_rate_hz)?.apply(x, phase),
        FilterSpec::Median { .. } => Err(SignalError::InvalidFilter(
            "expected a Butterworth specification".into(),
        )),
    }
}

/// Sliding median with half-sample symmetric reflection at the edges
/// (`… x1 x0 | x0 x1 …`).
pub fn median_filter(x: &[f64], window: usize) -> Result<Vec<f64>, SignalError> {
    if window < 3 || window.is_multiple_of(2) || window > x.len() {
        return Err(SignalError::BadWindow {
            window,
            len: Some(x.len()),
        });
    }
    let n = x.len() as isize;
    let half = (window / 2) as isize;
    let reflect = |i: isize| -> f64 {
        let j = if i < 0 {
            -i - 1
        } else if i >= n {
            2 * n - i - 1
        } else {
            i
        };
        x[j as usize]
    };
    let mut buf = vec![0.0; window];
    Ok((0..n)
        .map(|i| {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = reflect(i - half + k as isize);
            }
            buf.sort_unstable_by(f64::total_cmp);
            buf[window / 2]
        })
        .collect())
}

/// Three equally long axes.
pub type Triaxial = [Vec<f64>; 3];

/// Splits total acceleration into a low-frequency gravity part and the body
/// remainder. `gravity + body` reproduces `total` up to rounding.
pub fn split_gravity_body(
    total: [&[f64]; 3],
    cutoff_hz: f64,
    sample_rate_hz: f64,
) -> Result<(Triaxial, Triaxial), SignalError> {
    if total[0].len() != total[1].len() || total[0].len() != total[2].len() {
        return Err(SignalError::LengthMismatch);
    }
    let filter = Butterworth::lowpass(GRAVITY_FILTER_ORDER, cutoff_hz, sample_rate_hz)?;
    let mut gravity: Triaxial = Default::default();
    let mut body: Triaxial = Default::default();
    for axis in 0..3 {
        let g = filter.apply(total[axis], Phase::ZeroPhase)?;
        body[axis] = total[axis].iter().zip(&g).map(|(t, g)| t - g).collect();
        gravity[axis] = g;
    }
    Ok((gravity, body))
}

/// First difference scaled by the sample rate; one sample shorter than `x`.
pub fn jerk(x: &[f64], sample_rate_hz: f64) -> Result<Vec<f64>, SignalError> {
    if x.len() < 2 {
        return Err(SignalError::SeriesTooShort {
            needed: 2,
            got: x.len(),
        });
    }
    Ok(x.windows(2)
        .map(|w| (w[1] - w[0]) * sample_rate_hz)
        .collect())
}

/// Per-sample Euclidean norm of three axes.
pub fn magnitude(x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>, SignalError> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(SignalError::LengthMismatch);
    }
    Ok(x.iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
        .collect())
}
