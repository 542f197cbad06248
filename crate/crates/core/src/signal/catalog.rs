//! The 561-entry feature catalog and the chain that evaluates it on a raw
//! `9 × 128` inertial window.
//!
//! Chain per window: median despike → 20 Hz Butterworth → 0.3 Hz gravity
//! split of the accelerometer → jerk → magnitudes → FFT, then every catalog
//! entry is read off the derived signals.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filter::{
    jerk, magnitude, median_filter, split_gravity_body, Butterworth, Phase, GRAVITY_CUTOFF_HZ,
    GRAVITY_FILTER_ORDER, MEDIAN_WINDOW, NOISE_CUTOFF_HZ, NOISE_FILTER_ORDER,
};
use super::spectrum::{bands_energy, padded_fft_magnitudes, spectral_features, Spectrum, BANDS};
use super::stats::{angle, basic_stats, burg_ar_coefficients, correlation, BasicStats, AR_ORDER};
use super::SignalError;
use crate::dataset::{InertialTensor, N_CHANNELS, SAMPLE_RATE_HZ, WINDOW_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Time,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    BodyAcc,
    GravityAcc,
    BodyAccJerk,
    BodyGyro,
    BodyGyroJerk,
}

impl Source {
    const ALL: [Source; 5] = [
        Source::BodyAcc,
        Source::GravityAcc,
        Source::BodyAccJerk,
        Source::BodyGyro,
        Source::BodyGyroJerk,
    ];

    fn index(self) -> usize {
        self as usize
    }

    fn stem(self) -> &'static str {
        match self {
            Source::BodyAcc => "BodyAcc",
            Source::GravityAcc => "GravityAcc",
            Source::BodyAccJerk => "BodyAccJerk",
            Source::BodyGyro => "BodyGyro",
            Source::BodyGyroJerk => "BodyGyroJerk",
        }
    }
}

/// Which part of a source signal an entry reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    X,
    Y,
    Z,
    Magnitude,
    /// All three axes together (sma, correlation, angle).
    Triaxial,
}

impl Component {
    const AXES: [Component; 3] = [Component::X, Component::Y, Component::Z];

    fn slot(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
            Component::Z => 2,
            Component::Magnitude => 3,
            Component::Triaxial => unreachable!("triaxial has no single slot"),
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Component::X => "X",
            Component::Y => "Y",
            Component::Z => "Z",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleKind {
    BodyAccMean,
    BodyAccJerkMean,
    BodyGyroMean,
    BodyGyroJerkMean,
    XAxis,
    YAxis,
    ZAxis,
}

impl AngleKind {
    const ALL: [AngleKind; 7] = [
        AngleKind::BodyAccMean,
        AngleKind::BodyAccJerkMean,
        AngleKind::BodyGyroMean,
        AngleKind::BodyGyroJerkMean,
        AngleKind::XAxis,
        AngleKind::YAxis,
        AngleKind::ZAxis,
    ];

    fn name(self) -> &'static str {
        match self {
            AngleKind::BodyAccMean => "angle(tBodyAccMean,gravity)",
            AngleKind::BodyAccJerkMean => "angle(tBodyAccJerkMean),gravityMean)",
            AngleKind::BodyGyroMean => "angle(tBodyGyroMean,gravityMean)",
            AngleKind::BodyGyroJerkMean => "angle(tBodyGyroJerkMean,gravityMean)",
            AngleKind::XAxis => "angle(X,gravityMean)",
            AngleKind::YAxis => "angle(Y,gravityMean)",
            AngleKind::ZAxis => "angle(Z,gravityMean)",
        }
    }
}

/// The seventeen variable families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    Mean,
    Std,
    Mad,
    Max,
    Min,
    Sma,
    Energy,
    Iqr,
    Entropy,
    ArCoeff,
    Correlation,
    MaxInds,
    MeanFreq,
    Skewness,
    Kurtosis,
    BandsEnergy,
    Angle,
}

impl VariableKind {
    pub const ALL: [VariableKind; 17] = [
        VariableKind::Mean,
        VariableKind::Std,
        VariableKind::Mad,
        VariableKind::Max,
        VariableKind::Min,
        VariableKind::Sma,
        VariableKind::Energy,
        VariableKind::Iqr,
        VariableKind::Entropy,
        VariableKind::ArCoeff,
        VariableKind::Correlation,
        VariableKind::MaxInds,
        VariableKind::MeanFreq,
        VariableKind::Skewness,
        VariableKind::Kurtosis,
        VariableKind::BandsEnergy,
        VariableKind::Angle,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Mean,
    Std,
    Mad,
    Max,
    Min,
    Sma,
    Energy,
    Iqr,
    Entropy,
    /// 1-based coefficient index.
    ArCoeff(usize),
    Correlation(Component, Component),
    MaxInds,
    MeanFreq,
    Skewness,
    Kurtosis,
    /// Index into [`BANDS`].
    BandsEnergy(usize),
    Angle(AngleKind),
}

impl Variable {
    pub fn kind(&self) -> VariableKind {
        match self {
            Variable::Mean => VariableKind::Mean,
            Variable::Std => VariableKind::Std,
            Variable::Mad => VariableKind::Mad,
            Variable::Max => VariableKind::Max,
            Variable::Min => VariableKind::Min,
            Variable::Sma => VariableKind::Sma,
            Variable::Energy => VariableKind::Energy,
            Variable::Iqr => VariableKind::Iqr,
            Variable::Entropy => VariableKind::Entropy,
            Variable::ArCoeff(_) => VariableKind::ArCoeff,
            Variable::Correlation(..) => VariableKind::Correlation,
            Variable::MaxInds => VariableKind::MaxInds,
            Variable::MeanFreq => VariableKind::MeanFreq,
            Variable::Skewness => VariableKind::Skewness,
            Variable::Kurtosis => VariableKind::Kurtosis,
            Variable::BandsEnergy(_) => VariableKind::BandsEnergy,
            Variable::Angle(_) => VariableKind::Angle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub domain: Domain,
    pub source: Source,
    pub component: Component,
    pub variable: Variable,
}

/// Ordered, uniquely named list of features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCatalog {
    entries: Vec<CatalogEntry>,
}

const BASIC: [(Variable, &str); 5] = [
    (Variable::Mean, "mean()"),
    (Variable::Std, "std()"),
    (Variable::Mad, "mad()"),
    (Variable::Max, "max()"),
    (Variable::Min, "min()"),
];
const SPREAD: [(Variable, &str); 3] = [
    (Variable::Energy, "energy()"),
    (Variable::Iqr, "iqr()"),
    (Variable::Entropy, "entropy()"),
];

impl FeatureCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<Self, SignalError> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.name.as_str()) {
                return Err(SignalError::UnknownFeature(format!("duplicate {}", e.name)));
            }
        }
        Ok(Self { entries })
    }

    /// The full 561-feature catalog in the order of the shipped feature files.
    /// Band-energy names carry an axis suffix so names stay unique.
    pub fn official() -> Self {
        let mut b = Builder::default();
        for source in Source::ALL {
            b.time_triaxial(source);
        }
        for source in Source::ALL {
            b.time_magnitude(source);
        }
        for source in [Source::BodyAcc, Source::BodyAccJerk, Source::BodyGyro] {
            b.freq_triaxial(source);
        }
        for (source, stem) in [
            (Source::BodyAcc, "fBodyAccMag"),
            (Source::BodyAccJerk, "fBodyBodyAccJerkMag"),
            (Source::BodyGyro, "fBodyBodyGyroMag"),
            (Source::BodyGyroJerk, "fBodyBodyGyroJerkMag"),
        ] {
            b.freq_magnitude(source, stem);
        }
        for kind in AngleKind::ALL {
            b.push(
                kind.name().to_string(),
                Domain::Time,
                Source::GravityAcc,
                Component::Triaxial,
                Variable::Angle(kind),
            );
        }
        Self { entries: b.entries }
    }

    /// Sub-catalog of the named official entries, in the given order.
    pub fn select<S: AsRef<str>>(names: &[S]) -> Result<Self, SignalError> {
        let official = Self::official();
        let entries = names
            .iter()
            .map(|n| {
                official
                    .entries
                    .iter()
                    .find(|e| e.name == n.as_ref())
                    .cloned()
                    .ok_or_else(|| SignalError::UnknownFeature(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }
}

#[derive(Default)]
struct Builder {
    entries: Vec<CatalogEntry>,
}

impl Builder {
    fn push(
        &mut self,
        name: String,
        domain: Domain,
        source: Source,
        component: Component,
        variable: Variable,
    ) {
        self.entries.push(CatalogEntry {
            name,
            domain,
            source,
            component,
            variable,
        });
    }

    fn per_axis(&mut self, domain: Domain, source: Source, stem: &str, var: Variable, label: &str) {
        for c in Component::AXES {
            self.push(
                format!("{stem}-{label}-{}", c.suffix()),
                domain,
                source,
                c,
                var,
            );
        }
    }

    fn time_triaxial(&mut self, source: Source) {
        let stem = format!("t{}", source.stem());
        let t = Domain::Time;
        for (v, label) in BASIC {
            self.per_axis(t, source, &stem, v, label);
        }
        self.push(
            format!("{stem}-sma()"),
            t,
            source,
            Component::Triaxial,
            Variable::Sma,
        );
        for (v, label) in SPREAD {
            self.per_axis(t, source, &stem, v, label);
        }
        for c in Component::AXES {
            for k in 1..=AR_ORDER {
                self.push(
                    format!("{stem}-arCoeff()-{},{k}", c.suffix()),
                    t,
                    source,
                    c,
                    Variable::ArCoeff(k),
                );
            }
        }
        for (a, b) in [
            (Component::X, Component::Y),
            (Component::X, Component::Z),
            (Component::Y, Component::Z),
        ] {
            self.push(
                format!("{stem}-correlation()-{},{}", a.suffix(), b.suffix()),
                t,
                source,
                Component::Triaxial,
                Variable::Correlation(a, b),
            );
        }
    }

    fn time_magnitude(&mut self, source: Source) {
        let stem = format!("t{}Mag", source.stem());
        let (t, m) = (Domain::Time, Component::Magnitude);
        for (v, label) in BASIC {
            self.push(format!("{stem}-{label}"), t, source, m, v);
        }
        self.push(format!("{stem}-sma()"), t, source, m, Variable::Sma);
        for (v, label) in SPREAD {
            self.push(format!("{stem}-{label}"), t, source, m, v);
        }
        for k in 1..=AR_ORDER {
            self.push(
                format!("{stem}-arCoeff(){k}"),
                t,
                source,
                m,
                Variable::ArCoeff(k),
            );
        }
    }

    fn freq_triaxial(&mut self, source: Source) {
        let stem = format!("f{}", source.stem());
        let f = Domain::Frequency;
        for (v, label) in BASIC {
            self.per_axis(f, source, &stem, v, label);
        }
        self.push(
            format!("{stem}-sma()"),
            f,
            source,
            Component::Triaxial,
            Variable::Sma,
        );
        for (v, label) in SPREAD {
            self.per_axis(f, source, &stem, v, label);
        }
        self.per_axis(f, source, &stem, Variable::MaxInds, "maxInds");
        self.per_axis(f, source, &stem, Variable::MeanFreq, "meanFreq()");
        for c in Component::AXES {
            self.push(
                format!("{stem}-skewness()-{}", c.suffix()),
                f,
                source,
                c,
                Variable::Skewness,
            );
            self.push(
                format!("{stem}-kurtosis()-{}", c.suffix()),
                f,
                source,
                c,
                Variable::Kurtosis,
            );
        }
        for c in Component::AXES {
            for (i, (lo, hi)) in BANDS.iter().enumerate() {
                self.push(
                    format!("{stem}-bandsEnergy()-{lo},{hi}-{}", c.suffix()),
                    f,
                    source,
                    c,
                    Variable::BandsEnergy(i),
                );
            }
        }
    }

    fn freq_magnitude(&mut self, source: Source, stem: &str) {
        let (f, m) = (Domain::Frequency, Component::Magnitude);
        for (v, label) in BASIC {
            self.push(format!("{stem}-{label}"), f, source, m, v);
        }
        self.push(format!("{stem}-sma()"), f, source, m, Variable::Sma);
        for (v, label) in SPREAD {
            self.push(format!("{stem}-{label}"), f, source, m, v);
        }
        self.push(format!("{stem}-maxInds"), f, source, m, Variable::MaxInds);
        self.push(
            format!("{stem}-meanFreq()"),
            f,
            source,
            m,
            Variable::MeanFreq,
        );
        self.push(
            format!("{stem}-skewness()"),
            f,
            source,
            m,
            Variable::Skewness,
        );
        self.push(
            format!("{stem}-kurtosis()"),
            f,
            source,
            m,
            Variable::Kurtosis,
        );
    }
}

/// Values substituted where a statistic is undefined, plus the pipeline
/// constants, for the JSON sidecar of a recomputed feature file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionConstants {
    pub sample_rate_hz: f64,
    pub median_window: usize,
    pub noise_filter_order: usize,
    pub noise_cutoff_hz: f64,
    pub gravity_filter_order: usize,
    pub gravity_cutoff_hz: f64,
    pub filter_phase: Phase,
    pub ar_order: usize,
    pub entropy: String,
    pub max_inds: String,
    pub spectrum_bins: String,
    pub jerk_spectrum: String,
    pub zero_variance_ar_coeff: f64,
    pub zero_variance_correlation: f64,
    pub zero_vector_angle: f64,
    pub zero_std_skew_kurtosis: f64,
}

impl Default for DecisionConstants {
    fn default() -> Self {
        Self {
            sample_rate_hz: SAMPLE_RATE_HZ,
            median_window: MEDIAN_WINDOW,
            noise_filter_order: NOISE_FILTER_ORDER,
            noise_cutoff_hz: NOISE_CUTOFF_HZ,
            gravity_filter_order: GRAVITY_FILTER_ORDER,
            gravity_cutoff_hz: GRAVITY_CUTOFF_HZ,
            filter_phase: Phase::ZeroPhase,
            ar_order: AR_ORDER,
            entropy: "shannon entropy in nats of |x_k| / sum |x_j|; 0 for an all-zero signal"
                .into(),
            max_inds: "1-based argmax bin divided by 64; ties to the lowest bin".into(),
            spectrum_bins: "bins 1..=64 of the 128-point DFT (DC dropped, Nyquist kept)".into(),
            jerk_spectrum: "127-sample jerk signals are zero-padded to 128".into(),
            zero_variance_ar_coeff: 0.0,
            zero_variance_correlation: 0.0,
            zero_vector_angle: FRAC_PI_2,
            zero_std_skew_kurtosis: 0.0,
        }
    }
}

/// Every derived signal of one window, computed once.
struct Derived {
    /// `[source][x, y, z, magnitude]`
    time: Vec<[Vec<f64>; 4]>,
    time_stats: Vec<[BasicStats; 4]>,
    /// Spectra for body acc, body acc jerk, body gyro, body gyro jerk.
    freq: Vec<[Spectrum; 4]>,
    freq_stats: Vec<[BasicStats; 4]>,
}

fn freq_slot(source: Source) -> usize {
    match source {
        Source::BodyAcc => 0,
        Source::BodyAccJerk => 1,
        Source::BodyGyro => 2,
        Source::BodyGyroJerk => 3,
        Source::GravityAcc => unreachable!("gravity has no frequency-domain features"),
    }
}

impl Derived {
    fn from_window(window: ArrayView2<'_, f64>) -> Result<Self, SignalError> {
        if window.dim() != (N_CHANNELS, WINDOW_LEN) {
            return Err(SignalError::BadLength {
                expected: N_CHANNELS * WINDOW_LEN,
                got: window.len(),
            });
        }
        let fs = SAMPLE_RATE_HZ;
        let noise = Butterworth::lowpass(NOISE_FILTER_ORDER, NOISE_CUTOFF_HZ, fs)?;
        let clean = |row: usize| -> Result<Vec<f64>, SignalError> {
            let raw: Vec<f64> = window.row(row).to_vec();
            noise.apply(&median_filter(&raw, MEDIAN_WINDOW)?, Phase::ZeroPhase)
        };
        let acc = [clean(0)?, clean(1)?, clean(2)?];
        let gyro = [clean(6)?, clean(7)?, clean(8)?];
        let (gravity, body) =
            split_gravity_body([&acc[0], &acc[1], &acc[2]], GRAVITY_CUTOFF_HZ, fs)?;

        let with_mag = |[x, y, z]: [Vec<f64>; 3]| -> Result<[Vec<f64>; 4], SignalError> {
            let m = magnitude(&x, &y, &z)?;
            Ok([x, y, z, m])
        };
        let jerk3 = |s: &[Vec<f64>; 3]| -> Result<[Vec<f64>; 3], SignalError> {
            Ok([jerk(&s[0], fs)?, jerk(&s[1], fs)?, jerk(&s[2], fs)?])
        };
        let body_jerk = jerk3(&body)?;
        let gyro_jerk = jerk3(&gyro)?;

        // order follows Source::ALL
        let time = vec![
            with_mag(body)?,
            with_mag(gravity)?,
            with_mag(body_jerk)?,
            with_mag(gyro)?,
            with_mag(gyro_jerk)?,
        ];
        let stats4 = |signals: &[Vec<f64>; 4]| -> Result<[BasicStats; 4], SignalError> {
            Ok([
                basic_stats(&signals[0])?,
                basic_stats(&signals[1])?,
                basic_stats(&signals[2])?,
                basic_stats(&signals[3])?,
            ])
        };
        let time_stats = time.iter().map(stats4).collect::<Result<Vec<_>, _>>()?;

        let freq: Vec<[Spectrum; 4]> = [
            Source::BodyAcc,
            Source::BodyAccJerk,
            Source::BodyGyro,
            Source::BodyGyroJerk,
        ]
        .into_iter()
        .map(|s| {
            let sig = &time[s.index()];
            [
                padded_fft_magnitudes(&sig[0]),
                padded_fft_magnitudes(&sig[1]),
                padded_fft_magnitudes(&sig[2]),
                padded_fft_magnitudes(&sig[3]),
            ]
        })
        .collect();
        let freq_stats = freq
            .iter()
            .map(|spectra| {
                Ok([
                    basic_stats(spectra[0].magnitudes())?,
                    basic_stats(spectra[1].magnitudes())?,
                    basic_stats(spectra[2].magnitudes())?,
                    basic_stats(spectra[3].magnitudes())?,
                ])
            })
            .collect::<Result<Vec<_>, SignalError>>()?;

        Ok(Self {
            time,
            time_stats,
            freq,
            freq_stats,
        })
    }

    fn series(&self, domain: Domain, source: Source, component: Component) -> &[f64] {
        match domain {
            Domain::Time => &self.time[source.index()][component.slot()],
            Domain::Frequency => self.freq[freq_slot(source)][component.slot()].magnitudes(),
        }
    }

    fn stats(&self, domain: Domain, source: Source, component: Component) -> &BasicStats {
        match domain {
            Domain::Time => &self.time_stats[source.index()][component.slot()],
            Domain::Frequency => &self.freq_stats[freq_slot(source)][component.slot()],
        }
    }

    fn mean_vector(&self, source: Source) -> [f64; 3] {
        let s = &self.time_stats[source.index()];
        [s[0].mean, s[1].mean, s[2].mean]
    }

    fn evaluate(&self, e: &CatalogEntry) -> Result<f64, SignalError> {
        let (d, s, c) = (e.domain, e.source, e.component);
        let value = match e.variable {
            Variable::Mean => self.stats(d, s, c).mean,
            Variable::Std => self.stats(d, s, c).std,
            Variable::Mad => self.stats(d, s, c).mad,
            Variable::Max => self.stats(d, s, c).max,
            Variable::Min => self.stats(d, s, c).min,
            Variable::Energy => self.stats(d, s, c).energy,
            Variable::Iqr => self.stats(d, s, c).iqr,
            Variable::Entropy => self.stats(d, s, c).entropy,
            Variable::Skewness => self.stats(d, s, c).skewness,
            Variable::Kurtosis => self.stats(d, s, c).kurtosis,
            Variable::Sma => {
                if c == Component::Triaxial {
                    let x = self.series(d, s, Component::X);
                    let y = self.series(d, s, Component::Y);
                    let z = self.series(d, s, Component::Z);
                    super::stats::sma(x, y, z)?
                } else {
                    let x = self.series(d, s, c);
                    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
                }
            }
            Variable::ArCoeff(k) => match burg_ar_coefficients(self.series(d, s, c), AR_ORDER) {
                Ok(coef) => coef[k - 1],
                Err(SignalError::ZeroVariance) => 0.0,
                Err(other) => return Err(other),
            },
            Variable::Correlation(a, b) => {
                match correlation(self.series(d, s, a), self.series(d, s, b)) {
                    Ok(r) => r,
                    Err(SignalError::ZeroVariance) => 0.0,
                    Err(other) => return Err(other),
                }
            }
            Variable::MaxInds => {
                spectral_features(&self.freq[freq_slot(s)][c.slot()], SAMPLE_RATE_HZ)?.max_inds
            }
            Variable::MeanFreq => {
                spectral_features(&self.freq[freq_slot(s)][c.slot()], SAMPLE_RATE_HZ)?.mean_freq
            }
            Variable::BandsEnergy(i) => bands_energy(&self.freq[freq_slot(s)][c.slot()])?[i],
            Variable::Angle(kind) => {
                let gravity = self.mean_vector(Source::GravityAcc);
                let other = match kind {
                    AngleKind::BodyAccMean => self.mean_vector(Source::BodyAcc),
                    AngleKind::BodyAccJerkMean => self.mean_vector(Source::BodyAccJerk),
                    AngleKind::BodyGyroMean => self.mean_vector(Source::BodyGyro),
                    AngleKind::BodyGyroJerkMean => self.mean_vector(Source::BodyGyroJerk),
                    AngleKind::XAxis => [1.0, 0.0, 0.0],
                    AngleKind::YAxis => [0.0, 1.0, 0.0],
                    AngleKind::ZAxis => [0.0, 0.0, 1.0],
                };
                match angle(other, gravity) {
                    Ok(a) => a,
                    Err(SignalError::ZeroVector) => FRAC_PI_2,
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(value)
    }
}

/// Runs the preprocessing chain on one `9 × 128` window (canonical channel
/// order) and evaluates every catalog entry.
pub fn compute_feature_vector(
    window: ArrayView2<'_, f64>,
    catalog: &FeatureCatalog,
) -> Result<Vec<f64>, SignalError> {
    let derived = Derived::from_window(window)?;
    catalog
        .entries()
        .iter()
        .map(|e| derived.evaluate(e))
        .collect()
}

/// [`compute_feature_vector`] over every window, in parallel.
pub fn compute_feature_matrix(
    inertial: &InertialTensor,
    catalog: &FeatureCatalog,
) -> Result<Array2<f64>, SignalError> {
    let rows: Vec<Vec<f64>> = (0..inertial.len())
        .into_par_iter()
        .map(|i| compute_feature_vector(inertial.window(i), catalog))
        .collect::<Result<_, _>>()?;
    let mut out = Array2::zeros((rows.len(), catalog.len()));
    for (i, row) in rows.into_iter().enumerate() {
        out.row_mut(i).assign(&ndarray::Array1::from(row));
    }
    Ok(out)
}
