//! Seeded generator of HAR-like data, and a writer for the official directory
//! layout. Used by tests, benchmarks and demos when the real dataset is not
//! at hand.
//!
//! Each activity has a characteristic gravity orientation and, for the three
//! walking activities, a gait frequency and oscillation amplitude. Sitting and
//! standing differ only by a small tilt, so they are the hardest pair, as in
//! the real data.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::{Array2, Array3, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    Activity, Channel, DatasetBundle, DatasetError, FeatureMatrix, InertialTensor, InstanceId,
    Partition, N_CHANNELS, SAMPLE_RATE_HZ, WINDOW_LEN,
};
use crate::signal::filter::GRAVITY_CUTOFF_HZ;
use crate::signal::{compute_feature_matrix, split_gravity_body, FeatureCatalog};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub windows_per_class: usize,
    pub n_subjects: u8,
    /// Scales every noise term; 1.0 is the default difficulty.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            windows_per_class: 50,
            n_subjects: 10,
            noise: 1.0,
            seed: 7,
        }
    }
}

struct Profile {
    gravity: [f64; 3],
    /// Gait frequency in Hz; zero for static postures.
    gait_hz: f64,
    acc_amp: [f64; 3],
    gyro_amp: [f64; 3],
}

fn profile(activity: Activity) -> Profile {
    let walk = |gait_hz, acc_amp, gyro_amp| Profile {
        gravity: [1.0, -0.1, 0.05],
        gait_hz,
        acc_amp,
        gyro_amp,
    };
    let still = |gravity| Profile {
        gravity,
        gait_hz: 0.0,
        acc_amp: [0.0; 3],
        gyro_amp: [0.0; 3],
    };
    match activity {
        Activity::Walking => walk(1.8, [0.25, 0.10, 0.10], [0.30, 0.20, 0.40]),
        Activity::WalkingUpstairs => walk(1.5, [0.20, 0.18, 0.12], [0.45, 0.25, 0.30]),
        Activity::WalkingDownstairs => walk(2.1, [0.40, 0.15, 0.22], [0.35, 0.35, 0.50]),
        Activity::Sitting => still([0.88, 0.10, 0.46]),
        Activity::Standing => still([0.97, 0.05, 0.24]),
        Activity::Laying => still([0.05, 0.30, 0.95]),
    }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Generates a pooled bundle with `windows_per_class × 6` instances. The
/// precomputed features are the official catalog evaluated on the generated
/// windows, min-max scaled per column to `[-1, 1]`.
pub fn generate(config: &SyntheticConfig) -> Result<DatasetBundle, DatasetError> {
    if config.windows_per_class == 0 || config.n_subjects == 0 {
        return Err(DatasetError::Shape(
            "synthetic config must be non-empty".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let subject_tilt: Vec<[f64; 3]> = (0..config.n_subjects)
        .map(|_| std::array::from_fn(|_| 0.03 * unit.sample(&mut rng)))
        .collect();

    let n = config.windows_per_class * Activity::COUNT;
    let mut data = Array3::zeros((n, N_CHANNELS, WINDOW_LEN));
    let mut labels = Vec::with_capacity(n);
    let mut subjects = Vec::with_capacity(n);
    let dt = 1.0 / SAMPLE_RATE_HZ;

    for i in 0..n {
        let activity = Activity::ALL[i % Activity::COUNT];
        let subject = (i / Activity::COUNT) % config.n_subjects as usize;
        let p = profile(activity);
        let tilt = subject_tilt[subject];
        let g = normalize(std::array::from_fn(|a| {
            p.gravity[a] + tilt[a] + 0.04 * config.noise * unit.sample(&mut rng)
        }));
        let gait = p.gait_hz * (1.0 + 0.05 * unit.sample(&mut rng));
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (acc_sigma, gyro_sigma) = if p.gait_hz > 0.0 {
            (0.03 * config.noise, 0.04 * config.noise)
        } else {
            (0.006 * config.noise, 0.01 * config.noise)
        };

        let mut w = data.index_axis_mut(Axis(0), i);
        for t in 0..WINDOW_LEN {
            let arg = std::f64::consts::TAU * gait * t as f64 * dt + phase;
            for a in 0..3 {
                let osc = p.acc_amp[a] * (arg.sin() + 0.4 * (2.0 * arg + a as f64).sin());
                w[[Channel::TotalAccX.index() + a, t]] =
                    g[a] + osc + acc_sigma * unit.sample(&mut rng);
                let rot = p.gyro_amp[a] * (arg + 0.7 * a as f64).cos();
                w[[Channel::BodyGyroX.index() + a, t]] = rot + gyro_sigma * unit.sample(&mut rng);
            }
        }
        let total: [Vec<f64>; 3] = std::array::from_fn(|a| w.row(a).to_vec());
        let (_, body) = split_gravity_body(
            [&total[0], &total[1], &total[2]],
            GRAVITY_CUTOFF_HZ,
            SAMPLE_RATE_HZ,
        )
        .map_err(|e| DatasetError::Shape(e.to_string()))?;
        for (a, b) in body.iter().enumerate() {
            for (t, v) in b.iter().enumerate() {
                w[[Channel::BodyAccX.index() + a, t]] = *v;
            }
        }
        labels.push(activity);
        subjects.push(subject as u8 + 1);
    }

    let inertial = InertialTensor::new(data)?;
    let catalog = FeatureCatalog::official();
    let mut features = compute_feature_matrix(&inertial, &catalog)
        .map_err(|e| DatasetError::Shape(e.to_string()))?;
    scale_columns(&mut features);
    let ids = (0..n)
        .map(|row| InstanceId {
            partition: Partition::Train,
            row,
        })
        .collect();
    DatasetBundle::new(
        inertial,
        FeatureMatrix::new(features, catalog.names())?,
        labels,
        subjects,
        ids,
    )
}

/// Min-max scales each column to `[-1, 1]`; constant columns become 0.
fn scale_columns(m: &mut Array2<f64>) {
    for mut col in m.columns_mut() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            col.mapv_inplace(|v| 2.0 * (v - lo) / (hi - lo) - 1.0);
        } else {
            col.fill(0.0);
        }
    }
}

/// Official name of a catalog entry: band-energy names drop their axis suffix
/// (the loader restores it from the order of appearance).
fn official_name(name: &str) -> &str {
    if name.contains("bandsEnergy()") {
        name.trim_end_matches(['X', 'Y', 'Z']).trim_end_matches('-')
    } else {
        name
    }
}

/// Writes `bundle` in the official directory layout under `root`. The first
/// `n_train` rows go to `train/`, the rest to `test/`.
pub fn write_official_layout(
    bundle: &DatasetBundle,
    root: &Path,
    n_train: usize,
) -> Result<(), DatasetError> {
    let n_train = n_train.min(bundle.n_total());
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| DatasetError::Io { path, source }
    };

    let mut names = String::new();
    for (i, name) in bundle.features().names().iter().enumerate() {
        writeln!(names, "{} {}", i + 1, official_name(name)).expect("string write");
    }
    fs::create_dir_all(root).map_err(io(root))?;
    fs::write(root.join("features.txt"), names).map_err(io(&root.join("features.txt")))?;
    let mut labels = String::new();
    for a in Activity::ALL {
        writeln!(labels, "{} {}", a.code(), a.name()).expect("string write");
    }
    fs::write(root.join("activity_labels.txt"), labels)
        .map_err(io(&root.join("activity_labels.txt")))?;

    for (partition, range) in [
        (Partition::Train, 0..n_train),
        (Partition::Test, n_train..bundle.n_total()),
    ] {
        let dir = root.join(partition.dir_name());
        let signals = dir.join("Inertial Signals");
        fs::create_dir_all(&signals).map_err(io(&signals))?;
        let tag = partition.dir_name();

        let rows = |f: &mut dyn FnMut(usize, &mut String)| {
            let mut out = String::new();
            for i in range.clone() {
                f(i, &mut out);
                out.push('\n');
            }
            out
        };
        let write = |path: &Path, text: String| -> Result<(), DatasetError> {
            let mut file = fs::File::create(path).map_err(io(path))?;
            file.write_all(text.as_bytes()).map_err(io(path))
        };
        let fmt_row = |out: &mut String, values: &mut dyn Iterator<Item = f64>| {
            for v in values {
                write!(out, " {v:.10e}").expect("string write");
            }
        };

        write(
            &dir.join(format!("X_{tag}.txt")),
            rows(&mut |i, out| {
                fmt_row(out, &mut bundle.features().values().row(i).iter().copied())
            }),
        )?;
        write(
            &dir.join(format!("y_{tag}.txt")),
            rows(&mut |i, out| write!(out, "{}", bundle.labels()[i].code()).expect("string write")),
        )?;
        write(
            &dir.join(format!("subject_{tag}.txt")),
            rows(&mut |i, out| write!(out, "{}", bundle.subjects()[i]).expect("string write")),
        )?;
        for channel in Channel::ALL {
            let view = bundle.inertial().channel(channel);
            write(
                &signals.join(format!("{}_{tag}.txt", channel.name())),
                rows(&mut |i, out| fmt_row(out, &mut view.row(i).iter().copied())),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_bundle;

    fn small() -> SyntheticConfig {
        SyntheticConfig {
            windows_per_class: 4,
            n_subjects: 3,
            ..Default::default()
        }
    }

    #[test]
    fn generator_is_deterministic_and_balanced() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_total(), 24);
        let report = a.verify();
        assert!(report.all_classes_present());
        assert!(a
            .features()
            .values()
            .iter()
            .all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(a.features().ncols(), 561);
    }

    #[test]
    fn body_plus_gravity_is_total() {
        let b = generate(&small()).unwrap();
        let w = b.inertial().window(0);
        // body is total minus a slowly varying gravity estimate
        let total_mean: f64 = w.row(0).mean().unwrap();
        let body_mean: f64 = w.row(3).mean().unwrap();
        assert!(body_mean.abs() < total_mean.abs());
    }

    #[test]
    fn official_layout_round_trips() {
        let bundle = generate(&small()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_official_layout(&bundle, dir.path(), 15).unwrap();
        let loaded = load_bundle(dir.path()).unwrap();
        assert_eq!(loaded.n_total(), bundle.n_total());
        assert_eq!(loaded.labels(), bundle.labels());
        assert_eq!(loaded.subjects(), bundle.subjects());
        assert_eq!(loaded.features().names(), bundle.features().names());
        assert_eq!(loaded.instance_ids()[15].partition, Partition::Test);
        let diff = (loaded.inertial().data() - bundle.inertial().data())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-9);
    }
}
