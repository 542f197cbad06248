//! In-memory representation of the UCI HAR smartphone dataset.
//!
//! The official layout ships a fixed train/test split. The Monte Carlo protocol
//! repartitions instances at random, so [`load_bundle`] pools both partitions
//! (train rows first) into a single immutable [`DatasetBundle`]. Every instance
//! keeps its origin as an [`InstanceId`] so drill-downs can be traced back to a
//! row in the shipped files.

mod load;
pub mod synthetic;
mod verify;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use load::load_bundle;
pub use verify::{verify_bundle, VerificationReport};

/// Samples per window (2.56 s at 50 Hz).
pub const WINDOW_LEN: usize = 128;
/// Inertial channels per window.
pub const N_CHANNELS: usize = 9;
/// Sampling rate of the inertial signals.
pub const SAMPLE_RATE_HZ: f64 = 50.0;
/// Number of volunteers in the official dataset.
pub const N_SUBJECTS: u8 = 30;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("row count mismatch: {0}")]
    RowCountMismatch(String),
    #[error("{file}: row {row} has {found} columns, expected {expected}")]
    ColumnCountMismatch {
        file: String,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{file}: cannot parse {token:?} at row {row}, column {column}")]
    Parse {
        file: String,
        row: usize,
        column: usize,
        token: String,
    },
    #[error("{file}: non-finite value at row {row}, column {column}")]
    NonFiniteValue {
        file: String,
        row: usize,
        column: usize,
    },
    #[error("{file}: label {value} at row {row} is outside 1..6")]
    BadLabel {
        file: String,
        row: usize,
        value: i64,
    },
    #[error("{file}: subject {value} at row {row} is outside 1..30")]
    BadSubject {
        file: String,
        row: usize,
        value: i64,
    },
    #[error("unknown channel {0:?}")]
    UnknownChannel(String),
    #[error("duplicate feature name {0:?}")]
    DuplicateFeatureName(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// One of the six recorded activities. The discriminant order follows the
/// official label codes 1..6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Activity {
    Walking,
    WalkingUpstairs,
    WalkingDownstairs,
    Sitting,
    Standing,
    Laying,
}

impl Activity {
    pub const COUNT: usize = 6;
    pub const ALL: [Activity; 6] = [
        Activity::Walking,
        Activity::WalkingUpstairs,
        Activity::WalkingDownstairs,
        Activity::Sitting,
        Activity::Standing,
        Activity::Laying,
    ];

    /// Official label code, 1..=6.
    pub fn code(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_code(code: i64) -> Option<Self> {
        if (1..=6).contains(&code) {
            Some(Self::ALL[(code - 1) as usize])
        } else {
            None
        }
    }

    /// Zero-based class index used by the classifiers and metrics.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Activity::Walking => "WALKING",
            Activity::WalkingUpstairs => "WALKING_UPSTAIRS",
            Activity::WalkingDownstairs => "WALKING_DOWNSTAIRS",
            Activity::Sitting => "SITTING",
            Activity::Standing => "STANDING",
            Activity::Laying => "LAYING",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown activity {s:?}"))
    }
}

/// The nine inertial channels in canonical tensor order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    TotalAccX,
    TotalAccY,
    TotalAccZ,
    BodyAccX,
    BodyAccY,
    BodyAccZ,
    BodyGyroX,
    BodyGyroY,
    BodyGyroZ,
}

impl Channel {
    pub const ALL: [Channel; N_CHANNELS] = [
        Channel::TotalAccX,
        Channel::TotalAccY,
        Channel::TotalAccZ,
        Channel::BodyAccX,
        Channel::BodyAccY,
        Channel::BodyAccZ,
        Channel::BodyGyroX,
        Channel::BodyGyroY,
        Channel::BodyGyroZ,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical name, which is also the file stem in `Inertial Signals/`.
    pub fn name(self) -> &'static str {
        match self {
            Channel::TotalAccX => "total_acc_x",
            Channel::TotalAccY => "total_acc_y",
            Channel::TotalAccZ => "total_acc_z",
            Channel::BodyAccX => "body_acc_x",
            Channel::BodyAccY => "body_acc_y",
            Channel::BodyAccZ => "body_acc_z",
            Channel::BodyGyroX => "body_gyro_x",
            Channel::BodyGyroY => "body_gyro_y",
            Channel::BodyGyroZ => "body_gyro_z",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| DatasetError::UnknownChannel(s.to_string()))
    }
}

/// Windowed raw signals, `n × 9 × 128`.
#[derive(Debug, Clone, PartialEq)]
pub struct InertialTensor {
    data: Array3<f64>,
    sample_rate_hz: f64,
}

impl InertialTensor {
    pub fn new(data: Array3<f64>) -> Result<Self, DatasetError> {
        let (_, c, l) = data.dim();
        if c != N_CHANNELS || l != WINDOW_LEN {
            return Err(DatasetError::Shape(format!(
                "inertial tensor must be n x {N_CHANNELS} x {WINDOW_LEN}, got {:?}",
                data.dim()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let row = pos / (c * l);
            return Err(DatasetError::NonFiniteValue {
                file: "inertial tensor".into(),
                row: row + 1,
                column: pos % l + 1,
            });
        }
        Ok(Self {
            data,
            sample_rate_hz: SAMPLE_RATE_HZ,
        })
    }

    pub fn len(&self) -> usize {
        self.data.dim().0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    /// The `9 × 128` window of instance `i`.
    pub fn window(&self, i: usize) -> ArrayView2<'_, f64> {
        self.data.index_axis(Axis(0), i)
    }

    /// All instances of one channel as an `n × 128` view.
    pub fn channel(&self, channel: Channel) -> ArrayView2<'_, f64> {
        self.data.index_axis(Axis(1), channel.index())
    }
}

/// Dense `n × d` feature matrix with a parallel list of unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Array2<f64>,
    names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(values: Array2<f64>, names: Vec<String>) -> Result<Self, DatasetError> {
        if values.ncols() != names.len() {
            return Err(DatasetError::Shape(format!(
                "{} feature columns but {} names",
                values.ncols(),
                names.len()
            )));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(DatasetError::DuplicateFeatureName(name.clone()));
            }
        }
        Ok(Self { values, names })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Test,
}

impl Partition {
    pub fn dir_name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Test => "test",
        }
    }
}

/// Origin of a pooled instance: which shipped partition and which (0-based) row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceId {
    pub partition: Partition,
    pub row: usize,
}

/// Pooled dataset: inertial windows, precomputed features, labels and subjects,
/// all with the same instance count.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    inertial: InertialTensor,
    features: FeatureMatrix,
    labels: Vec<Activity>,
    subjects: Vec<u8>,
    instance_ids: Vec<InstanceId>,
}

impl DatasetBundle {
    pub fn new(
        inertial: InertialTensor,
        features: FeatureMatrix,
        labels: Vec<Activity>,
        subjects: Vec<u8>,
        instance_ids: Vec<InstanceId>,
    ) -> Result<Self, DatasetError> {
        let n = labels.len();
        if inertial.len() != n
            || features.nrows() != n
            || subjects.len() != n
            || instance_ids.len() != n
        {
            return Err(DatasetError::RowCountMismatch(format!(
                "labels {n}, inertial {}, features {}, subjects {}, ids {}",
                inertial.len(),
                features.nrows(),
                subjects.len(),
                instance_ids.len()
            )));
        }
        if let Some((row, &s)) = subjects
            .iter()
            .enumerate()
            .find(|(_, &s)| !(1..=N_SUBJECTS).contains(&s))
        {
            return Err(DatasetError::BadSubject {
                file: "subjects".into(),
                row: row + 1,
                value: s as i64,
            });
        }
        Ok(Self {
            inertial,
            features,
            labels,
            subjects,
            instance_ids,
        })
    }

    pub fn n_total(&self) -> usize {
        self.labels.len()
    }

    pub fn inertial(&self) -> &InertialTensor {
        &self.inertial
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[Activity] {
        &self.labels
    }

    /// Labels as zero-based class indices.
    pub fn label_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|a| a.index()).collect()
    }

    pub fn subjects(&self) -> &[u8] {
        &self.subjects
    }

    pub fn instance_ids(&self) -> &[InstanceId] {
        &self.instance_ids
    }

    /// Copy of one named channel for every instance, `n × 128`.
    pub fn select_channel(&self, channel: &str) -> Result<Array2<f64>, DatasetError> {
        let channel: Channel = channel.parse()?;
        Ok(self.inertial.channel(channel).to_owned())
    }

    pub fn verify(&self) -> VerificationReport {
        verify_bundle(self)
    }
}
