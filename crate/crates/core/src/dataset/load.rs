use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{s, Array2, Array3};

use super::{
    Activity, Channel, DatasetBundle, DatasetError, FeatureMatrix, InertialTensor, InstanceId,
    Partition, N_CHANNELS, N_SUBJECTS, WINDOW_LEN,
};

struct PartitionData {
    features: Array2<f64>,
    labels: Vec<Activity>,
    subjects: Vec<u8>,
    inertial: Array3<f64>,
}

/// Load the official UCI HAR layout under `root` and pool both partitions,
/// train rows first.
pub fn load_bundle(root: impl AsRef<Path>) -> Result<DatasetBundle, DatasetError> {
    let root = root.as_ref();
    let names = read_feature_names(root)?;
    let train = read_partition(root, Partition::Train, names.len())?;
    let test = read_partition(root, Partition::Test, names.len())?;

    let n_train = train.labels.len();
    let n_test = test.labels.len();
    let features = ndarray::concatenate(
        ndarray::Axis(0),
        &[train.features.view(), test.features.view()],
    )
    .expect("column counts validated");
    let inertial = ndarray::concatenate(
        ndarray::Axis(0),
        &[train.inertial.view(), test.inertial.view()],
    )
    .expect("window shapes validated");

    let out_of_range = features.iter().filter(|v| v.abs() > 1.0).count();
    if out_of_range > 0 {
        log::warn!(
            "{out_of_range} precomputed feature values lie outside [-1, 1]; \
             the files are probably not the normalized official set"
        );
    }

    let instance_ids = (0..n_train)
        .map(|row| InstanceId {
            partition: Partition::Train,
            row,
        })
        .chain((0..n_test).map(|row| InstanceId {
            partition: Partition::Test,
            row,
        }))
        .collect();

    let mut labels = train.labels;
    labels.extend(test.labels);
    let mut subjects = train.subjects;
    subjects.extend(test.subjects);

    DatasetBundle::new(
        InertialTensor::new(inertial)?,
        FeatureMatrix::new(features, names)?,
        labels,
        subjects,
        instance_ids,
    )
}

/// Reads `features.txt` (`<index> <name>` per line).
///
/// The official file repeats the `bandsEnergy()` names once per axis without an
/// axis suffix. Repeated names get `-X`, `-Y`, `-Z` appended in order of
/// appearance (`-#k` beyond the third) so the catalog stays unique.
fn read_feature_names(root: &Path) -> Result<Vec<String>, DatasetError> {
    let (label, text) = read_text(root, "features.txt")?;
    let raw: Vec<String> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let line = line.trim();
            match line.split_once(char::is_whitespace) {
                Some((_, name)) => Ok(name.trim().to_string()),
                None => Err(DatasetError::Parse {
                    file: label.clone(),
                    row: i + 1,
                    column: 2,
                    token: line.to_string(),
                }),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut totals: HashMap<&str, usize> = HashMap::new();
    for name in &raw {
        *totals.entry(name.as_str()).or_default() += 1;
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let names = raw
        .iter()
        .map(|name| {
            if totals[name.as_str()] == 1 {
                return name.clone();
            }
            let k = seen.entry(name.as_str()).or_default();
            *k += 1;
            match *k {
                1 => format!("{name}-X"),
                2 => format!("{name}-Y"),
                3 => format!("{name}-Z"),
                k => format!("{name}-#{k}"),
            }
        })
        .collect();
    Ok(names)
}

fn read_partition(
    root: &Path,
    partition: Partition,
    n_features: usize,
) -> Result<PartitionData, DatasetError> {
    let dir = partition.dir_name();
    let x_rel = format!("{dir}/X_{dir}.txt");
    let y_rel = format!("{dir}/y_{dir}.txt");
    let s_rel = format!("{dir}/subject_{dir}.txt");

    let features = read_matrix(root, &x_rel, Some(n_features))?;
    let labels = read_integers(root, &y_rel)?
        .into_iter()
        .enumerate()
        .map(|(row, v)| {
            Activity::from_code(v).ok_or_else(|| DatasetError::BadLabel {
                file: y_rel.clone(),
                row: row + 1,
                value: v,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let subjects = read_integers(root, &s_rel)?
        .into_iter()
        .enumerate()
        .map(|(row, v)| {
            if (1..=N_SUBJECTS as i64).contains(&v) {
                Ok(v as u8)
            } else {
                Err(DatasetError::BadSubject {
                    file: s_rel.clone(),
                    row: row + 1,
                    value: v,
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = labels.len();
    if features.nrows() != n || subjects.len() != n {
        return Err(DatasetError::RowCountMismatch(format!(
            "{x_rel}: {} rows, {y_rel}: {n} rows, {s_rel}: {} rows",
            features.nrows(),
            subjects.len()
        )));
    }

    let mut inertial = Array3::zeros((n, N_CHANNELS, WINDOW_LEN));
    for channel in Channel::ALL {
        let rel = format!("{dir}/Inertial Signals/{}_{dir}.txt", channel.name());
        let m = read_matrix(root, &rel, Some(WINDOW_LEN))?;
        if m.nrows() != n {
            return Err(DatasetError::RowCountMismatch(format!(
                "{rel}: {} rows, {y_rel}: {n} rows",
                m.nrows()
            )));
        }
        inertial.slice_mut(s![.., channel.index(), ..]).assign(&m);
    }

    Ok(PartitionData {
        features,
        labels,
        subjects,
        inertial,
    })
}

fn read_text(root: &Path, rel: &str) -> Result<(String, String), DatasetError> {
    let path: PathBuf = root.join(rel);
    if !path.is_file() {
        return Err(DatasetError::MissingFile(rel.to_string()));
    }
    let text = fs::read_to_string(&path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok((rel.to_string(), text))
}

/// Parses a whitespace-delimited real matrix. Runs of spaces count as a
/// single delimiter; blank lines are skipped.
fn read_matrix(
    root: &Path,
    rel: &str,
    expected_cols: Option<usize>,
) -> Result<Array2<f64>, DatasetError> {
    let (file, text) = read_text(root, rel)?;
    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut cols = expected_cols;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let start = values.len();
        for (c, token) in line.split_whitespace().enumerate() {
            let v: f64 = token.parse().map_err(|_| DatasetError::Parse {
                file: file.clone(),
                row: rows + 1,
                column: c + 1,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteValue {
                    file: file.clone(),
                    row: rows + 1,
                    column: c + 1,
                });
            }
            values.push(v);
        }
        let found = values.len() - start;
        let expected = *cols.get_or_insert(found);
        if found != expected {
            return Err(DatasetError::ColumnCountMismatch {
                file: file.clone(),
                row: rows + 1,
                found,
                expected,
            });
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Ok(Array2::from_shape_vec((rows, cols), values).expect("row lengths validated"))
}

fn read_integers(root: &Path, rel: &str) -> Result<Vec<i64>, DatasetError> {
    let (file, text) = read_text(root, rel)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(row, line)| {
            let token = line.trim();
            // Label files occasionally carry a float rendering such as "5.0000000e+00".
            token
                .parse::<i64>()
                .ok()
                .or_else(|| {
                    token
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.fract() == 0.0 && v.is_finite())
                        .map(|v| v as i64)
                })
                .ok_or_else(|| DatasetError::Parse {
                    file: file.clone(),
                    row: row + 1,
                    column: 1,
                    token: token.to_string(),
                })
        })
        .collect()
}
