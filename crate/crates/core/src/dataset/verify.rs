use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Activity, Channel, DatasetBundle, N_SUBJECTS};

/// Summary of a loaded bundle: class and subject coverage plus value ranges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n_total: usize,
    pub n_features: usize,
    pub class_counts: Vec<(Activity, usize)>,
    pub empty_classes: Vec<Activity>,
    pub subject_counts: BTreeMap<u8, usize>,
    pub missing_subjects: Vec<u8>,
    /// `(min, max)` over the whole precomputed feature matrix.
    pub feature_range: Option<(f64, f64)>,
    /// Feature values outside `[-1, 1]`. Non-zero is a warning only.
    pub features_out_of_unit_range: usize,
    pub channel_ranges: Vec<(Channel, f64, f64)>,
}

impl VerificationReport {
    pub fn all_classes_present(&self) -> bool {
        self.empty_classes.is_empty()
    }

    pub fn all_subjects_present(&self) -> bool {
        self.missing_subjects.is_empty()
    }
}

pub fn verify_bundle(bundle: &DatasetBundle) -> VerificationReport {
    let mut counts = [0usize; Activity::COUNT];
    for a in bundle.labels() {
        counts[a.index()] += 1;
    }
    let class_counts: Vec<_> = Activity::ALL.into_iter().zip(counts).collect();
    let empty_classes = class_counts
        .iter()
        .filter(|(_, c)| *c == 0)
        .map(|(a, _)| *a)
        .collect();

    let mut subject_counts = BTreeMap::new();
    for &s in bundle.subjects() {
        *subject_counts.entry(s).or_insert(0) += 1;
    }
    let missing_subjects = (1..=N_SUBJECTS)
        .filter(|s| !subject_counts.contains_key(s))
        .collect();

    let values = bundle.features().values();
    let feature_range = min_max(values.iter().copied());
    let features_out_of_unit_range = values.iter().filter(|v| v.abs() > 1.0).count();

    let channel_ranges = Channel::ALL
        .into_iter()
        .filter_map(|c| {
            min_max(bundle.inertial().channel(c).iter().copied()).map(|(lo, hi)| (c, lo, hi))
        })
        .collect();

    VerificationReport {
        n_total: bundle.n_total(),
        n_features: bundle.features().ncols(),
        class_counts,
        empty_classes,
        subject_counts,
        missing_subjects,
        feature_range,
        features_out_of_unit_range,
        channel_ranges,
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances: {}", self.n_total)?;
        writeln!(f, "features:  {}", self.n_features)?;
        writeln!(
            f,
            "classes:   {} of {} present",
            Activity::COUNT - self.empty_classes.len(),
            Activity::COUNT
        )?;
        for (a, c) in &self.class_counts {
            let flag = if *c == 0 { "  <- EMPTY" } else { "" };
            writeln!(f, "  {:<20} {:>6}{flag}", a.name(), c)?;
        }
        writeln!(
            f,
            "subjects:  {} of {} present",
            self.subject_counts.len(),
            N_SUBJECTS
        )?;
        for (s, c) in &self.subject_counts {
            writeln!(f, "  subject {s:>2} {c:>6}")?;
        }
        if !self.missing_subjects.is_empty() {
            writeln!(f, "  missing subjects: {:?}", self.missing_subjects)?;
        }
        if let Some((lo, hi)) = self.feature_range {
            writeln!(f, "feature range: [{lo:.6}, {hi:.6}]")?;
        }
        if self.features_out_of_unit_range > 0 {
            writeln!(
                f,
                "warning: {} feature values outside [-1, 1]",
                self.features_out_of_unit_range
            )?;
        }
        for (c, lo, hi) in &self.channel_ranges {
            writeln!(f, "  {:<12} [{lo:.4}, {hi:.4}]", c.name())?;
        }
        Ok(())
    }
}
