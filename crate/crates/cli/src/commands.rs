//! Subcommand implementations. Each returns the text to print on success.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use harbench::dataset::load_bundle;
use harbench::evaluation::REPORT_SCHEMA_VERSION;
use harbench::reference::{config_row, METHOD_ROWS};
use harbench::signal::{compute_feature_matrix, DecisionConstants};
use harbench::{run_mccv, Activity, ConfusionMatrix, EvalReport, FeatureCatalog};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ResolvedExperiment};
use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Compute(format!("{}: {e}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

pub fn verify(root: &Path) -> Result<String, CliError> {
    if !root.is_dir() {
        return Err(CliError::Validation(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let bundle = load_bundle(root)?;
    let report = bundle.verify();
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {}", root.display());
    let _ = writeln!(out, "instances: {}", report.n_total);
    let _ = writeln!(out, "features: {}", report.n_features);
    let present = report.class_counts.iter().filter(|(_, c)| *c > 0).count();
    let _ = writeln!(out, "classes: {present}");
    for (a, c) in &report.class_counts {
        let _ = writeln!(out, "  {:<20} {c}", a.name());
    }
    let _ = writeln!(out, "subjects: {}", report.subject_counts.len());
    if !report.missing_subjects.is_empty() {
        let _ = writeln!(
            out,
            "  warning: subjects without instances: {:?}",
            report.missing_subjects
        );
    }
    if let Some((lo, hi)) = report.feature_range {
        let _ = writeln!(out, "feature range: [{lo:.6}, {hi:.6}]");
    }
    if report.features_out_of_unit_range > 0 {
        let _ = writeln!(
            out,
            "  warning: {} feature values outside [-1, 1]",
            report.features_out_of_unit_range
        );
    }
    for (ch, lo, hi) in &report.channel_ranges {
        let _ = writeln!(out, "  {:<12} [{lo:.4}, {hi:.4}]", ch.name());
    }
    if !report.empty_classes.is_empty() {
        let names: Vec<&str> = report.empty_classes.iter().map(|a| a.name()).collect();
        return Err(CliError::DataDefect(format!(
            "{out}classes without instances: {}",
            names.join(", ")
        )));
    }
    Ok(out)
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub library_version: String,
    /// Resolved configuration; usable verbatim as a `--config` file.
    pub config: ExperimentConfig,
    /// Split and model seed of every iteration.
    pub seeds: Vec<u64>,
}

/// Percent view with activity-name headers.
pub fn confusion_csv(m: &ConfusionMatrix) -> Result<String, CliError> {
    let fmt = |e: csv::Error| CliError::Compute(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["true\\predicted".to_string()];
    header.extend(Activity::ALL.iter().map(|a| a.name().to_string()));
    w.write_record(&header).map_err(fmt)?;
    for (a, row) in Activity::ALL.iter().zip(m.percent()) {
        let mut rec = vec![a.name().to_string()];
        rec.extend(row.iter().map(|v| format!("{v:.6}")));
        w.write_record(&rec).map_err(fmt)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Compute(e.to_string()))
}

/// Text heatmap of the percent matrix.
fn confusion_text(m: &ConfusionMatrix) -> String {
    const SHORT: [&str; 6] = ["WALK", "UP", "DOWN", "SIT", "STAND", "LAY"];
    let mut out = format!("{:>7}", "");
    for s in SHORT {
        let _ = write!(out, "{s:>8}");
    }
    out.push('\n');
    for (s, row) in SHORT.iter().zip(m.percent()) {
        let _ = write!(out, "{s:>7}");
        for v in row {
            let _ = write!(out, "{v:>8.2}");
        }
        out.push('\n');
    }
    out
}

pub fn run(config: &ExperimentConfig) -> Result<String, CliError> {
    let ResolvedExperiment {
        dataset_root,
        output_dir,
        model,
        input,
        mccv,
    } = config.resolve()?;
    fs::create_dir_all(&output_dir).map_err(|e| {
        CliError::Validation(format!("cannot create {}: {e}", output_dir.display()))
    })?;
    let probe = output_dir.join(".write-probe");
    fs::write(&probe, b"")
        .and_then(|_| fs::remove_file(&probe))
        .map_err(|e| {
            CliError::Validation(format!("{} is not writable: {e}", output_dir.display()))
        })?;

    let bundle = load_bundle(&dataset_root)?;
    let report =
        run_mccv(&bundle, &model, input, &mccv).map_err(|e| CliError::Compute(e.to_string()))?;

    write(
        &output_dir.join("report.json"),
        &report
            .to_json()
            .map_err(|e| CliError::Compute(e.to_string()))?,
    )?;
    write(
        &output_dir.join("report.csv"),
        &report
            .to_csv()
            .map_err(|e| CliError::Compute(e.to_string()))?,
    )?;
    write(
        &output_dir.join("confusion.csv"),
        &confusion_csv(&report.confusion)?,
    )?;
    let manifest = RunManifest {
        schema_version: REPORT_SCHEMA_VERSION,
        library_version: harbench::VERSION.to_string(),
        config: config.clone(),
        seeds: report.iterations.iter().map(|r| r.seed).collect(),
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Compute(e.to_string()))?;
    write(&output_dir.join("run-manifest.json"), &manifest_json)?;

    let mut out = format!(
        "{} on {}: accuracy {:.4}±{:.4}  F1 {:.4}±{:.4}  AUC {:.4}±{:.4}  training {:.1}s\n",
        report.model,
        report.input,
        report.accuracy.mean,
        report.accuracy.std,
        report.macro_f1.mean,
        report.macro_f1.std,
        report.auc.mean,
        report.auc.std,
        report.train_time_s.mean
    );
    out.push_str(&confusion_text(&report.confusion));
    let _ = writeln!(out, "artifacts written to {}", output_dir.display());
    Ok(out)
}

/// Loads `dir/report.json`, checking the schema version before the layout.
pub fn read_report(dir: &Path) -> Result<EvalReport, CliError> {
    let path = dir.join("report.json");
    let text = fs::read_to_string(&path).map_err(|_| CliError::MissingReport(path.clone()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::DataDefect(format!("{}: {e}", path.display())))?;
    let found = value.get("schema_version").and_then(|v| v.as_u64());
    if found != Some(REPORT_SCHEMA_VERSION as u64) {
        return Err(CliError::SchemaVersionMismatch {
            path,
            expected: REPORT_SCHEMA_VERSION,
            found,
        });
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::DataDefect(format!("{}: {e}", path.display())))
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub accuracy: f64,
    pub accuracy_std: Option<f64>,
    pub f1: Option<f64>,
    pub f1_std: Option<f64>,
    pub auc: Option<f64>,
    pub auc_std: Option<f64>,
    pub train_time_s: Option<f64>,
    /// Published accuracy for the same model and input, when one exists.
    pub paper_accuracy: Option<f64>,
    pub source: String,
}

pub fn comparison_rows(reports: &[(PathBuf, EvalReport)]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|(dir, r)| ComparisonRow {
            method: format!("{} ({})", r.model, r.input),
            accuracy: r.accuracy.mean,
            accuracy_std: Some(r.accuracy.std),
            f1: Some(r.macro_f1.mean),
            f1_std: Some(r.macro_f1.std),
            auc: Some(r.auc.mean),
            auc_std: Some(r.auc.std),
            train_time_s: Some(r.train_time_s.mean),
            paper_accuracy: config_row(&r.model, &r.input).map(|c| c.accuracy.mean),
            source: format!("measured: {}", dir.display()),
        })
        .collect();
    rows.extend(METHOD_ROWS.iter().map(|m| ComparisonRow {
        method: m.method.to_string(),
        accuracy: m.accuracy,
        accuracy_std: None,
        f1: m.f1,
        f1_std: None,
        auc: m.auc,
        auc_std: None,
        train_time_s: None,
        paper_accuracy: None,
        source: "source: paper".to_string(),
    }));
    // stable: measured rows stay ahead of equal published ones
    rows.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy));
    rows
}

fn cell(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{m:.4}±{s:.4}"),
        (Some(m), None) => format!("{m:.3}"),
        _ => "-".to_string(),
    }
}

const HEADER: [&str; 8] = [
    "Rank",
    "Method",
    "Accuracy",
    "F1",
    "AUC",
    "Training Time (sec)",
    "Paper Accuracy",
    "Source",
];

fn row_cells(rank: usize, r: &ComparisonRow) -> [String; 8] {
    [
        rank.to_string(),
        r.method.clone(),
        cell(Some(r.accuracy), r.accuracy_std),
        cell(r.f1, r.f1_std),
        cell(r.auc, r.auc_std),
        r.train_time_s.map_or("-".into(), |t| format!("{t:.1}")),
        r.paper_accuracy.map_or("-".into(), |a| format!("{a:.4}")),
        r.source.clone(),
    ]
}

pub fn comparison_markdown(rows: &[ComparisonRow]) -> String {
    let mut out = format!("| {} |\n", HEADER.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(HEADER.len())));
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!("| {} |\n", row_cells(i + 1, r).join(" | ")));
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> Result<String, CliError> {
    let fmt = |e: csv::Error| CliError::Compute(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(fmt)?;
    for (i, r) in rows.iter().enumerate() {
        w.write_record(row_cells(i + 1, r)).map_err(fmt)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Compute(e.to_string()))
}

/// Reads run directories without modifying them; tables go to `out` if given.
pub fn report(dirs: &[PathBuf], out: Option<&Path>) -> Result<String, CliError> {
    if dirs.is_empty() {
        return Err(CliError::Validation(
            "report needs at least one run directory".into(),
        ));
    }
    let reports = dirs
        .iter()
        .map(|d| read_report(d).map(|r| (d.clone(), r)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = comparison_rows(&reports);
    let md = comparison_markdown(&rows);
    if let Some(out) = out {
        fs::create_dir_all(out).map_err(io_err(out))?;
        write(&out.join("comparison.md"), &md)?;
        write(&out.join("comparison.csv"), &comparison_csv(&rows)?)?;
    }
    Ok(md)
}

/// Recomputes the feature matrix from the raw windows.
pub fn features_compute(root: &Path, out: &Path) -> Result<String, CliError> {
    if !root.is_dir() {
        return Err(CliError::Validation(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let bundle = load_bundle(root)?;
    let catalog = FeatureCatalog::official();
    let values = compute_feature_matrix(bundle.inertial(), &catalog)
        .map_err(|e| CliError::Compute(e.to_string()))?;

    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let file = fs::File::create(out).map_err(io_err(out))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let fmt = |e: csv::Error| CliError::Compute(e.to_string());
    w.write_record(catalog.names()).map_err(fmt)?;
    for row in values.rows() {
        // shortest representation that round-trips
        w.write_record(row.iter().map(|v| format!("{v:?}")))
            .map_err(fmt)?;
    }
    w.flush().map_err(io_err(out))?;

    let sidecar = out.with_extension("constants.json");
    let constants = serde_json::to_string_pretty(&DecisionConstants::default())
        .map_err(|e| CliError::Compute(e.to_string()))?;
    write(&sidecar, &constants)?;
    Ok(format!(
        "wrote {} × {} features to {}\nconstants: {}\n",
        values.nrows(),
        values.ncols(),
        out.display(),
        sidecar.display()
    ))
}
