//! Published reference results used as comparison rows and acceptance targets.

use crate::dataset::Channel;

/// Mean and population std over ten Monte Carlo iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

const fn s(mean: f64, std: f64) -> Stat {
    Stat { mean, std }
}

/// One row of the per-configuration result table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigRow {
    pub model: &'static str,
    /// `precomputed` or a channel name.
    pub input: &'static str,
    pub accuracy: Stat,
    pub f1: Stat,
    pub auc: Stat,
    pub train_time_s: f64,
}

const fn row(
    model: &'static str,
    input: &'static str,
    acc: Stat,
    f1: Stat,
    auc: Stat,
    t: f64,
) -> ConfigRow {
    ConfigRow {
        model,
        input,
        accuracy: acc,
        f1,
        auc,
        train_time_s: t,
    }
}

pub const CONFIG_ROWS: [ConfigRow; 11] = [
    row(
        "gbdt",
        "precomputed",
        s(0.9896, 0.0022),
        s(0.9896, 0.0022),
        s(0.9999, 0.0),
        26.9,
    ),
    row(
        "minirocket",
        "precomputed",
        s(0.9881, 0.0031),
        s(0.9886, 0.0029),
        s(0.9932, 0.0018),
        80.1,
    ),
    row(
        "minirocket",
        "total_acc_x",
        s(0.9040, 0.0050),
        s(0.9088, 0.0051),
        s(0.9454, 0.0030),
        73.6,
    ),
    row(
        "minirocket",
        "total_acc_y",
        s(0.9350, 0.0054),
        s(0.9388, 0.0051),
        s(0.9633, 0.0031),
        73.8,
    ),
    row(
        "minirocket",
        "total_acc_z",
        s(0.8721, 0.0039),
        s(0.8801, 0.0036),
        s(0.9282, 0.0022),
        73.8,
    ),
    row(
        "minirocket",
        "body_gyro_x",
        s(0.8184, 0.0073),
        s(0.8249, 0.0073),
        s(0.8951, 0.0043),
        74.1,
    ),
    row(
        "minirocket",
        "body_gyro_y",
        s(0.7940, 0.0052),
        s(0.8065, 0.0049),
        s(0.8844, 0.0029),
        74.0,
    ),
    row(
        "minirocket",
        "body_gyro_z",
        s(0.8046, 0.0056),
        s(0.8157, 0.0058),
        s(0.8902, 0.0033),
        74.5,
    ),
    row(
        "minirocket",
        "body_acc_x",
        s(0.8111, 0.0089),
        s(0.8232, 0.0086),
        s(0.8945, 0.0051),
        73.1,
    ),
    row(
        "minirocket",
        "body_acc_y",
        s(0.7791, 0.0057),
        s(0.7922, 0.0055),
        s(0.8765, 0.0033),
        73.1,
    ),
    row(
        "minirocket",
        "body_acc_z",
        s(0.7399, 0.0072),
        s(0.7565, 0.0069),
        s(0.8550, 0.0040),
        73.0,
    ),
];

pub fn config_row(model: &str, input: &str) -> Option<&'static ConfigRow> {
    CONFIG_ROWS
        .iter()
        .find(|r| r.model == model && r.input == input)
}

pub fn channel_row(channel: Channel) -> Option<&'static ConfigRow> {
    config_row("minirocket", channel.name())
}

/// One row of the cross-method comparison; `None` marks values not reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodRow {
    pub method: &'static str,
    pub accuracy: f64,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
}

const fn m(method: &'static str, accuracy: f64, f1: Option<f64>, auc: Option<f64>) -> MethodRow {
    MethodRow {
        method,
        accuracy,
        f1,
        auc,
    }
}

pub const METHOD_ROWS: [MethodRow; 11] = [
    m("XGBoost", 0.990, Some(0.990), Some(0.999)),
    m("Minirocket", 0.988, Some(0.989), Some(0.993)),
    m("SGD", 0.446, Some(0.427), Some(0.664)),
    m("Naive Bayes", 0.736, Some(0.747), Some(0.734)),
    m("Decision Tree", 0.748, Some(0.746), Some(0.850)),
    m("kNN", 0.707, Some(0.706), Some(0.895)),
    m("Random Forest", 0.818, Some(0.818), Some(0.966)),
    m("Neural Network", 0.856, Some(0.857), Some(0.974)),
    m("SVM", 0.878, Some(0.872), Some(0.988)),
    m("LSTM", 0.900, None, None),
    m("CNN", 0.975, None, None),
];
