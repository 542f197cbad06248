//! Deterministic fixtures shared by the benchmarks.

use harbench::dataset::synthetic::{generate, SyntheticConfig};
use harbench::DatasetBundle;
use ndarray::Array2;

/// Synthetic bundle with `windows_per_class` windows of each activity.
pub fn bundle(windows_per_class: usize) -> DatasetBundle {
    generate(&SyntheticConfig {
        windows_per_class,
        n_subjects: 10,
        noise: 1.0,
        seed: 5,
    })
    .expect("synthetic config is valid")
}

/// One raw channel of `bundle` as an `n × 128` matrix.
pub fn channel(bundle: &DatasetBundle, name: &str) -> Array2<f64> {
    bundle
        .select_channel(name)
        .expect("channel name is canonical")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_have_expected_shapes() {
        let b = super::bundle(2);
        assert_eq!(b.n_total(), 12);
        assert_eq!(super::channel(&b, "total_acc_y").dim(), (12, 128));
        assert_eq!(b.features().ncols(), 561);
    }
}
