//! Classification metrics over zero-based class indices.

use ndarray::ArrayView2;

use super::EvalError;

fn check(y_true: &[usize], y_pred_len: usize) -> Result<(), EvalError> {
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    if y_true.len() != y_pred_len {
        return Err(EvalError::LengthMismatch {
            expected: y_true.len(),
            got: y_pred_len,
        });
    }
    Ok(())
}

pub fn accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64, EvalError> {
    check(y_true, y_pred.len())?;
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Per-class F1 for classes `0..n_classes`. A class with no true positives
/// scores 0, which covers the zero-division cases.
pub fn per_class_f1(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<Vec<f64>, EvalError> {
    check(y_true, y_pred.len())?;
    let mut tp = vec![0usize; n_classes];
    let mut pred = vec![0usize; n_classes];
    let mut actual = vec![0usize; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(EvalError::LabelOutOfRange(t.max(p)));
        }
        actual[t] += 1;
        pred[p] += 1;
        if t == p {
            tp[t] += 1;
        }
    }
    Ok((0..n_classes)
        .map(|c| {
            if tp[c] == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / (pred[c] + actual[c]) as f64
            }
        })
        .collect())
}

/// Unweighted mean of per-class F1 over all `n_classes`, absent classes included.
pub fn macro_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64, EvalError> {
    let f = per_class_f1(y_true, y_pred, n_classes)?;
    Ok(f.iter().sum::<f64>() / n_classes as f64)
}

/// Mann-Whitney AUC of `pos` against `neg` with midranks for ties.
fn binary_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid = (i + j + 2) as f64 / 2.0;
        rank_sum += mid * all[i..=j].iter().filter(|e| e.1).count() as f64;
        i = j + 1;
    }
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    (rank_sum - np * (np + 1.0) / 2.0) / (np * nn)
}

/// One-vs-one AUC: for every pair of classes present in `y_true`, the mean of
/// the two directed AUCs (each using its own class's score column), averaged
/// over pairs.
pub fn ovo_auc(y_true: &[usize], scores: ArrayView2<'_, f64>) -> Result<f64, EvalError> {
    check(y_true, scores.nrows())?;
    let k = scores.ncols();
    if let Some(&bad) = y_true.iter().find(|&&t| t >= k) {
        return Err(EvalError::LabelOutOfRange(bad));
    }
    let present: Vec<usize> = (0..k).filter(|c| y_true.contains(c)).collect();
    if present.len() < 2 {
        return Err(EvalError::SingleClass);
    }
    let column = |class: usize, col: usize| -> Vec<f64> {
        y_true
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == class)
            .map(|(i, _)| scores[[i, col]])
            .collect()
    };
    let mut total = 0.0;
    let mut pairs = 0;
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let ab = binary_auc(&column(a, a), &column(b, a));
            let ba = binary_auc(&column(b, b), &column(a, b));
            total += (ab + ba) / 2.0;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use proptest::prelude::*;

    /// Pair-counting AUC oracle.
    fn brute_auc(pos: &[f64], neg: &[f64]) -> f64 {
        let mut s = 0.0;
        for p in pos {
            for n in neg {
                if p > n {
                    s += 1.0;
                } else if p == n {
                    s += 0.5;
                }
            }
        }
        s / (pos.len() * neg.len()) as f64
    }

    fn brute_ovo(y: &[usize], scores: &Array2<f64>) -> f64 {
        let k = scores.ncols();
        let mut total = 0.0;
        let mut pairs = 0;
        for a in 0..k {
            for b in a + 1..k {
                let sel = |c: usize, col: usize| -> Vec<f64> {
                    (0..y.len())
                        .filter(|&i| y[i] == c)
                        .map(|i| scores[[i, col]])
                        .collect()
                };
                if sel(a, a).is_empty() || sel(b, a).is_empty() {
                    continue;
                }
                total +=
                    0.5 * (brute_auc(&sel(a, a), &sel(b, a)) + brute_auc(&sel(b, b), &sel(a, b)));
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    /// F1 from an explicit confusion table.
    #[allow(clippy::needless_range_loop)]
    fn brute_macro_f1(y: &[usize], p: &[usize], k: usize) -> f64 {
        let mut table = vec![vec![0usize; k]; k];
        for (&t, &q) in y.iter().zip(p) {
            table[t][q] += 1;
        }
        let mut sum = 0.0;
        for c in 0..k {
            let tp = table[c][c] as f64;
            let fp: f64 = (0..k).filter(|&r| r != c).map(|r| table[r][c] as f64).sum();
            let fn_: f64 = (0..k).filter(|&q| q != c).map(|q| table[c][q] as f64).sum();
            let prec = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let rec = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            sum += if prec + rec > 0.0 {
                2.0 * prec * rec / (prec + rec)
            } else {
                0.0
            };
        }
        sum / k as f64
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 2, 3], &[0, 1, 0, 0]).unwrap(), 0.5);
        assert!(matches!(accuracy(&[], &[]), Err(EvalError::Empty)));
        assert!(matches!(
            accuracy(&[1], &[1, 2]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn macro_f1_hand_example() {
        let y = [0, 0, 1, 1, 2, 2];
        let p = [0, 1, 1, 1, 2, 2];
        let f = per_class_f1(&y, &p, 3).unwrap();
        assert!((f[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((f[1] - 0.8).abs() < 1e-12);
        assert_eq!(f[2], 1.0);
        assert!((macro_f1(&y, &p, 3).unwrap() - 0.8222).abs() < 1e-4);
    }

    #[test]
    fn absent_class_drags_macro_f1() {
        let y = [0, 1, 2, 3, 4];
        assert_eq!(macro_f1(&y, &y, 5).unwrap(), 1.0);
        assert!((macro_f1(&y, &y, 6).unwrap() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn auc_extremes() {
        let y = [0, 0, 1, 1, 2, 2];
        let perfect = Array2::from_shape_fn((6, 3), |(i, c)| if y[i] == c { 1.0 } else { 0.0 });
        assert_eq!(ovo_auc(&y, perfect.view()).unwrap(), 1.0);
        let flat = Array2::from_elem((6, 3), 0.3);
        assert_eq!(ovo_auc(&y, flat.view()).unwrap(), 0.5);
        assert!(matches!(
            ovo_auc(&[1, 1], flat.slice(ndarray::s![0..2, ..])),
            Err(EvalError::SingleClass)
        ));
    }

    #[test]
    fn auc_hand_example_matches_pair_counting() {
        let y = [0, 1, 2, 0, 1, 2];
        let s = Array2::from_shape_vec(
            (6, 3),
            vec![
                0.7, 0.2, 0.1, //
                0.3, 0.3, 0.4, //
                0.1, 0.5, 0.4, //
                0.4, 0.4, 0.2, //
                0.2, 0.6, 0.2, //
                0.3, 0.3, 0.4,
            ],
        )
        .unwrap();
        assert!((ovo_auc(&y, s.view()).unwrap() - brute_ovo(&y, &s)).abs() < 1e-12);
    }

    fn labels_and_scores() -> impl Strategy<Value = (Vec<usize>, Array2<f64>, Vec<usize>)> {
        (2usize..=6, 2usize..40).prop_flat_map(|(k, n)| {
            (
                proptest::collection::vec(0..k, n),
                proptest::collection::vec(0..k, n),
                // a coarse grid makes ties common
                proptest::collection::vec((0i32..8).prop_map(|v| v as f64 / 4.0 - 1.0), n * k),
            )
                .prop_map(move |(y, p, s)| (y, Array2::from_shape_vec((n, k), s).unwrap(), p))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn metrics_match_brute_force((y, scores, pred) in labels_and_scores()) {
            let k = scores.ncols();
            let hits = y.iter().zip(&pred).filter(|(a, b)| a == b).count() as f64;
            prop_assert!((accuracy(&y, &pred).unwrap() - hits / y.len() as f64).abs() < 1e-12);
            prop_assert!((macro_f1(&y, &pred, k).unwrap() - brute_macro_f1(&y, &pred, k)).abs() < 1e-12);
            let distinct = { let mut d = y.clone(); d.sort(); d.dedup(); d.len() };
            if distinct >= 2 {
                let fast = ovo_auc(&y, scores.view()).unwrap();
                prop_assert!((fast - brute_ovo(&y, &scores)).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&fast));
                let affine = scores.mapv(|v| 2.0 * v + 1.0);
                let cubed = scores.mapv(|v| v * v * v);
                prop_assert!((ovo_auc(&y, affine.view()).unwrap() - fast).abs() < 1e-12);
                prop_assert!((ovo_auc(&y, cubed.view()).unwrap() - fast).abs() < 1e-12);
            }
        }
    }
}
