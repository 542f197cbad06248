//! Seeded train/test partitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

/// How instances are assigned to the training side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    /// Uniform shuffle of all instances.
    #[default]
    Random,
    /// Shuffle within each class so class proportions carry over.
    Stratified,
    /// Whole subjects go to one side only.
    SubjectDisjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub iteration: usize,
    pub train_fraction: f64,
    pub n_total: usize,
    pub seed: u64,
}

impl SplitPlan {
    pub fn new(iteration: usize, train_fraction: f64, n_total: usize) -> Self {
        Self {
            iteration,
            train_fraction,
            n_total,
            seed: iteration as u64,
        }
    }

    fn n_train(&self, n: usize) -> usize {
        // the epsilon keeps products like 0.7 · 10 from flooring to 6
        ((self.train_fraction * n as f64) + 1e-9).floor() as usize
    }
}

/// Classic Fisher–Yates: for `i` from the end, swap with a uniform `j ≤ i`.
/// Written out so the permutation does not depend on library internals.
pub fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

fn validate(plan: &SplitPlan) -> Result<(), EvalError> {
    if !(plan.train_fraction > 0.0 && plan.train_fraction < 1.0) {
        return Err(EvalError::InvalidConfig(format!(
            "train_fraction must be in (0, 1), got {}",
            plan.train_fraction
        )));
    }
    if plan.n_total < 2 {
        return Err(EvalError::DegenerateSplit {
            n_train: 0,
            n_test: plan.n_total,
        });
    }
    Ok(())
}

fn non_degenerate(
    train: Vec<usize>,
    test: Vec<usize>,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if train.is_empty() || test.is_empty() {
        return Err(EvalError::DegenerateSplit {
            n_train: train.len(),
            n_test: test.len(),
        });
    }
    Ok((train, test))
}

/// Fisher–Yates shuffle of `0..n` seeded by `plan.seed`; the first
/// `⌊fraction · n⌋` indices train.
pub fn split(plan: &SplitPlan) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    validate(plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut order: Vec<usize> = (0..plan.n_total).collect();
    fisher_yates(&mut order, &mut rng);
    let test = order.split_off(plan.n_train(plan.n_total));
    non_degenerate(order, test)
}

/// Per-class shuffles in class order, each contributing `⌊fraction · n_c⌋`.
pub fn split_stratified(
    plan: &SplitPlan,
    labels: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    validate(plan)?;
    check_len(plan, labels.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        fisher_yates(&mut members, &mut rng);
        let rest = members.split_off(plan.n_train(members.len()));
        train.extend(members);
        test.extend(rest);
    }
    non_degenerate(train, test)
}

/// Shuffles subject ids and fills the training side subject by subject until
/// it holds at least `fraction · n` instances.
pub fn split_by_subject(
    plan: &SplitPlan,
    subjects: &[u8],
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    validate(plan)?;
    check_len(plan, subjects.len())?;
    let mut ids: Vec<u8> = subjects.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    fisher_yates(&mut ids, &mut rng);
    let target = plan.train_fraction * subjects.len() as f64;
    let mut in_train = [false; 256];
    let mut count = 0usize;
    for &s in &ids {
        if count as f64 >= target {
            break;
        }
        in_train[s as usize] = true;
        count += subjects.iter().filter(|&&x| x == s).count();
    }
    let (train, test) = (0..subjects.len()).partition(|&i| in_train[subjects[i] as usize]);
    non_degenerate(train, test)
}

fn check_len(plan: &SplitPlan, got: usize) -> Result<(), EvalError> {
    if got != plan.n_total {
        return Err(EvalError::LengthMismatch {
            expected: plan.n_total,
            got,
        });
    }
    Ok(())
}
