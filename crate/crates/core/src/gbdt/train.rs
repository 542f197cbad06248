//! Depth-wise growth of one regression tree on fixed gradients and hessians.

use ndarray::ArrayView2;
use rayon::prelude::*;

use super::binning::BinnedMatrix;
use super::tree::{leaf_weight, split_gain, Node, Tree};
use super::{SplitMethod, TrainConfig};

/// Gradient and hessian sums plus sample counts per bin of one feature.
#[derive(Debug, Clone)]
struct FeatureHist {
    g: Vec<f64>,
    h: Vec<f64>,
    n: Vec<u32>,
}

impl FeatureHist {
    fn build(bins: &[u16], n_bins: usize, samples: &[usize], grad: &[f64], hess: &[f64]) -> Self {
        let mut out = Self {
            g: vec![0.0; n_bins],
            h: vec![0.0; n_bins],
            n: vec![0; n_bins],
        };
        for &i in samples {
            let b = bins[i] as usize;
            out.g[b] += grad[i];
            out.h[b] += hess[i];
            out.n[b] += 1;
        }
        out
    }

    /// Parent minus sibling; bins left empty are reset to exact zeros.
    fn subtract(&self, other: &Self) -> Self {
        let n: Vec<u32> = self.n.iter().zip(&other.n).map(|(a, b)| a - b).collect();
        let diff = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter()
                .zip(b)
                .zip(&n)
                .map(|((x, y), &c)| if c == 0 { 0.0 } else { x - y })
                .collect()
        };
        Self {
            g: diff(&self.g, &other.g),
            h: diff(&self.h, &other.h),
            n,
        }
    }
}

/// Best split of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub feature: usize,
    pub threshold: f64,
    pub default_left: bool,
    pub gain: f64,
}

impl Candidate {
    /// Total order used for ties: higher gain, then lower feature, then lower
    /// threshold.
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.gain > o.gain
                    || (self.gain == o.gain
                        && (self.feature < o.feature
                            || (self.feature == o.feature && self.threshold < o.threshold)))
            }
        }
    }
}

/// Node totals.
#[derive(Debug, Clone, Copy)]
struct Totals {
    g: f64,
    h: f64,
    n: usize,
}

struct Scorer<'a> {
    config: &'a TrainConfig,
    totals: Totals,
}

impl Scorer<'_> {
    /// Scores both missing directions for a partition of the non-missing
    /// samples; default-left wins ties.
    fn consider(
        &self,
        best: &mut Option<Candidate>,
        feature: usize,
        threshold: f64,
        (gl, hl, nl): (f64, f64, usize),
        (gm, hm, nm): (f64, f64, usize),
    ) {
        let c = self.config;
        let t = self.totals;
        let mut local: Option<Candidate> = None;
        for default_left in [true, false] {
            let (gl, hl, nl) = if default_left {
                (gl + gm, hl + hm, nl + nm)
            } else {
                (gl, hl, nl)
            };
            let (gr, hr, nr) = (t.g - gl, t.h - hl, t.n - nl);
            if nl == 0 || nr == 0 || hl < c.min_child_weight || hr < c.min_child_weight {
                continue;
            }
            let gain = split_gain(gl, hl, gr, hr, c.lambda_l2, c.alpha_l1, c.gamma);
            if gain > 0.0 && local.is_none_or(|l| gain > l.gain) {
                local = Some(Candidate {
                    feature,
                    threshold,
                    default_left,
                    gain,
                });
            }
        }
        if let Some(l) = local {
            if l.beats(best) {
                *best = Some(l);
            }
        }
    }
}

pub(crate) struct TreeBuilder<'a> {
    pub x: ArrayView2<'a, f64>,
    pub binned: Option<&'a BinnedMatrix>,
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub config: &'a TrainConfig,
}

impl TreeBuilder<'_> {
    pub fn build(&self, samples: Vec<usize>) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let hist = match self.config.method {
            SplitMethod::Histogram => Some(self.histograms(&samples)),
            SplitMethod::Exact => None,
        };
        self.grow(&mut tree, samples, hist, 0);
        tree
    }

    fn totals(&self, samples: &[usize]) -> Totals {
        let mut t = Totals {
            g: 0.0,
            h: 0.0,
            n: samples.len(),
        };
        for &i in samples {
            t.g += self.grad[i];
            t.h += self.hess[i];
        }
        t
    }

    fn histograms(&self, samples: &[usize]) -> Vec<FeatureHist> {
        let binned = self.binned.expect("histogram mode has bins");
        binned
            .columns
            .par_iter()
            .zip(&binned.features)
            .map(|(col, fb)| FeatureHist::build(col, fb.n_bins(), samples, self.grad, self.hess))
            .collect()
    }

    /// Appends the subtree for `samples` and returns its node index.
    fn grow(
        &self,
        tree: &mut Tree,
        samples: Vec<usize>,
        hist: Option<Vec<FeatureHist>>,
        depth: usize,
    ) -> usize {
        let totals = self.totals(&samples);
        let id = tree.nodes.len();
        let c = self.config;
        let leaf = Node::Leaf {
            weight: c.eta * leaf_weight(totals.g, totals.h, c.lambda_l2, c.alpha_l1),
        };
        tree.nodes.push(leaf);
        if depth >= c.max_depth || samples.len() < 2 {
            return id;
        }
        let best = match &hist {
            Some(h) => self.best_histogram_split(h, totals),
            None => self.best_exact_split(&samples, totals),
        };
        let Some(split) = best else {
            return id;
        };

        let (left, right): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| {
            let v = self.x[[i, split.feature]];
            if v.is_nan() {
                split.default_left
            } else {
                v < split.threshold
            }
        });
        let (hl, hr) = match hist {
            Some(parent) => {
                let small_is_left = left.len() <= right.len();
                let small = self.histograms(if small_is_left { &left } else { &right });
                let large: Vec<FeatureHist> = parent
                    .iter()
                    .zip(&small)
                    .map(|(p, s)| p.subtract(s))
                    .collect();
                if small_is_left {
                    (Some(small), Some(large))
                } else {
                    (Some(large), Some(small))
                }
            }
            None => (None, None),
        };
        let l = self.grow(tree, left, hl, depth + 1);
        let r = self.grow(tree, right, hr, depth + 1);
        tree.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            default_left: split.default_left,
            left: l,
            right: r,
            gain: split.gain,
        };
        id
    }

    fn best_histogram_split(&self, hist: &[FeatureHist], totals: Totals) -> Option<Candidate> {
        let binned = self.binned.expect("histogram mode has bins");
        let scorer = Scorer {
            config: self.config,
            totals,
        };
        let per_feature: Vec<Option<Candidate>> = hist
            .par_iter()
            .enumerate()
            .map(|(f, fh)| {
                let fb = &binned.features[f];
                let m = fb.missing_bin();
                let missing = (fh.g[m], fh.h[m], fh.n[m] as usize);
                let mut best = None;
                let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
                for (b, &cut) in fb.cuts.iter().enumerate() {
                    if b > 0 && fh.n[b] == 0 {
                        // same partition as the previous, lower cut
                        continue;
                    }
                    gl += fh.g[b];
                    hl += fh.h[b];
                    nl += fh.n[b] as usize;
                    scorer.consider(&mut best, f, cut, (gl, hl, nl), missing);
                }
                best
            })
            .collect();
        reduce(per_feature)
    }

    fn best_exact_split(&self, samples: &[usize], totals: Totals) -> Option<Candidate> {
        let scorer = Scorer {
            config: self.config,
            totals,
        };
        let per_feature: Vec<Option<Candidate>> = (0..self.x.ncols())
            .into_par_iter()
            .map(|f| {
                let mut present: Vec<(f64, usize)> = Vec::with_capacity(samples.len());
                let mut missing = (0.0, 0.0, 0usize);
                for &i in samples {
                    let v = self.x[[i, f]];
                    if v.is_nan() {
                        missing.0 += self.grad[i];
                        missing.1 += self.hess[i];
                        missing.2 += 1;
                    } else {
                        present.push((v, i));
                    }
                }
                present.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut best = None;
                let (mut gl, mut hl) = (0.0, 0.0);
                for k in 0..present.len() {
                    let (v, i) = present[k];
                    gl += self.grad[i];
                    hl += self.hess[i];
                    if let Some(&(next, _)) = present.get(k + 1) {
                        if next > v {
                            let thr = v + (next - v) / 2.0;
                            let thr = if thr > v { thr } else { next };
                            scorer.consider(&mut best, f, thr, (gl, hl, k + 1), missing);
                        }
                    }
                }
                best
            })
            .collect();
        reduce(per_feature)
    }
}

fn reduce(per_feature: Vec<Option<Candidate>>) -> Option<Candidate> {
    let mut best = None;
    for c in per_feature.into_iter().flatten() {
        if c.beats(&best) {
            best = Some(c);
        }
    }
    best
}
