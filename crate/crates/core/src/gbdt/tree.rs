//! Regression trees stored as a node arena; node 0 is the root.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        /// Samples with `x < threshold` go left.
        threshold: f64,
        /// Direction taken by missing values.
        default_left: bool,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf {
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(weight: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { weight }],
        }
    }

    /// Index of the leaf reached by `row`.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    default_left,
                    left,
                    right,
                    ..
                } => {
                    let x = row[*feature];
                    let go_left = if x.is_nan() {
                        *default_left
                    } else {
                        x < *threshold
                    };
                    i = if go_left { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { weight } => weight,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// `(feature, gain)` of every split.
    pub fn split_gains(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, gain, .. } => Some((*feature, *gain)),
            Node::Leaf { .. } => None,
        })
    }
}

/// `sign(g) · max(|g| − α, 0)`.
pub fn soft_threshold(g: f64, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        g
    } else {
        g.signum() * (g.abs() - alpha).max(0.0)
    }
}

/// Optimal leaf value `−T(G) / (H + λ)` before shrinkage.
pub fn leaf_weight(g: f64, h: f64, lambda: f64, alpha: f64) -> f64 {
    -soft_threshold(g, alpha) / (h + lambda)
}

/// Objective reduction score `T(G)² / (H + λ)` of one node.
pub fn node_score(g: f64, h: f64, lambda: f64, alpha: f64) -> f64 {
    let t = soft_threshold(g, alpha);
    t * t / (h + lambda)
}

/// `½[score(L) + score(R) − score(L ∪ R)] − γ`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, alpha: f64, gamma: f64) -> f64 {
    0.5 * (node_score(gl, hl, lambda, alpha) + node_score(gr, hr, lambda, alpha)
        - node_score(gl + gr, hl + hr, lambda, alpha))
        - gamma
}
