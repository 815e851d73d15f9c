//! Graph data model, perturbation algebra, dataset I/O, splits and metrics.

mod io;
mod metrics;
mod perturb;
mod sbm;
mod split;

pub use io::{load_graph, save_graph, LoadWarnings};
pub use metrics::classification_accuracy;
pub use perturb::{apply_perturbation, relax_perturbation, to_real};
pub use sbm::{synth_sbm, SbmParams};
pub use split::{split_nodes, SplitRatios};

use ndarray::Array2;

use crate::{Error, Result, Scalar};

/// Number of unordered node pairs, the length of every perturbation vector.
#[inline]
pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of the pair `(s, t)`, `s < t`, in row-major strict upper-triangle order.
#[inline]
pub fn pair_index(n: usize, s: usize, t: usize) -> usize {
    debug_assert!(s < t && t < n);
    s * n - s * (s + 1) / 2 + (t - s - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, index: usize) -> (usize, usize) {
    let mut s = 0;
    let mut start = 0;
    loop {
        let row = n - s - 1;
        if index < start + row {
            return (s, s + 1 + index - start);
        }
        start += row;
        s += 1;
    }
}

/// Iterator over `(s, t)` in pair-index order.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |s| (s + 1..n).map(move |t| (s, t)))
}

/// Node classification instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<S = f64> {
    adjacency: Array2<u8>,
    features: Array2<S>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl<S: Scalar> Graph<S> {
    pub fn new(
        adjacency: Array2<u8>,
        features: Array2<S>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::Dimension {
                what: "adjacency columns",
                expected: n,
                found: adjacency.ncols(),
            });
        }
        if features.nrows() != n {
            return Err(Error::Dimension {
                what: "feature rows",
                expected: n,
                found: features.nrows(),
            });
        }
        if labels.len() != n {
            return Err(Error::Dimension {
                what: "labels",
                expected: n,
                found: labels.len(),
            });
        }
        for s in 0..n {
            if adjacency[[s, s]] != 0 {
                return Err(Error::Domain(format!("self-loop at node {s}")));
            }
            for t in s + 1..n {
                let (a, b) = (adjacency[[s, t]], adjacency[[t, s]]);
                if a > 1 || b > 1 {
                    return Err(Error::Domain(format!("non-binary adjacency at ({s}, {t})")));
                }
                if a != b {
                    return Err(Error::Domain(format!("asymmetric adjacency at ({s}, {t})")));
                }
            }
        }
        if let Some((u, &y)) = labels.iter().enumerate().find(|(_, &y)| y >= num_classes) {
            return Err(Error::Domain(format!(
                "label {y} of node {u} outside [0, {num_classes})"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite feature".into()));
        }
        Ok(Self {
            adjacency,
            features,
            labels,
            num_classes,
        })
    }

    /// Builds a graph from an undirected edge list.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        features: Array2<S>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let mut adjacency = Array2::<u8>::zeros((n, n));
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) outside {n} nodes")));
            }
            if u != v {
                adjacency[[u, v]] = 1;
                adjacency[[v, u]] = 1;
            }
        }
        Self::new(adjacency, features, labels, num_classes)
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn num_pairs(&self) -> usize {
        num_pairs(self.num_nodes())
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn adjacency(&self) -> &Array2<u8> {
        &self.adjacency
    }

    pub fn features(&self) -> &Array2<S> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_edges(&self) -> usize {
        upper_pairs(self.num_nodes())
            .filter(|&(s, t)| self.adjacency[[s, t]] == 1)
            .count()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency.row(u).iter().map(|&a| a as usize).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        upper_pairs(self.num_nodes())
            .filter(|&(s, t)| self.adjacency[[s, t]] == 1)
            .collect()
    }
}

/// Disjoint train / validation / test node sets, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl DataSplit {
    pub fn new(
        n: usize,
        mut train: Vec<usize>,
        mut val: Vec<usize>,
        mut test: Vec<usize>,
    ) -> Result<Self> {
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        let mut seen = vec![false; n];
        for &u in train.iter().chain(&val).chain(&test) {
            if u >= n {
                return Err(Error::Domain(format!("split node {u} outside {n} nodes")));
            }
            if seen[u] {
                return Err(Error::Domain(format!("node {u} appears in two split masks")));
            }
            seen[u] = true;
        }
        if train.is_empty() {
            return Err(Error::Parameter("empty training set".into()));
        }
        Ok(Self { train, val, test })
    }
}

/// Edge-flip variable over the strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation<S = f64> {
    pub relaxed: Vec<S>,
    pub binary: Option<Vec<u8>>,
    pub budget: usize,
}

impl<S: Scalar> Perturbation<S> {
    pub const MASS_TOLERANCE: f64 = 1e-6;

    pub fn zeros(num_pairs: usize, budget: usize) -> Self {
        Self {
            relaxed: vec![S::zero(); num_pairs],
            binary: None,
            budget,
        }
    }

    pub fn mass(&self) -> f64 {
        self.relaxed.iter().map(|v| v.to_f64_lossy()).sum()
    }

    pub fn popcount(&self) -> Option<usize> {
        self.binary
            .as_ref()
            .map(|b| b.iter().map(|&v| v as usize).sum())
    }

    pub fn is_feasible(&self) -> bool {
        let box_ok = self
            .relaxed
            .iter()
            .all(|&v| v >= S::zero() && v <= S::one());
        let mass_ok = self.mass() <= self.budget as f64 + Self::MASS_TOLERANCE;
        let binary_ok = match &self.binary {
            None => true,
            Some(b) => {
                b.len() == self.relaxed.len()
                    && b.iter().all(|&v| v <= 1)
                    && self.popcount().unwrap_or(0) <= self.budget
            }
        };
        box_ok && mass_ok && binary_ok
    }

    /// Flipped pairs of the binary form.
    pub fn flipped_pairs(&self, n: usize) -> Vec<(usize, usize)> {
        match &self.binary {
            None => Vec::new(),
            Some(b) => upper_pairs(n)
                .zip(b)
                .filter(|(_, &f)| f == 1)
                .map(|(p, _)| p)
                .collect(),
        }
    }
}
