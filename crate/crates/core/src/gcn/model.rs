use ndarray::{Array2, ArrayView1};
use rand::Rng;

use super::normalize::Propagation;
use crate::{rng, Error, Result, Scalar};

/// Two-layer GCN weights: `W1` is `d × h`, `W2` is `h × C`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnParams<S = f64> {
    pub w1: Array2<S>,
    pub w2: Array2<S>,
}

impl<S: Scalar> GcnParams<S> {
    /// Glorot-uniform initialisation from `seed`.
    pub fn init(input_dim: usize, hidden_dim: usize, num_classes: usize, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let mut glorot = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || {
                S::of(rng.random_range(-limit..limit))
            })
        };
        let w1 = glorot(input_dim, hidden_dim);
        let w2 = glorot(hidden_dim, num_classes);
        Self { w1, w2 }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.w2.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.w1.iter().chain(self.w2.iter()).all(|v| v.is_finite())
    }

    pub(crate) fn check(&self, n: usize, features: &Array2<S>, adjacency_dim: usize) -> Result<()> {
        if self.w2.nrows() != self.w1.ncols() {
            return Err(Error::Dimension {
                what: "W2 rows",
                expected: self.w1.ncols(),
                found: self.w2.nrows(),
            });
        }
        if features.ncols() != self.w1.nrows() {
            return Err(Error::Dimension {
                what: "feature columns",
                expected: self.w1.nrows(),
                found: features.ncols(),
            });
        }
        if features.nrows() != n || adjacency_dim != n {
            return Err(Error::Dimension {
                what: "adjacency size",
                expected: features.nrows(),
                found: adjacency_dim,
            });
        }
        Ok(())
    }
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct Activations<S> {
    pub xw: Array2<S>,
    pub pre: Array2<S>,
    pub hidden: Array2<S>,
    pub hw: Array2<S>,
    pub logits: Array2<S>,
}

fn finite<S: Scalar>(m: &Array2<S>, stage: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric { stage })
    }
}

pub(crate) fn activations<S: Scalar>(
    params: &GcnParams<S>,
    prop: &Propagation<S>,
    features: &Array2<S>,
) -> Result<Activations<S>> {
    let xw = features.dot(&params.w1);
    let pre = prop.matrix.dot(&xw);
    finite(&pre, "layer 1")?;
    let hidden = pre.mapv(|v| v.max(S::zero()));
    let hw = hidden.dot(&params.w2);
    let logits = prop.matrix.dot(&hw);
    finite(&logits, "layer 2")?;
    Ok(Activations {
        xw,
        pre,
        hidden,
        hw,
        logits,
    })
}

/// `Â · relu(Â X W1) · W2` on a (possibly relaxed) real adjacency.
pub fn forward<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<S>,
    features: &Array2<S>,
) -> Result<Array2<S>> {
    params.check(features.nrows(), features, adjacency.nrows())?;
    let prop = Propagation::new(adjacency);
    Ok(activations(params, &prop, features)?.logits)
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax<S: Scalar>(row: ArrayView1<S>) -> usize {
    let mut best = 0;
    for (c, &z) in row.iter().enumerate().skip(1) {
        if z > row[best] {
            best = c;
        }
    }
    best
}

/// Prediction over binary graphs. The first-layer projection `X·W1` does not
/// depend on the graph and is computed once; propagation walks neighbour
/// lists, so repeated predictions on many noisy graphs stay cheap.
#[derive(Debug, Clone)]
pub struct Predictor<'a, S> {
    params: &'a GcnParams<S>,
    xw: Array2<S>,
}

impl<'a, S: Scalar> Predictor<'a, S> {
    pub fn new(params: &'a GcnParams<S>, features: &Array2<S>) -> Result<Self> {
        params.check(features.nrows(), features, features.nrows())?;
        Ok(Self {
            params,
            xw: features.dot(&params.w1),
        })
    }

    fn propagate(neighbors: &[Vec<usize>], scale: &[S], input: &Array2<S>) -> Array2<S> {
        let mut out = Array2::<S>::zeros(input.raw_dim());
        for (i, nbrs) in neighbors.iter().enumerate() {
            let mut row = out.row_mut(i);
            row.scaled_add(scale[i] * scale[i], &input.row(i));
            for &j in nbrs {
                row.scaled_add(scale[i] * scale[j], &input.row(j));
            }
        }
        out
    }

    pub fn logits(&self, adjacency: &Array2<u8>) -> Result<Array2<S>> {
        let n = self.xw.nrows();
        if adjacency.nrows() != n || adjacency.ncols() != n {
            return Err(Error::Dimension {
                what: "adjacency size",
                expected: n,
                found: adjacency.nrows(),
            });
        }
        self.logits_from_lists(&neighbor_lists(adjacency))
    }

    /// Logits from ascending neighbour lists, one per node.
    pub fn logits_from_lists(&self, neighbors: &[Vec<usize>]) -> Result<Array2<S>> {
        let n = self.xw.nrows();
        if neighbors.len() != n {
            return Err(Error::Dimension {
                what: "neighbour lists",
                expected: n,
                found: neighbors.len(),
            });
        }
        let scale: Vec<S> = neighbors
            .iter()
            .map(|nb| S::one() / S::of((nb.len() + 1) as f64).sqrt())
            .collect();
        let pre = Self::propagate(neighbors, &scale, &self.xw);
        finite(&pre, "layer 1")?;
        let hidden = pre.mapv(|v| v.max(S::zero()));
        let hw = hidden.dot(&self.params.w2);
        let logits = Self::propagate(neighbors, &scale, &hw);
        finite(&logits, "layer 2")?;
        Ok(logits)
    }

    pub fn predict(&self, adjacency: &Array2<u8>) -> Result<Vec<usize>> {
        Ok(self.logits(adjacency)?.rows().into_iter().map(argmax).collect())
    }

    /// Prediction on the graph whose neighbour lists are `base` with the
    /// given `(s, t)` pairs toggled.
    pub fn predict_toggled(&self, base: &[Vec<usize>], pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
        let mut lists = base.to_vec();
        for &(s, t) in pairs {
            for (u, v) in [(s, t), (t, s)] {
                let list = &mut lists[u];
                match list.binary_search(&v) {
                    Ok(i) => {
                        list.remove(i);
                    }
                    Err(i) => list.insert(i, v),
                }
            }
        }
        Ok(self.logits_from_lists(&lists)?.rows().into_iter().map(argmax).collect())
    }
}

/// Ascending neighbour list of every node of a binary adjacency.
pub fn neighbor_lists(adjacency: &Array2<u8>) -> Vec<Vec<usize>> {
    adjacency
        .rows()
        .into_iter()
        .map(|r| r.iter().enumerate().filter(|(_, &a)| a == 1).map(|(j, _)| j).collect())
        .collect()
}

/// Argmax of the forward logits on a binary graph, lowest class on ties.
pub fn predict_all<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<u8>,
    features: &Array2<S>,
) -> Result<Vec<usize>> {
    Predictor::new(params, features)?.predict(adjacency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_perturbation, num_pairs, relax_perturbation, to_real};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn random_instance(n: usize, d: usize, seed: u64) -> (Array2<u8>, Array2<f64>) {
        let mut rng = rng::seeded(seed);
        let mut a = Array2::<u8>::zeros((n, n));
        for s in 0..n {
            for t in s + 1..n {
                if rng.random::<f64>() < 0.4 {
                    a[[s, t]] = 1;
                    a[[t, s]] = 1;
                }
            }
        }
        let x = Array2::from_shape_simple_fn((n, d), || rng.random_range(-1.0..1.0));
        (a, x)
    }

    #[test]
    fn zero_output_layer_predicts_class_zero() {
        let (a, x) = random_instance(6, 3, 1);
        let mut p = GcnParams::<f64>::init(3, 4, 3, 2);
        p.w2.fill(0.0);
        let z = forward(&p, &to_real(&a), &x).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        assert_eq!(predict_all(&p, &a, &x).unwrap(), vec![0; 6]);
    }

    #[test]
    fn single_node_is_plain_mlp() {
        let p = GcnParams::<f64>::init(2, 3, 2, 4);
        let x = array![[0.7, -1.2]];
        let z = forward(&p, &Array2::zeros((1, 1)), &x).unwrap();
        let expect = x.dot(&p.w1).mapv(|v: f64| v.max(0.0)).dot(&p.w2);
        assert_eq!(z, expect);
    }

    #[test]
    fn predictor_matches_dense_argmax() {
        for seed in 0..5 {
            let (a, x) = random_instance(12, 4, seed);
            let p = GcnParams::<f64>::init(4, 8, 3, seed + 100);
            let dense = forward(&p, &to_real(&a), &x).unwrap();
            let sparse = Predictor::new(&p, &x).unwrap().logits(&a).unwrap();
            for (u, v) in dense.iter().zip(sparse.iter()) {
                assert_abs_diff_eq!(u, v, epsilon = 1e-12);
            }
            let by_row: Vec<usize> = dense.rows().into_iter().map(argmax).collect();
            assert_eq!(predict_all(&p, &a, &x).unwrap(), by_row);
        }
    }

    #[test]
    fn toggled_lists_match_xor_graph() {
        let (a, x) = random_instance(9, 3, 6);
        let p = GcnParams::<f64>::init(3, 5, 3, 8);
        let predictor = Predictor::new(&p, &x).unwrap();
        let base = neighbor_lists(&a);
        let mut rng = rng::seeded(11);
        for _ in 0..20 {
            let flips: Vec<u8> = (0..num_pairs(9)).map(|_| (rng.random::<f64>() < 0.3) as u8).collect();
            let pairs: Vec<(usize, usize)> = (0..flips.len())
                .filter(|&k| flips[k] == 1)
                .map(|k| crate::graph::pair_at(9, k))
                .collect();
            let dense = predictor.logits(&apply_perturbation(&a, &flips).unwrap()).unwrap();
            let by_row: Vec<usize> = dense.rows().into_iter().map(argmax).collect();
            assert_eq!(predictor.predict_toggled(&base, &pairs).unwrap(), by_row);
        }
    }

    #[test]
    fn relaxed_binary_equals_xor_forward() {
        let (a, x) = random_instance(7, 3, 9);
        let p = GcnParams::<f64>::init(3, 5, 2, 3);
        let mut rng = rng::seeded(10);
        let flips: Vec<u8> = (0..num_pairs(7)).map(|_| rng.random::<bool>() as u8).collect();
        let relaxed: Vec<f64> = flips.iter().map(|&f| f as f64).collect();
        let via_xor = forward(&p, &to_real(&apply_perturbation(&a, &flips).unwrap()), &x).unwrap();
        let via_relax = forward(&p, &relax_perturbation(&a, &relaxed).unwrap(), &x).unwrap();
        assert_eq!(via_xor, via_relax);
    }

    #[test]
    fn single_pair_change_matches_recompute() {
        let (a, x) = random_instance(6, 3, 4);
        let p = GcnParams::<f64>::init(3, 4, 2, 5);
        let mut delta = vec![0.0; num_pairs(6)];
        delta[3] = 0.4;
        let relaxed = relax_perturbation(&a, &delta).unwrap();
        let (s, t) = crate::graph::pair_at(6, 3);
        let mut manual = to_real::<f64>(&a);
        let v = if a[[s, t]] == 1 { 0.6 } else { 0.4 };
        manual[[s, t]] = v;
        manual[[t, s]] = v;
        assert_eq!(forward(&p, &relaxed, &x).unwrap(), forward(&p, &manual, &x).unwrap());
    }

    #[test]
    fn argmax_shift_invariant_and_tie_break() {
        let row = array![1.0, 3.0, 3.0];
        assert_eq!(argmax(row.view()), 1);
        let shifted = row.mapv(|v| v + 17.5);
        assert_eq!(argmax(shifted.view()), 1);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let p = GcnParams::<f64>::init(3, 4, 2, 0);
        let x = Array2::zeros((4, 2));
        assert!(matches!(
            forward(&p, &Array2::zeros((4, 4)), &x),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn non_finite_reports_layer() {
        let mut p = GcnParams::<f64>::init(2, 3, 2, 0);
        p.w2[[0, 0]] = f64::INFINITY;
        let x = array![[1.0, 1.0], [1.0, 1.0]];
        let err = forward(&p, &Array2::zeros((2, 2)), &x).unwrap_err();
        assert!(matches!(err, Error::Numeric { stage: "layer 2" }) || matches!(err, Error::Numeric { .. }));
    }
}
