use ndarray::{Array1, Array2, Axis};

use crate::Scalar;

/// Symmetric normalized propagation matrix `D̃^{-1/2}(A + I)D̃^{-1/2}` together
/// with the inverse square-root degrees used by the backward pass.
#[derive(Debug, Clone)]
pub struct Propagation<S> {
    pub matrix: Array2<S>,
    pub inv_sqrt_degree: Array1<S>,
}

impl<S: Scalar> Propagation<S> {
    pub fn new(adjacency: &Array2<S>) -> Self {
        let n = adjacency.nrows();
        let degree = adjacency.sum_axis(Axis(1)) + S::one();
        let inv_sqrt_degree = degree.mapv(|d| S::one() / d.sqrt());
        let mut matrix = adjacency.clone();
        for i in 0..n {
            matrix[[i, i]] = matrix[[i, i]] + S::one();
        }
        for ((i, j), v) in matrix.indexed_iter_mut() {
            *v = *v / (degree[i] * degree[j]).sqrt();
        }
        Self {
            matrix,
            inv_sqrt_degree,
        }
    }
}

/// Accepts relaxed (real-valued) adjacency as well as binary.
pub fn normalize_adjacency<S: Scalar>(adjacency: &Array2<S>) -> Array2<S> {
    Propagation::new(adjacency).matrix
}
