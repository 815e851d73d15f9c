use ndarray::Array2;

use super::NoiseSpec;
use crate::gcn::{GcnParams, Predictor};
use crate::graph::num_pairs;
use crate::{Error, Result, Scalar};

/// Largest number of node pairs [`exact_smoothed_probs`] will enumerate.
pub const MAX_ENUMERABLE_PAIRS: usize = 20;

/// Exact smoothed class probabilities for every node, by enumerating all
/// `2^m` flip masks weighted by `β^{kept} (1−β)^{flipped}`.
pub fn exact_smoothed_probs<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<u8>,
    features: &Array2<S>,
    spec: &NoiseSpec,
) -> Result<Array2<f64>> {
    let n = adjacency.nrows();
    let m = num_pairs(n);
    if m > MAX_ENUMERABLE_PAIRS {
        return Err(Error::Capacity(format!(
            "{m} node pairs exceed the enumeration cap of {MAX_ENUMERABLE_PAIRS}"
        )));
    }
    let predictor = Predictor::new(params, features)?;
    let beta = spec.beta();
    let mut probs = Array2::<f64>::zeros((n, params.num_classes()));
    let mut noisy = adjacency.clone();
    let pairs: Vec<(usize, usize)> = crate::graph::upper_pairs(n).collect();
    for mask in 0u64..(1u64 << m) {
        let flipped = mask.count_ones() as i32;
        let weight = beta.powi(m as i32 - flipped) * (1.0 - beta).powi(flipped);
        if weight == 0.0 {
            continue;
        }
        for (bit, &(s, t)) in pairs.iter().enumerate() {
            let v = adjacency[[s, t]] ^ ((mask >> bit) & 1) as u8;
            noisy[[s, t]] = v;
            noisy[[t, s]] = v;
        }
        for (u, c) in predictor.predict(&noisy)?.into_iter().enumerate() {
            probs[[u, c]] += weight;
        }
    }
    Ok(probs)
}

/// Exact smoothed class probabilities of one node.
pub fn exact_smoothed_prob<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<u8>,
    features: &Array2<S>,
    node: usize,
    spec: &NoiseSpec,
) -> Result<Vec<f64>> {
    if node >= adjacency.nrows() {
        return Err(Error::Domain(format!("node {node} outside graph")));
    }
    Ok(exact_smoothed_probs(params, adjacency, features, spec)?
        .row(node)
        .to_vec())
}
