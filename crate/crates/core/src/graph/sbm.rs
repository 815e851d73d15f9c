use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{upper_pairs, Graph};
use crate::{rng, Error, Result, Scalar};

/// Stochastic block model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub k: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    pub seed: u64,
}

impl SbmParams {
    /// Standard deviation of the feature noise.
    pub const FEATURE_NOISE: f64 = 0.5;

    /// Expected edge count and its variance.
    pub fn edge_moments(&self) -> (f64, f64) {
        let size = (self.n / self.k) as f64;
        let within = self.k as f64 * size * (size - 1.0) / 2.0;
        let total = (self.n * (self.n - 1) / 2) as f64;
        let across = total - within;
        let mean = within * self.p_in + across * self.p_out;
        let var = within * self.p_in * (1.0 - self.p_in) + across * self.p_out * (1.0 - self.p_out);
        (mean, var)
    }
}

/// Samples an SBM graph. Community `c` holds nodes `c·n/k .. (c+1)·n/k`; the
/// label is the community and features are a one-hot community indicator
/// plus Gaussian noise.
pub fn synth_sbm<S: Scalar>(params: &SbmParams) -> Result<Graph<S>> {
    let SbmParams {
        n,
        k,
        p_in,
        p_out,
        feature_dim,
        seed,
    } = *params;
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::Parameter(format!(
            "SBM needs 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::Parameter(format!("{n} nodes not divisible into {k} communities")));
    }
    if feature_dim < k {
        return Err(Error::Parameter(format!(
            "feature_dim {feature_dim} cannot hold {k} community indicators"
        )));
    }
    let size = n / k;
    let labels: Vec<usize> = (0..n).map(|u| u / size).collect();
    let mut rng = rng::seeded(seed);
    let mut adjacency = Array2::<u8>::zeros((n, n));
    for (s, t) in upper_pairs(n) {
        let p = if labels[s] == labels[t] { p_in } else { p_out };
        if rng.random::<f64>() < p {
            adjacency[[s, t]] = 1;
            adjacency[[t, s]] = 1;
        }
    }
    let noise = Normal::new(0.0, SbmParams::FEATURE_NOISE).expect("valid normal");
    let mut features = Array2::<S>::zeros((n, feature_dim));
    for u in 0..n {
        for j in 0..feature_dim {
            let signal = if j == labels[u] { 1.0 } else { 0.0 };
            features[[u, j]] = S::of(signal + noise.sample(&mut rng));
        }
    }
    Graph::new(adjacency, features, labels, k)
}
