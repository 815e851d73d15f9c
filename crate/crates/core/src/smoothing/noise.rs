use rand::Rng;
use rand_distr::Geometric;

use crate::graph::num_pairs;
use crate::{rng, Error, Result};

/// Keep-probability `β` of every edge status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    beta: f64,
}

impl NoiseSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.5 && beta <= 1.0) {
            return Err(Error::Parameter(format!("noise beta {beta} must lie in (0.5, 1]")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { beta: 0.999 }
    }
}

/// Monte Carlo settings shared by evasion and poisoning certification.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingConfig {
    pub num_samples: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Poisoning only: train every replicate with the base training seed
    /// instead of a per-replicate derived seed.
    pub shared_training_seed: bool,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            num_samples: 200,
            alpha: 0.1,
            seed: 0,
            shared_training_seed: false,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::Parameter("number of samples must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

/// Sorted pair indices that flip under one noise draw. Gaps between flips are
/// geometric, so the cost follows the number of flips rather than `m`.
/// Sample `index` of `seed` is reproducible on its own.
pub fn sample_flips(spec: &NoiseSpec, n: usize, seed: u64, index: u64) -> Vec<usize> {
    let m = num_pairs(n);
    let flip = 1.0 - spec.beta;
    if flip <= 0.0 || m == 0 {
        return Vec::new();
    }
    let gap = Geometric::new(flip).expect("flip probability lies in (0, 0.5)");
    let mut rng = rng::stream(seed, index);
    let mut flips = Vec::new();
    let mut next = rng.sample(gap);
    while next < m as u64 {
        flips.push(next as usize);
        next = next.saturating_add(1).saturating_add(rng.sample(gap));
    }
    flips
}

/// Upper-triangle flip mask of [`sample_flips`].
pub fn sample_noise(spec: &NoiseSpec, n: usize, seed: u64, index: u64) -> Vec<u8> {
    let mut mask = vec![0; num_pairs(n)];
    for k in sample_flips(spec, n, seed, index) {
        mask[k] = 1;
    }
    mask
}

/// `(s, t)` endpoints of sorted pair indices, walking the rows once.
pub fn flips_to_pairs(n: usize, sorted: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(sorted.len());
    let (mut s, mut start) = (0, 0);
    for &k in sorted {
        while k >= start + (n - s - 1) {
            start += n - s - 1;
            s += 1;
        }
        out.push((s, s + 1 + k - start));
    }
    out
}
