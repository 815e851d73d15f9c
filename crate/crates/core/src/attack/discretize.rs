use rand::Rng;

use crate::{rng, Result, Scalar};

/// The `budget` largest strictly positive entries set to 1, lowest index
/// first among equal values.
pub fn top_budget<S: Scalar>(relaxed: &[S], budget: usize) -> Vec<u8> {
    let mut order: Vec<usize> = (0..relaxed.len()).filter(|&i| relaxed[i] > S::zero()).collect();
    order.sort_by(|&i, &j| {
        relaxed[j]
            .partial_cmp(&relaxed[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut out = vec![0u8; relaxed.len()];
    for &i in order.iter().take(budget) {
        out[i] = 1;
    }
    out
}

/// Rounds a feasible relaxed perturbation to a binary one with at most
/// `budget` flips. Candidates are the deterministic top-`budget` rounding
/// followed by `trials` seeded Bernoulli draws (each cut back to its
/// `budget` most likely flips); the candidate with the largest objective
/// wins, earliest on ties.
pub fn discretize<S, F>(relaxed: &[S], budget: usize, trials: usize, seed: u64, mut objective: F) -> Result<Vec<u8>>
where
    S: Scalar,
    F: FnMut(&[u8]) -> Result<f64>,
{
    let mut best = top_budget(relaxed, budget);
    let mut best_value = objective(&best)?;
    let mut r = rng::seeded(seed);
    for _ in 0..trials {
        let draw: Vec<S> = relaxed
            .iter()
            .map(|&p| {
                let u: f64 = r.random();
                if u < p.to_f64_lossy() {
                    p
                } else {
                    S::zero()
                }
            })
            .collect();
        let candidate = top_budget(&draw, budget);
        let value = objective(&candidate)?;
        if value > best_value {
            best = candidate;
            best_value = value;
        }
    }
    Ok(best)
}
