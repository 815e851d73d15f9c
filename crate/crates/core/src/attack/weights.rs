use ndarray::Array2;
use rand::Rng;

use super::config::{SchemeKind, WeightScheme};
use crate::smoothing::Certificate;
use crate::{rng, Error, Result, Scalar};

const CENTRALITY_STEPS: usize = 100;
const CENTRALITY_TOLERANCE: f64 = 1e-8;

fn logistic_decay(a: f64, value: f64) -> f64 {
    1.0 / (1.0 + (a * value).exp())
}

/// Eigenvector centrality by power iteration on `A + I`, scaled to max 1.
pub fn eigenvector_centrality(adjacency: &Array2<u8>) -> Vec<f64> {
    let n = adjacency.nrows();
    if n == 0 {
        return Vec::new();
    }
    let neighbors: Vec<Vec<usize>> = adjacency
        .rows()
        .into_iter()
        .map(|r| r.iter().enumerate().filter(|(_, &a)| a == 1).map(|(j, _)| j).collect())
        .collect();
    let mut x = vec![1.0; n];
    for _ in 0..CENTRALITY_STEPS {
        let mut next: Vec<f64> = (0..n)
            .map(|i| x[i] + neighbors[i].iter().map(|&j| x[j]).sum::<f64>())
            .collect();
        let top = next.iter().cloned().fold(0.0, f64::max);
        next.iter_mut().for_each(|v| *v /= top);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < CENTRALITY_TOLERANCE {
            break;
        }
    }
    x
}

/// Per-target loss weights. `certificates` must be aligned with `targets`
/// for the certified scheme.
pub fn node_weights<S: Scalar>(
    scheme: &WeightScheme,
    certificates: Option<&[Certificate]>,
    adjacency: &Array2<u8>,
    targets: &[usize],
) -> Result<Vec<S>> {
    let n = adjacency.nrows();
    if let Some(&u) = targets.iter().find(|&&u| u >= n) {
        return Err(Error::Domain(format!("target node {u} outside {n} nodes")));
    }
    let a = scheme.a;
    let weights: Vec<f64> = match scheme.kind {
        SchemeKind::Uniform => vec![1.0; targets.len()],
        SchemeKind::Random => {
            let mut r = rng::seeded(scheme.seed);
            targets.iter().map(|_| r.random::<f64>()).collect()
        }
        SchemeKind::Degree => targets
            .iter()
            .map(|&u| {
                let deg = adjacency.row(u).iter().filter(|&&v| v == 1).count();
                logistic_decay(a, deg as f64)
            })
            .collect(),
        SchemeKind::Centrality => {
            let cen = eigenvector_centrality(adjacency);
            targets.iter().map(|&u| logistic_decay(a, cen[u])).collect()
        }
        SchemeKind::Certified => {
            let certs = certificates
                .ok_or_else(|| Error::Parameter("certified weights need certificates".into()))?;
            targets
                .iter()
                .map(|&u| {
                    certs
                        .iter()
                        .find(|c| c.node == u)
                        .map(|c| logistic_decay(a, c.certified_size as f64))
                        .ok_or_else(|| Error::Parameter(format!("no certificate for node {u}")))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(weights.into_iter().map(S::of).collect())
}
