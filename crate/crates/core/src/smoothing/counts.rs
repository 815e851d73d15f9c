use ndarray::Array2;
use rayon::prelude::*;

use super::{flips_to_pairs, sample_flips, sample_noise, NoiseSpec, SmoothingConfig};
use crate::gcn::{neighbor_lists, predict_all, train_nodes, GcnParams, Predictor, TrainConfig};
use crate::graph::{apply_perturbation, to_real};
use crate::{rng, Error, Result, Scalar};

/// Per-target label frequencies over `num_samples` noisy replicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCounts {
    pub nodes: Vec<usize>,
    /// `counts[i][c]`: replicates predicting class `c` for `nodes[i]`.
    pub counts: Vec<Vec<usize>>,
    pub num_samples: usize,
}

impl LabelCounts {
    fn accumulate(nodes: &[usize], num_classes: usize, predictions: &[Vec<usize>]) -> Self {
        let mut counts = vec![vec![0usize; num_classes]; nodes.len()];
        for pred in predictions {
            for (row, &u) in counts.iter_mut().zip(nodes) {
                row[pred[u]] += 1;
            }
        }
        Self {
            nodes: nodes.to_vec(),
            counts,
            num_samples: predictions.len(),
        }
    }
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    match targets.iter().find(|&&u| u >= n) {
        Some(u) => Err(Error::Domain(format!("target node {u} outside {n} nodes"))),
        None => Ok(()),
    }
}

/// Evasion smoothing: one fixed classifier predicts on `N` noisy copies of
/// `adjacency`; all targets share the same replicates.
pub fn mc_counts_evasion<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<u8>,
    features: &Array2<S>,
    targets: &[usize],
    spec: &NoiseSpec,
    config: &SmoothingConfig,
) -> Result<LabelCounts> {
    config.validate()?;
    let n = adjacency.nrows();
    check_targets(targets, n)?;
    let predictor = Predictor::new(params, features)?;
    let base = neighbor_lists(adjacency);
    let predictions = (0..config.num_samples)
        .into_par_iter()
        .map(|j| {
            let flips = sample_flips(spec, n, config.seed, j as u64);
            predictor.predict_toggled(&base, &flips_to_pairs(n, &flips))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelCounts::accumulate(targets, params.num_classes(), &predictions))
}

/// Inputs of the training algorithm that poisoning smoothing re-runs per
/// replicate. Only training labels are visible.
#[derive(Debug, Clone, Copy)]
pub struct PoisonSetup<'a, S> {
    pub adjacency: &'a Array2<u8>,
    pub features: &'a Array2<S>,
    pub train_nodes: &'a [usize],
    pub train_labels: &'a [usize],
    pub num_classes: usize,
}

/// Poisoning smoothing: replicate `j` trains a classifier on
/// `A ⊕ ε^j` and predicts the targets on that same noisy graph.
pub fn mc_counts_poisoning<S: Scalar>(
    setup: &PoisonSetup<S>,
    train_config: &TrainConfig,
    targets: &[usize],
    spec: &NoiseSpec,
    config: &SmoothingConfig,
) -> Result<LabelCounts> {
    config.validate()?;
    train_config.validate()?;
    let n = setup.adjacency.nrows();
    check_targets(targets, n)?;
    let predictions = (0..config.num_samples)
        .into_par_iter()
        .map(|j| {
            let run = || -> Result<Vec<usize>> {
                let noise = sample_noise(spec, n, config.seed, j as u64);
                let noisy = apply_perturbation(setup.adjacency, &noise)?;
                let seed = if config.shared_training_seed {
                    train_config.seed
                } else {
                    rng::mix_seed(train_config.seed, j as u64)
                };
                let cfg = TrainConfig {
                    seed,
                    ..train_config.clone()
                };
                let params = train_nodes(
                    setup.features,
                    &to_real(&noisy),
                    setup.train_nodes,
                    setup.train_labels,
                    setup.num_classes,
                    &cfg,
                )?;
                predict_all(&params, &noisy, setup.features)
            };
            run().map_err(|e| Error::Replicate {
                replicate: j,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelCounts::accumulate(targets, setup.num_classes, &predictions))
}
