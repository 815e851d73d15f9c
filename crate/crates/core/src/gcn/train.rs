use ndarray::Array2;

use super::grad::{param_gradients, NodeObjective};
use super::loss::LossKind;
use super::model::GcnParams;
use super::normalize::Propagation;
use crate::graph::{DataSplit, Graph};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub hidden_dim: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.2,
            epochs: 200,
            weight_decay: 5e-4,
            hidden_dim: 16,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Parameter(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Parameter("epochs must be >= 1".into()));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::Parameter("weight decay must be >= 0".into()));
        }
        if self.hidden_dim == 0 {
            return Err(Error::Parameter("hidden dim must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full-batch gradient descent on mean cross-entropy over `nodes` with L2
/// weight decay, starting from `params`. Returns the per-epoch objective
/// (evaluated before each update).
pub fn train_with_history<S: Scalar>(
    mut params: GcnParams<S>,
    features: &Array2<S>,
    adjacency: &Array2<S>,
    nodes: &[usize],
    labels: &[usize],
    config: &TrainConfig,
) -> Result<(GcnParams<S>, Vec<f64>)> {
    config.validate()?;
    if nodes.is_empty() {
        return Err(Error::Parameter("no training nodes".into()));
    }
    let prop = Propagation::new(adjacency);
    let mean = vec![S::of(1.0 / nodes.len() as f64); nodes.len()];
    let objective = NodeObjective::new(nodes, labels, Some(&mean[..]), LossKind::CrossEntropy);
    let lr = S::of(config.learning_rate);
    let wd = S::of(config.weight_decay);
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let g = param_gradients(&params, &prop, features, &objective).map_err(|e| match e {
            Error::Numeric { .. } => Error::Training { epoch },
            other => other,
        })?;
        let penalty = params.w1.iter().chain(params.w2.iter()).map(|&w| w * w).sum::<S>() * wd * S::of(0.5);
        let loss = (g.loss + penalty).to_f64_lossy();
        if !loss.is_finite() {
            return Err(Error::Training { epoch });
        }
        history.push(loss);
        params.w1.zip_mut_with(&g.w1, |w, &d| *w = *w - lr * (d + wd * *w));
        params.w2.zip_mut_with(&g.w2, |w, &d| *w = *w - lr * (d + wd * *w));
        if !params.is_finite() {
            return Err(Error::Training { epoch });
        }
    }
    Ok((params, history))
}

/// Trains a fresh model on `nodes` from a seeded Glorot initialisation.
pub fn train_nodes<S: Scalar>(
    features: &Array2<S>,
    adjacency: &Array2<S>,
    nodes: &[usize],
    labels: &[usize],
    num_classes: usize,
    config: &TrainConfig,
) -> Result<GcnParams<S>> {
    config.validate()?;
    let init = GcnParams::init(features.ncols(), config.hidden_dim, num_classes, config.seed);
    Ok(train_with_history(init, features, adjacency, nodes, labels, config)?.0)
}

/// Trains on the split's training nodes over `adjacency` (clean, relaxed or
/// perturbed).
pub fn train<S: Scalar>(
    graph: &Graph<S>,
    split: &DataSplit,
    adjacency: &Array2<S>,
    config: &TrainConfig,
) -> Result<GcnParams<S>> {
    let labels: Vec<usize> = split.train.iter().map(|&u| graph.labels()[u]).collect();
    train_nodes(
        graph.features(),
        adjacency,
        &split.train,
        &labels,
        graph.num_classes(),
        config,
    )
}
