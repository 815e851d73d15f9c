use std::time::Instant;

use super::config::{AttackConfig, MinmaxInit, WeightScheme};
use super::discretize::discretize;
use super::evaluate::{evaluate_attack, EvalMode};
use super::labels::VisibleLabels;
use super::loss::cr_loss;
use super::pgd::{decayed, refresh_weights};
use super::project::project_budget;
use super::report::{AttackReport, WeightSnapshot};
use crate::gcn::{gradients, train_nodes, GcnParams, NodeObjective, TrainConfig};
use crate::graph::{apply_perturbation, to_real, DataSplit, Graph, Perturbation};
use crate::smoothing::{certify_nodes, CertifyMode, SmoothingConfig};
use crate::{rng, Result, Scalar};

const INIT_STREAM: u64 = 0x6d69_6e6d_6178;

fn to_f64s<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn minmax_loop<S: Scalar>(
    graph: &Graph<S>,
    split: &DataSplit,
    train_config: &TrainConfig,
    config: &AttackConfig,
    scheme: Option<&WeightScheme>,
) -> Result<AttackReport<S>> {
    config.validate()?;
    train_config.validate()?;
    let start = Instant::now();
    let adjacency = graph.adjacency();
    let features = graph.features();
    let targets = &split.train;
    let visible = VisibleLabels::new(graph.labels(), targets);
    let labels: Vec<usize> = targets.iter().filter_map(|&u| visible.get(u)).collect();
    let budget = config.budget as f64;

    let mut theta = match config.minmax_init {
        MinmaxInit::Random => GcnParams::init(
            graph.num_features(),
            train_config.hidden_dim,
            graph.num_classes(),
            rng::mix_seed(train_config.seed, INIT_STREAM),
        ),
        MinmaxInit::Pretrained => train_nodes(
            features,
            &to_real(adjacency),
            targets,
            &labels,
            graph.num_classes(),
            train_config,
        )?,
    };
    let mut delta = vec![S::zero(); graph.num_pairs()];
    let mut weights: Option<Vec<S>> = None;
    let mut weights_history = Vec::new();
    let mut initial_certificates = Vec::new();
    let mut certification_seconds = 0.0;
    let mut per_iteration_loss = Vec::with_capacity(config.iterations);
    let mut feasible_mass = Vec::with_capacity(config.iterations);
    let mut trajectory = Vec::new();
    let inner = S::of(config.inner_step);

    for t in 0..config.iterations {
        if let Some(scheme) = scheme {
            if config.refreshes_at(t) {
                let certify = |snapshot: &ndarray::Array2<u8>, smoothing: &SmoothingConfig| {
                    certify_nodes(
                        CertifyMode::Poisoning {
                            train_config,
                            train_nodes: targets,
                            train_labels: &labels,
                        },
                        snapshot,
                        features,
                        graph.num_classes(),
                        targets,
                        &labels,
                        &config.noise,
                        smoothing,
                        config.r_max,
                    )
                };
                let r = refresh_weights(scheme, config, adjacency, &delta, t, certify, targets)?;
                certification_seconds += r.seconds;
                if t == 0 {
                    initial_certificates = r.certificates.unwrap_or_default();
                }
                weights_history.push(WeightSnapshot {
                    iteration: t,
                    weights: to_f64s(&r.weights),
                });
                weights = Some(r.weights);
            }
        }
        let objective = NodeObjective::new(targets, &labels, weights.as_deref(), config.loss);
        for _ in 0..config.inner_steps {
            let g = gradients(&theta, adjacency, &delta, features, &objective)?;
            theta.w1.zip_mut_with(&g.w1, |w, &d| *w = *w - inner * d);
            theta.w2.zip_mut_with(&g.w2, |w, &d| *w = *w - inner * d);
        }
        let g = gradients(&theta, adjacency, &delta, features, &objective)?;
        per_iteration_loss.push(g.loss.to_f64_lossy());
        let eta = S::of(decayed(config.outer_step, t));
        let grad = g.delta.expect("perturbation gradient requested");
        let stepped: Vec<S> = delta.iter().zip(&grad).map(|(&d, &gd)| d + eta * gd).collect();
        delta = project_budget(&stepped, budget);
        feasible_mass.push(to_f64s(&delta).iter().sum());
        if config.record_trajectory {
            trajectory.push(delta.clone());
        }
    }

    let final_weights = weights.clone().unwrap_or_else(|| vec![S::one(); targets.len()]);
    let binary = discretize(
        &delta,
        config.budget,
        config.discretize_trials,
        config.discretize_seed,
        |candidate| {
            let perturbed = to_real(&apply_perturbation(adjacency, candidate)?);
            let l = cr_loss(&theta, &perturbed, features, targets, &labels, &final_weights, config.loss)?;
            Ok(l.to_f64_lossy())
        },
    )?;
    let (pre_accuracy, post_accuracy) =
        evaluate_attack(graph, split, &binary, EvalMode::Poisoning(train_config))?;
    Ok(AttackReport {
        perturbation: Perturbation {
            relaxed: delta,
            binary: Some(binary),
            budget: config.budget,
        },
        pre_accuracy,
        post_accuracy,
        per_iteration_loss,
        feasible_mass,
        weights_history,
        initial_certificates,
        trajectory,
        scheme: scheme.map(|s| s.kind),
        budget: config.budget,
        attack_seconds: start.elapsed().as_secs_f64(),
        certification_seconds,
        label_violations: visible.violations(),
    })
}

/// Weighted min-max poisoning attack: alternating model descent and
/// perturbation ascent on the training-node loss, with weights refreshed from
/// poisoning certificates. The final binary perturbation is evaluated by
/// retraining from scratch.
pub fn minmax_poisoning<S: Scalar>(
    graph: &Graph<S>,
    split: &DataSplit,
    train_config: &TrainConfig,
    config: &AttackConfig,
) -> Result<AttackReport<S>> {
    minmax_loop(graph, split, train_config, config, Some(&config.scheme))
}

/// Min-max on the unweighted training loss; `config.scheme` is ignored.
pub fn minmax_base<S: Scalar>(
    graph: &Graph<S>,
    split: &DataSplit,
    train_config: &TrainConfig,
    config: &AttackConfig,
) -> Result<AttackReport<S>> {
    minmax_loop(graph, split, train_config, config, None)
}
