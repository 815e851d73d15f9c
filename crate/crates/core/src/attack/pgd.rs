use std::time::Instant;

use super::config::{AttackConfig, SchemeKind, WeightScheme};
use super::discretize::{discretize, top_budget};
use super::evaluate::{evaluate_attack, EvalMode};
use super::labels::VisibleLabels;
use super::loss::cr_loss;
use super::project::project_budget;
use super::report::{AttackReport, WeightSnapshot};
use super::weights::node_weights;
use crate::gcn::{gradients, GcnParams, NodeObjective};
use crate::graph::{apply_perturbation, to_real, DataSplit, Graph, Perturbation};
use crate::smoothing::{certify_nodes, Certificate, CertifyMode, SmoothingConfig};
use crate::{rng, Result, Scalar};

/// Weights for the next stretch of iterations, computed on the top-Δ
/// rounding of the current relaxed perturbation.
pub(crate) struct Refresh<S> {
    pub weights: Vec<S>,
    pub certificates: Option<Vec<Certificate>>,
    pub seconds: f64,
}

pub(crate) fn refresh_weights<S: Scalar>(
    scheme: &WeightScheme,
    config: &AttackConfig,
    adjacency: &ndarray::Array2<u8>,
    delta: &[S],
    t: usize,
    certify: impl FnOnce(&ndarray::Array2<u8>, &SmoothingConfig) -> Result<Vec<Certificate>>,
    targets: &[usize],
) -> Result<Refresh<S>> {
    let snapshot = apply_perturbation(adjacency, &top_budget(delta, config.budget))?;
    let mut seconds = 0.0;
    let certificates = if scheme.kind == SchemeKind::Certified {
        let smoothing = SmoothingConfig {
            seed: rng::mix_seed(config.smoothing.seed, t as u64),
            ..config.smoothing.clone()
        };
        let start = Instant::now();
        let certs = certify(&snapshot, &smoothing)?;
        seconds = start.elapsed().as_secs_f64();
        Some(certs)
    } else {
        None
    };
    let weights = node_weights(scheme, certificates.as_deref(), &snapshot, targets)?;
    Ok(Refresh {
        weights,
        certificates,
        seconds,
    })
}

pub(crate) fn decayed(step: f64, t: usize) -> f64 {
    step / ((t + 1) as f64).sqrt()
}

fn to_f64s<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn pgd_loop<S: Scalar>(
    params: &GcnParams<S>,
    graph: &Graph<S>,
    split: &DataSplit,
    config: &AttackConfig,
    scheme: Option<&WeightScheme>,
) -> Result<AttackReport<S>> {
    config.validate()?;
    let start = Instant::now();
    let adjacency = graph.adjacency();
    let features = graph.features();
    let targets = &split.test;
    let visible = VisibleLabels::new(graph.labels(), targets);
    let labels: Vec<usize> = targets.iter().filter_map(|&u| visible.get(u)).collect();
    let budget = config.budget as f64;

    let mut delta = vec![S::zero(); graph.num_pairs()];
    let mut weights: Option<Vec<S>> = None;
    let mut weights_history = Vec::new();
    let mut initial_certificates = Vec::new();
    let mut certification_seconds = 0.0;
    let mut per_iteration_loss = Vec::with_capacity(config.iterations);
    let mut feasible_mass = Vec::with_capacity(config.iterations);
    let mut trajectory = Vec::new();

    for t in 0..config.iterations {
        if let Some(scheme) = scheme {
            if config.refreshes_at(t) {
                let certify = |snapshot: &ndarray::Array2<u8>, smoothing: &SmoothingConfig| {
                    certify_nodes(
                        CertifyMode::Evasion { params },
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
        let g = gradients(params, adjacency, &delta, features, &objective)?;
        per_iteration_loss.push(g.loss.to_f64_lossy());
        let eta = S::of(decayed(config.step_size * config.budget.max(1) as f64, t));
        let grad = g.delta.expect("perturbation gradient requested");
        let stepped: Vec<S> = delta.iter().zip(&grad).map(|(&d, &gd)| d + eta * gd).collect();
        delta = project_budget(&stepped, budget);
        feasible_mass.push(to_f64s(&delta).iter().sum());
        if config.record_trajectory {
            trajectory.push(delta.clone());
        }
    }

    let unit = vec![S::one(); targets.len()];
    let final_weights = weights.clone().unwrap_or(unit);
    let binary = discretize(
        &delta,
        config.budget,
        config.discretize_trials,
        config.discretize_seed,
        |candidate| {
            let perturbed = to_real(&apply_perturbation(adjacency, candidate)?);
            let l = cr_loss(params, &perturbed, features, targets, &labels, &final_weights, config.loss)?;
            Ok(l.to_f64_lossy())
        },
    )?;
    let (pre_accuracy, post_accuracy) = evaluate_attack(graph, split, &binary, EvalMode::Evasion(params))?;
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

/// Weighted PGD evasion attack on the test nodes of a trained model, with
/// node weights from `config.scheme` refreshed every `refresh_interval`
/// iterations.
pub fn pgd_evasion<S: Scalar>(
    params: &GcnParams<S>,
    graph: &Graph<S>,
    split: &DataSplit,
    config: &AttackConfig,
) -> Result<AttackReport<S>> {
    pgd_loop(params, graph, split, config, Some(&config.scheme))
}

/// Plain PGD on the unweighted loss; `config.scheme` is ignored.
pub fn pgd_base<S: Scalar>(
    params: &GcnParams<S>,
    graph: &Graph<S>,
    split: &DataSplit,
    config: &AttackConfig,
) -> Result<AttackReport<S>> {
    pgd_loop(params, graph, split, config, None)
}
