//! Certified-robustness-weighted attacks: node weights, the weighted attack
//! loss, budget projection, CR-PGD evasion, CR-Minmax poisoning and
//! discretization of relaxed perturbations.

mod config;
mod discretize;
mod evaluate;
mod labels;
mod loss;
mod minmax;
mod pgd;
mod project;
mod report;
mod weights;

pub use config::{AttackConfig, MinmaxInit, SchemeKind, WeightScheme};
pub use discretize::{discretize, top_budget};
pub use evaluate::{evaluate_attack, EvalMode};
pub use labels::VisibleLabels;
pub use loss::cr_loss;
pub use minmax::{minmax_base, minmax_poisoning};
pub use pgd::{pgd_base, pgd_evasion};
pub use project::project_budget;
pub use report::{
    read_flips, write_flips, write_iterations_csv, write_summary_csv, AttackReport, WeightSnapshot,
};
pub use weights::{eigenvector_centrality, node_weights};
