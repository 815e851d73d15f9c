//! Certified-robustness-weighted structure attacks on graph convolutional networks.
//!
//! The crate trains a dense two-layer GCN, certifies each node's robustness to
//! edge flips with randomized smoothing over Bernoulli edge noise, turns the
//! certified perturbation sizes into node weights and uses them to steer
//! projected-gradient evasion attacks and min-max poisoning attacks.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common instantiations. Probabilities, certificates and
//! accuracies are always `f64`. Exact rational arithmetic ([`Exact`]) is
//! available for the likelihood-ratio region tables used by certification.

pub mod attack;
pub mod error;
pub mod experiment;
pub mod gcn;
pub mod graph;
pub mod rng;
pub mod scalar;
pub mod smoothing;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default real type.
pub type Real = f64;

/// Exact rational type used by the region-table oracle path.
pub type Exact = num_rational::BigRational;

pub type Graph64 = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type GcnParams64 = gcn::GcnParams<f64>;
pub type GcnParams32 = gcn::GcnParams<f32>;
pub type Perturbation64 = graph::Perturbation<f64>;
pub type AttackReport64 = attack::AttackReport<f64>;

