//! Randomized smoothing over Bernoulli edge-flip noise and certified
//! perturbation sizes for evasion and poisoning.

mod bound;
mod certify;
mod counts;
mod exact;
mod noise;
mod region;

pub use bound::lower_bound_prob;
pub use certify::{
    certify_counts, certify_nodes, read_certificates_csv, write_certificates_csv, Certificate, CertifyMode,
};
pub use counts::{mc_counts_evasion, mc_counts_poisoning, LabelCounts, PoisonSetup};
pub use exact::{exact_smoothed_prob, exact_smoothed_probs, MAX_ENUMERABLE_PAIRS};
pub use noise::{flips_to_pairs, sample_flips, sample_noise, NoiseSpec, SmoothingConfig};
pub use region::{
    certified_size, greedy_worst_case, worst_case_probability, CertifiedSize, RegionTable, DEFAULT_R_MAX,
};
