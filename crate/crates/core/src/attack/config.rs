use std::fmt;
use std::str::FromStr;

use crate::gcn::LossKind;
use crate::smoothing::{NoiseSpec, SmoothingConfig, DEFAULT_R_MAX};
use crate::{Error, Result};

/// How node weights of the attack loss are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// All weights 1: the base attack.
    Uniform,
    /// i.i.d. uniform(0, 1).
    Random,
    /// `1 / (1 + exp(a · degree))`.
    Degree,
    /// `1 / (1 + exp(a · eigenvector centrality))`.
    Centrality,
    /// `1 / (1 + exp(a · K))` from certified perturbation sizes.
    Certified,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Uniform,
        SchemeKind::Random,
        SchemeKind::Degree,
        SchemeKind::Centrality,
        SchemeKind::Certified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Uniform => "uniform",
            SchemeKind::Random => "random",
            SchemeKind::Degree => "degree",
            SchemeKind::Centrality => "centrality",
            SchemeKind::Certified => "certified",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown weight scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScheme {
    pub kind: SchemeKind,
    /// Sharpness `a` of the logistic weight.
    pub a: f64,
    /// Seed of the random scheme.
    pub seed: u64,
}

impl WeightScheme {
    pub fn new(kind: SchemeKind, a: f64, seed: u64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("weight sharpness a = {a} must be positive")));
        }
        Ok(Self { kind, a, seed })
    }

    pub fn uniform() -> Self {
        Self {
            kind: SchemeKind::Uniform,
            a: 1.0,
            seed: 0,
        }
    }
}

/// Starting point of the poisoning model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinmaxInit {
    Random,
    /// Trained on the clean graph with the attack's training config.
    Pretrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackConfig {
    /// Maximum number of flipped node pairs.
    pub budget: usize,
    pub iterations: usize,
    /// Certificates and weights are refreshed when `t % refresh_interval == 0`.
    pub refresh_interval: usize,
    /// Evasion step size relative to the budget; the step at iteration `t`
    /// is `step_size · max(budget, 1) / sqrt(t + 1)`.
    pub step_size: f64,
    /// Poisoning inner (model) step size.
    pub inner_step: f64,
    /// Poisoning outer (perturbation) step size, decayed as `1 / sqrt(t + 1)`.
    pub outer_step: f64,
    /// Poisoning inner descent steps per iteration.
    pub inner_steps: usize,
    pub loss: LossKind,
    pub smoothing: SmoothingConfig,
    pub noise: NoiseSpec,
    pub scheme: WeightScheme,
    pub discretize_trials: usize,
    pub discretize_seed: u64,
    pub r_max: usize,
    pub minmax_init: MinmaxInit,
    /// Keep every relaxed iterate in the report.
    pub record_trajectory: bool,
}

impl AttackConfig {
    /// Evasion defaults: T = 100, INT = 10, N = 200.
    pub fn evasion(budget: usize) -> Self {
        Self {
            budget,
            iterations: 100,
            refresh_interval: 10,
            step_size: 0.1,
            inner_step: 0.01,
            outer_step: 0.1,
            inner_steps: 1,
            loss: LossKind::CrossEntropy,
            smoothing: SmoothingConfig {
                num_samples: 200,
                ..SmoothingConfig::default()
            },
            noise: NoiseSpec::default(),
            scheme: WeightScheme::uniform(),
            discretize_trials: 20,
            discretize_seed: 0,
            r_max: DEFAULT_R_MAX,
            minmax_init: MinmaxInit::Random,
            record_trajectory: false,
        }
    }

    /// Poisoning defaults: T = 10, INT = 2, N = 20.
    pub fn poisoning(budget: usize) -> Self {
        Self {
            iterations: 10,
            refresh_interval: 2,
            smoothing: SmoothingConfig {
                num_samples: 20,
                ..SmoothingConfig::default()
            },
            ..Self::evasion(budget)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Parameter("attack iterations must be >= 1".into()));
        }
        if self.refresh_interval == 0 {
            return Err(Error::Parameter("refresh interval must be >= 1".into()));
        }
        for (name, v) in [
            ("step_size", self.step_size),
            ("inner_step", self.inner_step),
            ("outer_step", self.outer_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} = {v} must be positive")));
            }
        }
        if self.inner_steps == 0 {
            return Err(Error::Parameter("inner_steps must be >= 1".into()));
        }
        self.smoothing.validate()?;
        WeightScheme::new(self.scheme.kind, self.scheme.a, self.scheme.seed)?;
        Ok(())
    }

    pub(crate) fn refreshes_at(&self, t: usize) -> bool {
        t.is_multiple_of(self.refresh_interval)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_roundtrip() {
        for k in SchemeKind::ALL {
            assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
        }
        assert!("bogus".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn defaults_follow_reference_settings() {
        let e = AttackConfig::evasion(5);
        assert_eq!((e.iterations, e.refresh_interval, e.smoothing.num_samples), (100, 10, 200));
        let p = AttackConfig::poisoning(5);
        assert_eq!((p.iterations, p.refresh_interval, p.smoothing.num_samples), (10, 2, 20));
        assert_eq!(e.noise.beta(), 0.999);
        assert_eq!(e.smoothing.alpha, 0.1);
        assert!(e.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = AttackConfig::evasion(5);
        c.refresh_interval = 0;
        assert!(c.validate().is_err());
        let mut c = AttackConfig::evasion(5);
        c.step_size = 0.0;
        assert!(c.validate().is_err());
        assert!(WeightScheme::new(SchemeKind::Certified, 0.0, 0).is_err());
    }
}
