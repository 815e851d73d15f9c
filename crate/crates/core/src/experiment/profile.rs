use std::path::Path;

use super::config::{AttackMode, ExperimentConfig, SweepAxis};
use super::sweep::run_cell;
use crate::attack::SchemeKind;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub num_samples: usize,
    pub attack_seconds: f64,
    pub certification_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RuntimeProfile {
    pub rows: Vec<ProfileRow>,
    /// Poisoning: certification time grows at most twice as fast as `N`.
    /// Evasion: total attack time at the largest `N` is at most twice the
    /// time at the smallest. `None` with fewer than two sample counts.
    pub scaling_ok: Option<bool>,
}

/// Largest-over-smallest time ratio against its allowance.
pub fn scaling_within_bounds(mode: AttackMode, rows: &[ProfileRow]) -> Option<bool> {
    let lo = rows.iter().min_by_key(|r| r.num_samples)?;
    let hi = rows.iter().max_by_key(|r| r.num_samples)?;
    if lo.num_samples == hi.num_samples {
        return None;
    }
    Some(match mode {
        AttackMode::Poisoning => {
            let allowed = 2.0 * hi.num_samples as f64 / lo.num_samples as f64;
            hi.certification_seconds <= allowed * lo.certification_seconds
        }
        AttackMode::Evasion => hi.attack_seconds <= 2.0 * lo.attack_seconds,
    })
}

/// Times the certified attack of the first seed and sweep value at every
/// sample count in `config.profile_samples`, writing `N,attack_seconds,
/// certification_seconds` rows to `path`.
pub fn runtime_profile(config: &ExperimentConfig, path: impl AsRef<Path>) -> Result<RuntimeProfile> {
    config.validate()?;
    let path = path.as_ref();
    let seed = config.seeds[0];
    let mut rows = Vec::new();
    for &n in &config.profile_samples {
        let mut cfg = config.clone();
        cfg.attack.smoothing.num_samples = n;
        // The profiled sample count must not be overridden by the sweep axis.
        let value = if cfg.axis == SweepAxis::NumSamples {
            cfg.axis = SweepAxis::BudgetRatio;
            cfg.budget_ratio
        } else {
            config.values[0]
        };
        let report = run_cell(&cfg, seed, value, SchemeKind::Certified)?;
        rows.push(ProfileRow {
            num_samples: n,
            attack_seconds: report.attack_seconds,
            certification_seconds: report.certification_seconds,
        });
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["N", "attack_seconds", "certification_seconds"])?;
    for r in &rows {
        w.write_record([
            r.num_samples.to_string(),
            r.attack_seconds.to_string(),
            r.certification_seconds.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let scaling_ok = scaling_within_bounds(config.mode, &rows);
    if scaling_ok == Some(false) {
        log::warn!("runtime grows faster than the expected scaling in N");
    }
    Ok(RuntimeProfile { rows, scaling_ok })
}
