//! Worst-case smoothed probability under `r` adversarial flips.
//!
//! With `r` flipped pairs, outcomes of the noisy graph split into regions by
//! `k`, the number of flipped coordinates whose noisy value agrees with the
//! clean graph. Under the clean-graph noise `X`, region `k` has mass
//! `C(r,k) β^k (1−β)^{r−k}`; under the perturbed-graph noise `Y` it has
//! `C(r,k) β^{r−k} (1−β)^k`. The ratio `X/Y = (β/(1−β))^{2k−r}` grows with `k`,
//! so the least favourable classifier that still has `X`-mass `p` on the true
//! label fills regions from `k = r` down to `0`, and what it keeps under `Y` is
//! the worst case `ρ(r)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One};
use statrs::function::factorial::ln_binomial;

use super::NoiseSpec;
use crate::{Error, Result};

pub const DEFAULT_R_MAX: usize = 2000;

// Rounding in the log-space region masses accumulates over long scans.
const MONOTONE_SLACK: f64 = 1e-9;

/// Region masses indexed by `k` (agreements among the `r` flipped pairs).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable<T> {
    pub clean: Vec<T>,
    pub perturbed: Vec<T>,
}

impl RegionTable<f64> {
    /// Masses from log-space binomial terms, so `β` near 1 does not underflow.
    pub fn new(r: usize, beta: f64) -> Self {
        let (lb, lq) = (beta.ln(), (1.0 - beta).ln());
        let mut clean = Vec::with_capacity(r + 1);
        let mut perturbed = Vec::with_capacity(r + 1);
        for k in 0..=r {
            let lc = ln_binomial(r as u64, k as u64);
            let (kf, rest) = (k as f64, (r - k) as f64);
            clean.push((lc + kf * lb + rest * lq).exp());
            perturbed.push((lc + rest * lb + kf * lq).exp());
        }
        Self { clean, perturbed }
    }
}

impl RegionTable<BigRational> {
    /// Exact masses for a rational `β`.
    pub fn exact(r: usize, beta: &BigRational) -> Self {
        let q = BigRational::one() - beta;
        let pow = |b: &BigRational, e: usize| num_traits::pow(b.clone(), e);
        let mut clean = Vec::with_capacity(r + 1);
        let mut perturbed = Vec::with_capacity(r + 1);
        let mut binom = BigInt::one();
        for k in 0..=r {
            let c = BigRational::from_integer(binom.clone());
            clean.push(&c * pow(beta, k) * pow(&q, r - k));
            perturbed.push(&c * pow(beta, r - k) * pow(&q, k));
            binom = binom * BigInt::from(r - k) / BigInt::from(k + 1);
        }
        Self { clean, perturbed }
    }
}

/// Greedy Neyman–Pearson fill: take regions in decreasing clean/perturbed
/// ratio (`k = r … 0`) until clean mass `p_lower` is used, the boundary
/// region fractionally, and return the perturbed mass collected.
///
/// Evaluated through the complement: the clean mass left out, `1 − p_lower`,
/// sits in the lowest-ratio regions (`k = 0, 1, …`), and `ρ` is the perturbed
/// mass outside them. This keeps the fractional boundary
/// term proportional to the small leftover mass when `p_lower` is close to 1,
/// where the descending form amplifies rounding by the likelihood ratio.
pub fn greedy_worst_case<T>(table: &RegionTable<T>, p_lower: &T) -> T
where
    T: Clone + Num + PartialOrd,
{
    // Both tables are probability distributions; taking their totals as
    // exactly one keeps `p_lower = 1` from picking up rounding residue.
    let mut left_out = T::one() - p_lower.clone();
    let mut excluded = T::zero();
    for (x, y) in table.clean.iter().zip(&table.perturbed) {
        if left_out <= T::zero() {
            break;
        }
        if x.is_zero() {
            continue;
        }
        if *x <= left_out {
            excluded = excluded + y.clone();
            left_out = left_out - x.clone();
        } else {
            excluded = excluded + y.clone() * left_out.clone() / x.clone();
            left_out = T::zero();
        }
    }
    let rho = T::one() - excluded;
    if rho < T::zero() {
        T::zero()
    } else {
        rho
    }
}

/// `ρ(r)` for a lower bound `p_lower` and keep-probability `beta`.
pub fn worst_case_probability(p_lower: f64, beta: f64, r: usize) -> f64 {
    greedy_worst_case(&RegionTable::new(r, beta), &p_lower)
}

/// Certified perturbation size and whether the scan hit `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifiedSize {
    pub radius: usize,
    pub saturated: bool,
}

/// Largest `r ≤ r_max` with `ρ(r') > 1/2` for every `r' ≤ r`.
pub fn certified_size(p_lower: f64, spec: &NoiseSpec, r_max: usize) -> Result<CertifiedSize> {
    let beta = spec.beta();
    if beta >= 1.0 {
        return Err(Error::Parameter(
            "certified size is undefined for beta = 1 (likelihood ratio is infinite)".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p_lower) {
        return Err(Error::Domain(format!("p_lower {p_lower} outside [0, 1]")));
    }
    if p_lower <= 0.5 {
        return Ok(CertifiedSize {
            radius: 0,
            saturated: false,
        });
    }
    let mut previous = p_lower;
    for r in 1..=r_max {
        let rho = worst_case_probability(p_lower, beta, r);
        if rho > previous + MONOTONE_SLACK {
            return Err(Error::Numeric {
                stage: "worst-case probability increased with radius",
            });
        }
        if rho <= 0.5 {
            return Ok(CertifiedSize {
                radius: r - 1,
                saturated: false,
            });
        }
        previous = rho;
    }
    Ok(CertifiedSize {
        radius: r_max,
        saturated: true,
    })
}
