use statrs::function::beta::beta_reg;

use crate::{Error, Result};

/// One-sided Clopper–Pearson lower bound: the `alpha`-quantile of
/// `Beta(count, total − count + 1)`. Zero when `count == 0`.
pub fn lower_bound_prob(count: usize, total: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha {alpha} must lie in (0, 1)")));
    }
    if count > total {
        return Err(Error::Parameter(format!("count {count} exceeds total {total}")));
    }
    if count == 0 {
        return Ok(0.0);
    }
    let a = count as f64;
    let b = (total - count) as f64 + 1.0;
    // The regularized incomplete beta is increasing in x; bisect to full precision.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
