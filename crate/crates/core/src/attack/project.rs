use crate::Scalar;

const BISECTION_STEPS: usize = 100;
const BISECTION_WIDTH: f64 = 1e-10;

fn clipped_sum<S: Scalar>(v: &[S], mu: S) -> S {
    v.iter().map(|&x| (x - mu).max(S::zero()).min(S::one())).sum()
}

/// Euclidean projection onto `{p ∈ [0,1]^m : Σ p ≤ budget}`. The budget may
/// be fractional; attacks pass their integer flip budget.
///
/// When clipping alone is not enough, the shift `μ` is bisected and the
/// upper end of the final bracket is used, so the result never exceeds the
/// budget by more than rounding.
pub fn project_budget<S: Scalar>(relaxed: &[S], budget: f64) -> Vec<S> {
    let cap = S::of(budget);
    if clipped_sum(relaxed, S::zero()) <= cap {
        return relaxed.iter().map(|&x| x.max(S::zero()).min(S::one())).collect();
    }
    let mut lo = S::zero();
    let mut hi = relaxed.iter().cloned().fold(S::zero(), S::max);
    for _ in 0..BISECTION_STEPS {
        if (hi - lo).to_f64_lossy() < BISECTION_WIDTH {
            break;
        }
        let mid = (lo + hi) * S::of(0.5);
        if clipped_sum(relaxed, mid) > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    relaxed.iter().map(|&x| (x - hi).max(S::zero()).min(S::one())).collect()
}
