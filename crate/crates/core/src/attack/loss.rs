use ndarray::Array2;

use crate::gcn::{forward, node_loss, GcnParams, LossKind};
use crate::{Error, Result, Scalar};

/// Weighted attack loss `Σ_u w(u) · ℓ(f(A'; u), y_u)` on a real-valued
/// adjacency. `labels` and `weights` are aligned with `targets`.
pub fn cr_loss<S: Scalar>(
    params: &GcnParams<S>,
    adjacency: &Array2<S>,
    features: &Array2<S>,
    targets: &[usize],
    labels: &[usize],
    weights: &[S],
    kind: LossKind,
) -> Result<S> {
    for (what, len) in [("loss labels", labels.len()), ("loss weights", weights.len())] {
        if len != targets.len() {
            return Err(Error::Dimension {
                what,
                expected: targets.len(),
                found: len,
            });
        }
    }
    let logits = forward(params, adjacency, features)?;
    let n = logits.nrows();
    let mut total = S::zero();
    for ((&u, &y), &w) in targets.iter().zip(labels).zip(weights) {
        if u >= n || y >= logits.ncols() {
            return Err(Error::Domain(format!("target {u} with label {y} out of range")));
        }
        total = total + w * node_loss(logits.row(u), y, kind);
    }
    Ok(total)
}
