use ndarray::{ArrayView1, ArrayViewMut1};

use crate::{Error, Result, Scalar};

/// Per-node loss on a logit row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LossKind {
    #[default]
    CrossEntropy,
    /// `max(max_{c≠y} z_c − z_y, −κ)`.
    CwMargin { kappa: f64 },
}


impl LossKind {
    pub fn cw(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::Parameter(format!("CW kappa {kappa} must be >= 0")));
        }
        Ok(LossKind::CwMargin { kappa })
    }
}

/// Highest-scoring class other than `label`, lowest index on ties.
fn runner_up<S: Scalar>(row: ArrayView1<S>, label: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (c, &z) in row.iter().enumerate() {
        if c != label && best.is_none_or(|b| z > row[b]) {
            best = Some(c);
        }
    }
    best
}

pub fn node_loss<S: Scalar>(row: ArrayView1<S>, label: usize, kind: LossKind) -> S {
    match kind {
        LossKind::CrossEntropy => {
            let max = row.fold(S::neg_infinity(), |m, &z| m.max(z));
            let sum: S = row.iter().map(|&z| (z - max).exp()).sum();
            max + sum.ln() - row[label]
        }
        LossKind::CwMargin { kappa } => {
            let floor = -S::of(kappa);
            match runner_up(row, label) {
                Some(j) => (row[j] - row[label]).max(floor),
                None => floor,
            }
        }
    }
}

/// Loss and `∂ℓ/∂z`, the latter scaled by `weight` and added into `grad`.
pub fn node_loss_grad<S: Scalar>(
    row: ArrayView1<S>,
    label: usize,
    kind: LossKind,
    weight: S,
    mut grad: ArrayViewMut1<S>,
) -> S {
    match kind {
        LossKind::CrossEntropy => {
            let max = row.fold(S::neg_infinity(), |m, &z| m.max(z));
            let sum: S = row.iter().map(|&z| (z - max).exp()).sum();
            for (c, &z) in row.iter().enumerate() {
                let p = (z - max).exp() / sum;
                let target = if c == label { S::one() } else { S::zero() };
                grad[c] = grad[c] + weight * (p - target);
            }
            max + sum.ln() - row[label]
        }
        LossKind::CwMargin { kappa } => {
            let floor = -S::of(kappa);
            match runner_up(row, label) {
                Some(j) if row[j] - row[label] > floor => {
                    grad[j] = grad[j] + weight;
                    grad[label] = grad[label] - weight;
                    row[j] - row[label]
                }
                _ => floor,
            }
        }
    }
}
