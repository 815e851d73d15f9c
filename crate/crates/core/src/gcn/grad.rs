use ndarray::{Array2, Zip};

use super::loss::{node_loss_grad, LossKind};
use super::model::{activations, Activations, GcnParams};
use super::normalize::Propagation;
use crate::graph::{relax_perturbation, upper_pairs};
use crate::{Error, Result, Scalar};

/// Weighted per-node loss `Σ_i w_i · ℓ(z_{nodes[i]}, labels[i])`.
///
/// `labels` and `weights` are aligned with `nodes`, so callers only ever hand
/// over the labels of the nodes they optimise. `weights: None` is the plain
/// unweighted sum.
#[derive(Debug, Clone, Copy)]
pub struct NodeObjective<'a, S> {
    pub nodes: &'a [usize],
    pub labels: &'a [usize],
    pub weights: Option<&'a [S]>,
    pub kind: LossKind,
}

impl<'a, S: Scalar> NodeObjective<'a, S> {
    pub fn new(nodes: &'a [usize], labels: &'a [usize], weights: Option<&'a [S]>, kind: LossKind) -> Self {
        Self {
            nodes,
            labels,
            weights,
            kind,
        }
    }

    fn check(&self, n: usize, num_classes: usize) -> Result<()> {
        if self.labels.len() != self.nodes.len() {
            return Err(Error::Dimension {
                what: "objective labels",
                expected: self.nodes.len(),
                found: self.labels.len(),
            });
        }
        if let Some(w) = self.weights {
            if w.len() != self.nodes.len() {
                return Err(Error::Dimension {
                    what: "objective weights",
                    expected: self.nodes.len(),
                    found: w.len(),
                });
            }
        }
        if let Some(&u) = self.nodes.iter().find(|&&u| u >= n) {
            return Err(Error::Domain(format!("objective node {u} outside {n} nodes")));
        }
        if let Some(&y) = self.labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::Domain(format!("objective label {y} outside {num_classes} classes")));
        }
        Ok(())
    }

    /// Objective value and `∂L/∂logits`.
    pub(crate) fn evaluate(&self, logits: &Array2<S>) -> (S, Array2<S>) {
        let mut grad = Array2::<S>::zeros(logits.raw_dim());
        let mut total = S::zero();
        for (i, (&u, &y)) in self.nodes.iter().zip(self.labels).enumerate() {
            let w = self.weights.map_or(S::one(), |w| w[i]);
            let l = node_loss_grad(logits.row(u), y, self.kind, w, grad.row_mut(u));
            total = match self.weights {
                Some(_) => total + w * l,
                None => total + l,
            };
        }
        (total, grad)
    }
}

#[derive(Debug, Clone)]
pub struct Gradients<S> {
    pub loss: S,
    pub w1: Array2<S>,
    pub w2: Array2<S>,
    /// `∂L/∂δ` over the upper triangle; present only when requested.
    pub delta: Option<Vec<S>>,
}

fn backward<S: Scalar>(
    params: &GcnParams<S>,
    prop: &Propagation<S>,
    act: &Activations<S>,
    features: &Array2<S>,
    objective: &NodeObjective<S>,
    base: Option<&Array2<u8>>,
) -> Result<Gradients<S>> {
    let (loss, g_logits) = objective.evaluate(&act.logits);
    let a = &prop.matrix;
    let a_gz = a.dot(&g_logits);
    let w2 = act.hidden.t().dot(&a_gz);
    let mut g_pre = a_gz.dot(&params.w2.t());
    Zip::from(&mut g_pre).and(&act.pre).for_each(|g, &p| {
        if p <= S::zero() {
            *g = S::zero();
        }
    });
    let w1 = features.t().dot(&a.dot(&g_pre));

    let delta = base.map(|base| {
        let n = a.nrows();
        // ∂L/∂Â = G_Z (H W2)ᵀ + G_pre (X W1)ᵀ
        let g_norm = g_logits.dot(&act.hw.t()) + g_pre.dot(&act.xw.t());
        let s = &prop.inv_sqrt_degree;
        // Â_ij = M_ij s_i s_j with s_i = d_i^{-1/2}; ∂L/∂d_i = -½ s_i² Σ_j (G_ij Â_ij + G_ji Â_ji)
        let mut g_degree = vec![S::zero(); n];
        for i in 0..n {
            let mut acc = S::zero();
            for j in 0..n {
                acc = acc + g_norm[[i, j]] * a[[i, j]] + g_norm[[j, i]] * a[[j, i]];
            }
            g_degree[i] = -S::of(0.5) * s[i] * s[i] * acc;
        }
        upper_pairs(n)
            .map(|(p, q)| {
                let sign = if base[[p, q]] == 1 { -S::one() } else { S::one() };
                let direct = (g_norm[[p, q]] + g_norm[[q, p]]) * s[p] * s[q];
                sign * (direct + g_degree[p] + g_degree[q])
            })
            .collect::<Vec<S>>()
    });

    let finite = loss.is_finite()
        && w1.iter().chain(w2.iter()).all(|v| v.is_finite())
        && delta.as_ref().is_none_or(|d| d.iter().all(|v| v.is_finite()));
    if !finite {
        return Err(Error::Numeric { stage: "gradient" });
    }
    Ok(Gradients {
        loss,
        w1,
        w2,
        delta,
    })
}

/// Exact gradients of the objective on `A ⊕ δ` (relaxed) with respect to `W1`,
/// `W2` and every upper-triangle entry of `δ`, including the path through
/// degree normalisation.
pub fn gradients<S: Scalar>(
    params: &GcnParams<S>,
    base: &Array2<u8>,
    delta: &[S],
    features: &Array2<S>,
    objective: &NodeObjective<S>,
) -> Result<Gradients<S>> {
    let n = base.nrows();
    params.check(n, features, n)?;
    objective.check(n, params.num_classes())?;
    let relaxed = relax_perturbation(base, delta)?;
    let prop = Propagation::new(&relaxed);
    let act = activations(params, &prop, features)?;
    backward(params, &prop, &act, features, objective, Some(base))
}

/// Parameter gradients only, on a fixed real adjacency.
pub fn param_gradients<S: Scalar>(
    params: &GcnParams<S>,
    prop: &Propagation<S>,
    features: &Array2<S>,
    objective: &NodeObjective<S>,
) -> Result<Gradients<S>> {
    let n = prop.matrix.nrows();
    params.check(n, features, n)?;
    objective.check(n, params.num_classes())?;
    let act = activations(params, prop, features)?;
    backward(params, prop, &act, features, objective, None)
}
