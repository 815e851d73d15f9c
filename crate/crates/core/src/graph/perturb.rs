use ndarray::Array2;

use super::{num_pairs, upper_pairs};
use crate::{Error, Result, Scalar};

fn check_len(n: usize, len: usize) -> Result<()> {
    if len != num_pairs(n) {
        return Err(Error::Dimension {
            what: "perturbation vector",
            expected: num_pairs(n),
            found: len,
        });
    }
    Ok(())
}

/// `A ⊕ δ` for a binary upper-triangle flip vector, mirrored to the lower triangle.
pub fn apply_perturbation(adjacency: &Array2<u8>, delta: &[u8]) -> Result<Array2<u8>> {
    let n = adjacency.nrows();
    check_len(n, delta.len())?;
    let mut out = adjacency.clone();
    for ((s, t), &d) in upper_pairs(n).zip(delta) {
        if d > 1 {
            return Err(Error::Domain(format!("non-binary flip {d} at ({s}, {t})")));
        }
        if d == 1 {
            let v = out[[s, t]] ^ 1;
            out[[s, t]] = v;
            out[[t, s]] = v;
        }
    }
    Ok(out)
}

/// Continuous surrogate `A + (1 − 2A) ∘ δ` of the XOR, symmetric, zero diagonal.
pub fn relax_perturbation<S: Scalar>(adjacency: &Array2<u8>, delta: &[S]) -> Result<Array2<S>> {
    let n = adjacency.nrows();
    check_len(n, delta.len())?;
    let mut out = to_real::<S>(adjacency);
    for ((s, t), &d) in upper_pairs(n).zip(delta) {
        if !(d >= S::zero() && d <= S::one()) {
            return Err(Error::Domain(format!("relaxed flip {d} at ({s}, {t}) outside [0, 1]")));
        }
        let a = out[[s, t]];
        let v = a + (S::one() - a - a) * d;
        out[[s, t]] = v;
        out[[t, s]] = v;
    }
    Ok(out)
}

pub fn to_real<S: Scalar>(adjacency: &Array2<u8>) -> Array2<S> {
    adjacency.mapv(|a| if a == 1 { S::one() } else { S::zero() })
}
