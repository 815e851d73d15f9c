use crate::{Error, Result};

/// Fraction of `mask` nodes whose prediction equals the label.
pub fn classification_accuracy(predictions: &[usize], labels: &[usize], mask: &[usize]) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::Parameter("accuracy over an empty node set".into()));
    }
    let correct = mask
        .iter()
        .filter(|&&u| predictions[u] == labels[u])
        .count();
    Ok(correct as f64 / mask.len() as f64)
}
