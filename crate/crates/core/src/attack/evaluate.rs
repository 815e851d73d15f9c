use crate::gcn::{predict_all, train, GcnParams, TrainConfig};
use crate::graph::{apply_perturbation, classification_accuracy, to_real, DataSplit, Graph};
use crate::{Error, Result, Scalar};

/// How a perturbed graph is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum EvalMode<'a, S> {
    /// The fixed trained model predicts on the perturbed graph.
    Evasion(&'a GcnParams<S>),
    /// A model is retrained from scratch on the perturbed graph.
    Poisoning(&'a TrainConfig),
}

/// Test accuracy before and after applying the binary perturbation.
pub fn evaluate_attack<S: Scalar>(
    graph: &Graph<S>,
    split: &DataSplit,
    delta: &[u8],
    mode: EvalMode<S>,
) -> Result<(f64, f64)> {
    if delta.len() != graph.num_pairs() {
        return Err(Error::Dimension {
            what: "perturbation length",
            expected: graph.num_pairs(),
            found: delta.len(),
        });
    }
    let clean = graph.adjacency();
    let perturbed = apply_perturbation(clean, delta)?;
    let accuracy = |preds: Vec<usize>| classification_accuracy(&preds, graph.labels(), &split.test);
    match mode {
        EvalMode::Evasion(params) => {
            let pre = accuracy(predict_all(params, clean, graph.features())?)?;
            let post = accuracy(predict_all(params, &perturbed, graph.features())?)?;
            Ok((pre, post))
        }
        EvalMode::Poisoning(config) => {
            let clean_model = train(graph, split, &to_real(clean), config)?;
            let pre = accuracy(predict_all(&clean_model, clean, graph.features())?)?;
            let poisoned = train(graph, split, &to_real(&perturbed), config)?;
            let post = accuracy(predict_all(&poisoned, &perturbed, graph.features())?)?;
            Ok((pre, post))
        }
    }
}
