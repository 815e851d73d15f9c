use std::path::Path;

use ndarray::Array2;

use super::{
    certified_size, lower_bound_prob, mc_counts_evasion, mc_counts_poisoning, LabelCounts, NoiseSpec, PoisonSetup,
    SmoothingConfig,
};
use crate::gcn::{GcnParams, TrainConfig};
use crate::{Error, Result, Scalar};

/// Smoothing outcome for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub node: usize,
    pub true_label: usize,
    /// Per-class replicate counts. Empty for certificates read back from CSV.
    pub counts: Vec<usize>,
    pub num_samples: usize,
    pub smoothed_label: usize,
    pub p_lower: f64,
    pub certified_size: usize,
    pub saturated: bool,
}

impl Certificate {
    pub fn top_count(&self) -> usize {
        self.counts.get(self.smoothed_label).copied().unwrap_or(0)
    }
}

/// Turns label counts into certificates. `true_labels` is aligned with
/// `counts.nodes`.
pub fn certify_counts(
    counts: &LabelCounts,
    true_labels: &[usize],
    spec: &NoiseSpec,
    alpha: f64,
    r_max: usize,
) -> Result<Vec<Certificate>> {
    if true_labels.len() != counts.nodes.len() {
        return Err(Error::Dimension {
            what: "certificate labels",
            expected: counts.nodes.len(),
            found: true_labels.len(),
        });
    }
    counts
        .nodes
        .iter()
        .zip(&counts.counts)
        .zip(true_labels)
        .map(|((&node, row), &y)| {
            let mut smoothed = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[smoothed] {
                    smoothed = c;
                }
            }
            let hits = row.get(y).copied().ok_or_else(|| {
                Error::Domain(format!("label {y} of node {node} outside {} classes", row.len()))
            })?;
            let p_lower = lower_bound_prob(hits, counts.num_samples, alpha)?;
            let size = if smoothed == y && p_lower > 0.5 {
                certified_size(p_lower, spec, r_max)?
            } else {
                super::CertifiedSize {
                    radius: 0,
                    saturated: false,
                }
            };
            Ok(Certificate {
                node,
                true_label: y,
                counts: row.clone(),
                num_samples: counts.num_samples,
                smoothed_label: smoothed,
                p_lower,
                certified_size: size.radius,
                saturated: size.saturated,
            })
        })
        .collect()
}

/// Which smoothed classifier is certified.
#[derive(Debug, Clone, Copy)]
pub enum CertifyMode<'a, S> {
    /// Fixed trained classifier, noise at test time.
    Evasion { params: &'a GcnParams<S> },
    /// Classifier retrained on every noisy graph.
    Poisoning {
        train_config: &'a TrainConfig,
        train_nodes: &'a [usize],
        train_labels: &'a [usize],
    },
}

/// Counting, bounding and sizing in one call. `target_labels` is aligned with
/// `targets`.
#[allow(clippy::too_many_arguments)]
pub fn certify_nodes<S: Scalar>(
    mode: CertifyMode<S>,
    adjacency: &Array2<u8>,
    features: &Array2<S>,
    num_classes: usize,
    targets: &[usize],
    target_labels: &[usize],
    spec: &NoiseSpec,
    config: &SmoothingConfig,
    r_max: usize,
) -> Result<Vec<Certificate>> {
    let counts = match mode {
        CertifyMode::Evasion { params } => mc_counts_evasion(params, adjacency, features, targets, spec, config)?,
        CertifyMode::Poisoning {
            train_config,
            train_nodes,
            train_labels,
        } => {
            let setup = PoisonSetup {
                adjacency,
                features,
                train_nodes,
                train_labels,
                num_classes,
            };
            mc_counts_poisoning(&setup, train_config, targets, spec, config)?
        }
    };
    certify_counts(&counts, target_labels, spec, config.alpha, r_max)
}

pub const CERTIFICATE_HEADER: [&str; 9] = [
    "node",
    "true_label",
    "smoothed_label",
    "top_count",
    "N",
    "alpha",
    "beta",
    "p_lower",
    "K",
];

pub fn write_certificates_csv(
    certificates: &[Certificate],
    alpha: f64,
    beta: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(CERTIFICATE_HEADER)?;
    for c in certificates {
        w.write_record([
            c.node.to_string(),
            c.true_label.to_string(),
            c.smoothed_label.to_string(),
            c.top_count().to_string(),
            c.num_samples.to_string(),
            alpha.to_string(),
            beta.to_string(),
            c.p_lower.to_string(),
            c.certified_size.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}

/// Reads certificates written by [`write_certificates_csv`]; per-class counts
/// are not stored, so `counts` comes back empty.
pub fn read_certificates_csv(path: impl AsRef<Path>) -> Result<Vec<Certificate>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<&str> {
            rec.get(k).ok_or_else(|| Error::Load {
                file: path.to_path_buf(),
                line: i + 2,
                message: format!("missing column {}", CERTIFICATE_HEADER[k]),
            })
        };
        let num = |k: usize| -> Result<usize> {
            field(k)?.parse().map_err(|_| Error::Load {
                file: path.to_path_buf(),
                line: i + 2,
                message: format!("bad {}", CERTIFICATE_HEADER[k]),
            })
        };
        let p_lower: f64 = field(7)?.parse().map_err(|_| Error::Load {
            file: path.to_path_buf(),
            line: i + 2,
            message: "bad p_lower".into(),
        })?;
        out.push(Certificate {
            node: num(0)?,
            true_label: num(1)?,
            smoothed_label: num(2)?,
            counts: Vec::new(),
            num_samples: num(4)?,
            p_lower,
            certified_size: num(8)?,
            saturated: false,
        });
    }
    Ok(out)
}
