use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::config::SchemeKind;
use crate::graph::{pair_index, Perturbation};
use crate::smoothing::Certificate;
use crate::{Error, Result, Scalar};

/// Node weights in force from `iteration` on.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSnapshot {
    pub iteration: usize,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport<S = f64> {
    pub perturbation: Perturbation<S>,
    pub pre_accuracy: f64,
    pub post_accuracy: f64,
    /// Attack loss at the iterate entering each iteration.
    pub per_iteration_loss: Vec<f64>,
    /// `Σ δ` after each projection.
    pub feasible_mass: Vec<f64>,
    pub weights_history: Vec<WeightSnapshot>,
    /// Certificates of the first refresh (clean graph), when certified.
    pub initial_certificates: Vec<Certificate>,
    /// Relaxed iterate after every iteration, if recorded.
    pub trajectory: Vec<Vec<S>>,
    /// `None` for the base attack.
    pub scheme: Option<SchemeKind>,
    pub budget: usize,
    pub attack_seconds: f64,
    pub certification_seconds: f64,
    /// Reads of labels outside the attack's visible node set.
    pub label_violations: usize,
}

impl<S: Scalar> AttackReport<S> {
    pub fn binary(&self) -> &[u8] {
        self.perturbation.binary.as_deref().unwrap_or(&[])
    }

    pub fn flips(&self) -> usize {
        self.perturbation.popcount().unwrap_or(0)
    }

    pub fn scheme_name(&self) -> &'static str {
        self.scheme.map_or("base", SchemeKind::name)
    }

    /// Equality ignoring wall-clock fields.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let strip = |r: &Self| Self {
            attack_seconds: 0.0,
            certification_seconds: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

pub fn write_iterations_csv<S: Scalar>(report: &AttackReport<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "cr_loss", "feasible_mass"])?;
    for (t, (l, m)) in report.per_iteration_loss.iter().zip(&report.feasible_mass).enumerate() {
        w.write_record([t.to_string(), l.to_string(), m.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary_csv<S: Scalar>(report: &AttackReport<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scheme",
        "budget",
        "flips",
        "pre_accuracy",
        "post_accuracy",
        "attack_seconds",
        "certification_seconds",
    ])?;
    w.write_record([
        report.scheme_name().to_string(),
        report.budget.to_string(),
        report.flips().to_string(),
        report.pre_accuracy.to_string(),
        report.post_accuracy.to_string(),
        report.attack_seconds.to_string(),
        report.certification_seconds.to_string(),
    ])?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// One line per flipped pair: `s\tt\tadd` or `s\tt\tremove`.
pub fn write_flips(
    adjacency: &ndarray::Array2<u8>,
    delta: &[u8],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let n = adjacency.nrows();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for ((s, t), _) in crate::graph::upper_pairs(n).zip(delta).filter(|(_, &f)| f == 1) {
        let dir = if adjacency[[s, t]] == 1 { "remove" } else { "add" };
        writeln!(out, "{s}\t{t}\t{dir}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a flip list back into a binary perturbation over `n` nodes. The
/// direction column is checked against `adjacency`.
pub fn read_flips(adjacency: &ndarray::Array2<u8>, path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let n = adjacency.nrows();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut delta = vec![0u8; crate::graph::num_pairs(n)];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Load {
            file: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad(format!("expected 3 tab-separated columns, found {}", cols.len())));
        }
        let s: usize = cols[0].parse().map_err(|_| bad(format!("bad node {:?}", cols[0])))?;
        let t: usize = cols[1].parse().map_err(|_| bad(format!("bad node {:?}", cols[1])))?;
        if s >= n || t >= n || s == t {
            return Err(bad(format!("invalid pair ({s}, {t})")));
        }
        let (s, t) = (s.min(t), s.max(t));
        let expected = if adjacency[[s, t]] == 1 { "remove" } else { "add" };
        if cols[2] != expected {
            return Err(bad(format!("pair ({s}, {t}) should be {expected}, found {:?}", cols[2])));
        }
        delta[pair_index(n, s, t)] = 1;
    }
    Ok(delta)
}
