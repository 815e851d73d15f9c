use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;

use super::config::{AttackMode, ExperimentConfig};
use crate::attack::{minmax_poisoning, pgd_evasion, AttackReport, SchemeKind};
use crate::gcn::train;
use crate::graph::{split_nodes, to_real};
use crate::{Error, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const PARTIAL_FILE: &str = "results.partial.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

const RESULT_HEADER: [&str; 10] = [
    "seed",
    "axis",
    "value",
    "scheme",
    "status",
    "pre_accuracy",
    "post_accuracy",
    "budget",
    "budget_used",
    "reason",
];

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Ok {
        pre_accuracy: f64,
        post_accuracy: f64,
        budget_used: usize,
    },
    Failed {
        reason: String,
    },
}

/// One (seed, sweep value, scheme) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub seed: u64,
    pub value: f64,
    pub scheme: SchemeKind,
    /// Resolved flip budget; 0 when the cell failed before resolving it.
    pub budget: usize,
    pub outcome: CellOutcome,
    pub attack_seconds: f64,
    pub certification_seconds: f64,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        matches!(self.outcome, CellOutcome::Ok { .. })
    }

    fn key(&self) -> CellKey {
        CellKey::new(self.seed, self.value, self.scheme)
    }

    fn record(&self, axis: &str) -> Vec<String> {
        let (status, pre, post, used, reason) = match &self.outcome {
            CellOutcome::Ok {
                pre_accuracy,
                post_accuracy,
                budget_used,
            } => (
                "ok",
                pre_accuracy.to_string(),
                post_accuracy.to_string(),
                budget_used.to_string(),
                String::new(),
            ),
            CellOutcome::Failed { reason } => ("failed", String::new(), String::new(), String::new(), reason.clone()),
        };
        vec![
            self.seed.to_string(),
            axis.to_string(),
            self.value.to_string(),
            self.scheme.to_string(),
            status.to_string(),
            pre,
            post,
            self.budget.to_string(),
            used,
            reason,
        ]
    }

    fn parse(record: &csv::StringRecord) -> Option<Self> {
        let field = |i: usize| record.get(i).unwrap_or("");
        let outcome = match field(4) {
            "ok" => CellOutcome::Ok {
                pre_accuracy: field(5).parse().ok()?,
                post_accuracy: field(6).parse().ok()?,
                budget_used: field(8).parse().ok()?,
            },
            "failed" => CellOutcome::Failed {
                reason: field(9).to_string(),
            },
            _ => return None,
        };
        Some(Self {
            seed: field(0).parse().ok()?,
            value: field(2).parse().ok()?,
            scheme: field(3).parse().ok()?,
            budget: field(7).parse().ok()?,
            outcome,
            attack_seconds: f64::NAN,
            certification_seconds: f64::NAN,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CellKey {
    seed: u64,
    value_bits: u64,
    scheme: SchemeKind,
}

impl CellKey {
    fn new(seed: u64, value: f64, scheme: SchemeKind) -> Self {
        Self {
            seed,
            value_bits: value.to_bits(),
            scheme,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub jobs: usize,
    pub resume: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { jobs: 1, resume: false }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// All cells in (seed, value, scheme) configuration order.
    pub rows: Vec<ResultRow>,
    pub failed: usize,
    /// Cells taken over from a previous run.
    pub resumed: usize,
}

/// Runs the attack of one cell end to end and returns its report.
pub fn run_cell(config: &ExperimentConfig, seed: u64, value: f64, scheme: SchemeKind) -> Result<AttackReport<f64>> {
    let graph = config.dataset.build::<f64>(seed)?;
    let split = split_nodes(&graph, config.split, seed)?;
    let attack = config.cell_attack(value, scheme, seed, graph.num_edges())?;
    let train_cfg = config.cell_train(seed);
    match config.mode {
        AttackMode::Evasion => {
            let params = train(&graph, &split, &to_real(graph.adjacency()), &train_cfg)?;
            pgd_evasion(&params, &graph, &split, &attack)
        }
        AttackMode::Poisoning => minmax_poisoning(&graph, &split, &train_cfg, &attack),
    }
}

fn cell_row(config: &ExperimentConfig, seed: u64, value: f64, scheme: SchemeKind) -> ResultRow {
    let mut row = ResultRow {
        seed,
        value,
        scheme,
        budget: 0,
        outcome: CellOutcome::Failed { reason: String::new() },
        attack_seconds: 0.0,
        certification_seconds: 0.0,
    };
    match run_cell(config, seed, value, scheme) {
        Ok(report) => {
            row.budget = report.budget;
            row.attack_seconds = report.attack_seconds;
            row.certification_seconds = report.certification_seconds;
            row.outcome = CellOutcome::Ok {
                pre_accuracy: report.pre_accuracy,
                post_accuracy: report.post_accuracy,
                budget_used: report.flips(),
            };
        }
        Err(e) => {
            log::warn!("cell seed={seed} value={value} scheme={scheme} failed: {e}");
            row.outcome = CellOutcome::Failed {
                reason: error_chain(&e),
            };
        }
    }
    row
}

fn error_chain(e: &Error) -> String {
    let mut msg = e.to_string();
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    msg
}

fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        // A partially written last line of the journal is skipped.
        if let Some(row) = record.ok().as_ref().and_then(ResultRow::parse) {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn read_timings(path: &Path) -> Result<HashMap<CellKey, (f64, f64)>> {
    let mut out = HashMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    for record in reader.records().flatten() {
        let parsed = (|| {
            let key = CellKey::new(
                record.get(0)?.parse().ok()?,
                record.get(1)?.parse().ok()?,
                record.get(2)?.parse().ok()?,
            );
            Some((key, (record.get(3)?.parse().ok()?, record.get(4)?.parse().ok()?)))
        })();
        if let Some((k, v)) = parsed {
            out.insert(k, v);
        }
    }
    Ok(out)
}

fn write_results(path: &Path, axis: &str, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULT_HEADER)?;
    for row in rows {
        w.write_record(row.record(axis))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_timings(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["seed", "value", "scheme", "attack_seconds", "certification_seconds"])?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.value.to_string(),
            r.scheme.to_string(),
            r.attack_seconds.to_string(),
            r.certification_seconds.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-(value, scheme) statistics over successful rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub scheme: SchemeKind,
    pub runs: usize,
    pub pre_mean: f64,
    pub pre_std: f64,
    pub post_mean: f64,
    pub post_std: f64,
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Summaries in order of first appearance of each (value, scheme).
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(u64, SchemeKind)> = Vec::new();
    let mut groups: BTreeMap<(u64, SchemeKind), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let key = (r.value.to_bits(), r.scheme);
        if !order.contains(&key) {
            order.push(key);
        }
        if let CellOutcome::Ok {
            pre_accuracy,
            post_accuracy,
            ..
        } = r.outcome
        {
            let g = groups.entry(key).or_default();
            g.0.push(pre_accuracy);
            g.1.push(post_accuracy);
        }
    }
    order
        .into_iter()
        .filter_map(|key| {
            let (pre, post) = groups.get(&key)?;
            let (pre_mean, pre_std) = mean_std(pre);
            let (post_mean, post_std) = mean_std(post);
            Some(SummaryRow {
                value: f64::from_bits(key.0),
                scheme: key.1,
                runs: pre.len(),
                pre_mean,
                pre_std,
                post_mean,
                post_std,
            })
        })
        .collect()
}

fn write_summary(path: &Path, axis: &str, summary: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["axis", "value", "scheme", "runs", "pre_mean", "pre_std", "post_mean", "post_std"])?;
    for s in summary {
        w.write_record([
            axis.to_string(),
            s.value.to_string(),
            s.scheme.to_string(),
            s.runs.to_string(),
            s.pre_mean.to_string(),
            s.pre_std.to_string(),
            s.post_mean.to_string(),
            s.post_std.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Runs every (seed, value, scheme) cell and writes `results.csv`,
/// `summary.csv` and `timings.csv` under `out_dir`. Failed cells become
/// failed rows. Wall-clock times live only in `timings.csv`, so the other two
/// files are reproducible byte for byte.
pub fn run_sweep(config: &ExperimentConfig, out_dir: impl AsRef<Path>, options: SweepOptions) -> Result<SweepOutcome> {
    config.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let results_path = out_dir.join(RESULTS_FILE);
    let partial_path = out_dir.join(PARTIAL_FILE);
    let timings_path = out_dir.join(TIMINGS_FILE);
    let axis = config.axis.key();

    let mut done: HashMap<CellKey, ResultRow> = HashMap::new();
    if options.resume {
        let timings = read_timings(&timings_path)?;
        for mut row in read_rows(&results_path)?.into_iter().chain(read_rows(&partial_path)?) {
            if row.is_ok() {
                if let Some(&(a, c)) = timings.get(&row.key()) {
                    row.attack_seconds = a;
                    row.certification_seconds = c;
                }
                done.insert(row.key(), row);
            }
        }
    } else if partial_path.exists() {
        fs::remove_file(&partial_path).map_err(|e| Error::io(&partial_path, e))?;
    }

    let mut cells = Vec::new();
    for &seed in &config.seeds {
        for &value in &config.values {
            for &scheme in &config.schemes {
                cells.push(CellKey::new(seed, value, scheme));
            }
        }
    }
    let resumed = cells.iter().filter(|k| done.contains_key(k)).count();

    let journal_file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&partial_path)
        .map_err(|e| Error::io(&partial_path, e))?;
    let fresh_journal = journal_file.metadata().map(|m| m.len() == 0).unwrap_or(true);
    let mut journal = csv::WriterBuilder::new().has_headers(false).from_writer(journal_file);
    if fresh_journal {
        journal.write_record(RESULT_HEADER)?;
        journal.flush().map_err(|e| Error::io(&partial_path, e))?;
    }
    let journal = Mutex::new(journal);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", options.jobs)))?;
    let rows: Vec<ResultRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|key| {
                if let Some(row) = done.get(key) {
                    return Ok(row.clone());
                }
                let row = cell_row(config, key.seed, f64::from_bits(key.value_bits), key.scheme);
                let mut j = journal.lock().expect("journal lock");
                j.write_record(row.record(axis))?;
                j.flush().map_err(|e| Error::io(&partial_path, e))?;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    drop(journal);

    write_results(&results_path, axis, &rows)?;
    write_summary(&out_dir.join(SUMMARY_FILE), axis, &summarize(&rows))?;
    write_timings(&timings_path, &rows)?;
    fs::remove_file(&partial_path).map_err(|e| Error::io(&partial_path, e))?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    Ok(SweepOutcome { rows, failed, resumed })
}

/// Output directory of a sweep: the explicit override, else the config's.
pub fn output_dir(config: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir.map_or_else(|| config.output.clone(), Path::to_path_buf)
}

/// Reads a `results.csv` back.
pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows(path)
}
