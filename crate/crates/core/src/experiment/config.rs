use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::attack::{AttackConfig, MinmaxInit, SchemeKind, WeightScheme};
use crate::gcn::{LossKind, TrainConfig};
use crate::graph::{load_graph, synth_sbm, Graph, SbmParams, SplitRatios};
use crate::smoothing::NoiseSpec;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    /// Regenerated per seed.
    Sbm {
        n: usize,
        k: usize,
        p_in: f64,
        p_out: f64,
        feature_dim: usize,
    },
    Files {
        edges: PathBuf,
        features: PathBuf,
        labels: PathBuf,
        num_classes: Option<usize>,
    },
}

impl DatasetSource {
    pub fn build<S: Scalar>(&self, seed: u64) -> Result<Graph<S>> {
        match self {
            DatasetSource::Sbm {
                n,
                k,
                p_in,
                p_out,
                feature_dim,
            } => synth_sbm(&SbmParams {
                n: *n,
                k: *k,
                p_in: *p_in,
                p_out: *p_out,
                feature_dim: *feature_dim,
                seed,
            }),
            DatasetSource::Files {
                edges,
                features,
                labels,
                num_classes,
            } => {
                let (graph, warnings) = load_graph(edges, features, labels, *num_classes)?;
                if warnings.self_loops + warnings.duplicate_edges > 0 {
                    log::warn!(
                        "dropped {} self-loops and {} duplicate edges",
                        warnings.self_loops,
                        warnings.duplicate_edges
                    );
                }
                Ok(graph)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackMode {
    Evasion,
    Poisoning,
}

impl AttackMode {
    pub fn name(self) -> &'static str {
        match self {
            AttackMode::Evasion => "evasion",
            AttackMode::Poisoning => "poisoning",
        }
    }
}

impl FromStr for AttackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "evasion" => Ok(AttackMode::Evasion),
            "poisoning" => Ok(AttackMode::Poisoning),
            other => Err(Error::Config(format!("unknown attack mode {other:?}"))),
        }
    }
}

/// Hyperparameter varied across sweep cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Budget as a fraction of the clean edge count.
    BudgetRatio,
    Beta,
    Alpha,
    NumSamples,
    A,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::BudgetRatio,
        SweepAxis::Beta,
        SweepAxis::Alpha,
        SweepAxis::NumSamples,
        SweepAxis::A,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::BudgetRatio => "budget_ratio",
            SweepAxis::Beta => "beta",
            SweepAxis::Alpha => "alpha",
            SweepAxis::NumSamples => "num_samples",
            SweepAxis::A => "a",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub split: SplitRatios,
    pub seeds: Vec<u64>,
    pub train: TrainConfig,
    pub mode: AttackMode,
    /// Attack settings; `budget` is overwritten per cell from `budget_ratio`.
    pub attack: AttackConfig,
    pub budget_ratio: f64,
    /// Weight schemes compared inside every cell.
    pub schemes: Vec<SchemeKind>,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Sample counts for the runtime profile.
    pub profile_samples: Vec<usize>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Settings of the reference experiments for `mode` on a 100-node
    /// two-block graph, with the budget ratio as the sweep axis.
    pub fn defaults(mode: AttackMode) -> Self {
        let attack = match mode {
            AttackMode::Evasion => AttackConfig::evasion(0),
            AttackMode::Poisoning => AttackConfig::poisoning(0),
        };
        Self {
            dataset: DatasetSource::Sbm {
                n: 100,
                k: 2,
                p_in: 0.1,
                p_out: 0.01,
                feature_dim: 16,
            },
            split: SplitRatios::default(),
            seeds: vec![0, 1, 2, 3, 4],
            train: TrainConfig::default(),
            mode,
            attack,
            budget_ratio: 0.2,
            schemes: vec![SchemeKind::Certified],
            axis: SweepAxis::BudgetRatio,
            values: vec![0.2],
            profile_samples: match mode {
                AttackMode::Evasion => vec![50, 100, 200],
                AttackMode::Poisoning => vec![5, 10, 20],
            },
            output: PathBuf::from("out"),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut reader = Reader::new(&ini)?;
        let mode: AttackMode = reader.get("attack", "mode")?.unwrap_or(AttackMode::Evasion);
        let mut cfg = Self::defaults(mode);

        let kind: String = reader.get("dataset", "kind")?.unwrap_or_else(|| "sbm".into());
        cfg.dataset = match kind.as_str() {
            "sbm" => {
                let DatasetSource::Sbm {
                    n,
                    k,
                    p_in,
                    p_out,
                    feature_dim,
                } = cfg.dataset
                else {
                    unreachable!()
                };
                DatasetSource::Sbm {
                    n: reader.get("dataset", "n")?.unwrap_or(n),
                    k: reader.get("dataset", "k")?.unwrap_or(k),
                    p_in: reader.get("dataset", "p_in")?.unwrap_or(p_in),
                    p_out: reader.get("dataset", "p_out")?.unwrap_or(p_out),
                    feature_dim: reader.get("dataset", "feature_dim")?.unwrap_or(feature_dim),
                }
            }
            "files" => DatasetSource::Files {
                edges: reader.require("dataset", "edges")?,
                features: reader.require("dataset", "features")?,
                labels: reader.require("dataset", "labels")?,
                num_classes: reader.get("dataset", "num_classes")?,
            },
            other => return Err(Error::Config(format!("unknown dataset kind {other:?}"))),
        };

        let s = &mut cfg.split;
        s.train = reader.get("split", "train")?.unwrap_or(s.train);
        s.val = reader.get("split", "val")?.unwrap_or(s.val);
        s.test = reader.get("split", "test")?.unwrap_or(s.test);
        if let Some(seeds) = reader.list::<u64>("split", "seeds")? {
            cfg.seeds = seeds;
        }

        let t = &mut cfg.train;
        t.learning_rate = reader.get("train", "learning_rate")?.unwrap_or(t.learning_rate);
        t.epochs = reader.get("train", "epochs")?.unwrap_or(t.epochs);
        t.weight_decay = reader.get("train", "weight_decay")?.unwrap_or(t.weight_decay);
        t.hidden_dim = reader.get("train", "hidden_dim")?.unwrap_or(t.hidden_dim);

        let a = &mut cfg.attack;
        cfg.budget_ratio = reader.get("attack", "budget_ratio")?.unwrap_or(cfg.budget_ratio);
        a.iterations = reader.get("attack", "iterations")?.unwrap_or(a.iterations);
        a.refresh_interval = reader.get("attack", "refresh_interval")?.unwrap_or(a.refresh_interval);
        a.step_size = reader.get("attack", "step_size")?.unwrap_or(a.step_size);
        a.inner_step = reader.get("attack", "inner_step")?.unwrap_or(a.inner_step);
        a.outer_step = reader.get("attack", "outer_step")?.unwrap_or(a.outer_step);
        a.inner_steps = reader.get("attack", "inner_steps")?.unwrap_or(a.inner_steps);
        let loss: String = reader.get("attack", "loss")?.unwrap_or_else(|| "ce".into());
        let kappa: f64 = reader.get("attack", "kappa")?.unwrap_or(0.0);
        a.loss = match loss.as_str() {
            "ce" => LossKind::CrossEntropy,
            "cw" => LossKind::cw(kappa)?,
            other => return Err(Error::Config(format!("unknown loss {other:?}"))),
        };
        a.smoothing.num_samples = reader.get("attack", "num_samples")?.unwrap_or(a.smoothing.num_samples);
        a.smoothing.alpha = reader.get("attack", "alpha")?.unwrap_or(a.smoothing.alpha);
        a.smoothing.shared_training_seed = reader
            .get("attack", "shared_training_seed")?
            .unwrap_or(a.smoothing.shared_training_seed);
        if let Some(beta) = reader.get::<f64>("attack", "beta")? {
            a.noise = NoiseSpec::new(beta)?;
        }
        a.scheme.a = reader.get("attack", "a")?.unwrap_or(a.scheme.a);
        a.discretize_trials = reader.get("attack", "discretize_trials")?.unwrap_or(a.discretize_trials);
        a.r_max = reader.get("attack", "r_max")?.unwrap_or(a.r_max);
        let init: String = reader.get("attack", "minmax_init")?.unwrap_or_else(|| "random".into());
        a.minmax_init = match init.as_str() {
            "random" => MinmaxInit::Random,
            "pretrained" => MinmaxInit::Pretrained,
            other => return Err(Error::Config(format!("unknown minmax_init {other:?}"))),
        };
        if let Some(schemes) = reader.list::<SchemeKind>("attack", "schemes")? {
            cfg.schemes = schemes;
        }

        let mut axes = Vec::new();
        for axis in SweepAxis::ALL {
            if let Some(values) = reader.list::<f64>("sweep", axis.key())? {
                if !values.is_empty() {
                    axes.push((axis, values));
                }
            }
        }
        match axes.len() {
            0 => {
                cfg.axis = SweepAxis::BudgetRatio;
                cfg.values = vec![cfg.budget_ratio];
            }
            1 => {
                let (axis, values) = axes.pop().unwrap();
                cfg.axis = axis;
                cfg.values = values;
            }
            _ => {
                let names: Vec<_> = axes.iter().map(|(a, _)| a.key()).collect();
                return Err(Error::Config(format!(
                    "exactly one sweep axis may be set, found {}",
                    names.join(", ")
                )));
            }
        }
        if let Some(samples) = reader.list::<usize>("profile", "num_samples")? {
            cfg.profile_samples = samples;
        }
        if let Some(dir) = reader.get::<PathBuf>("output", "dir")? {
            cfg.output = dir;
        }
        reader.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.seeds.is_empty() {
            return bad("seed list must not be empty".into());
        }
        if self.schemes.is_empty() {
            return bad("scheme list must not be empty".into());
        }
        if self.values.is_empty() {
            return bad("sweep values must not be empty".into());
        }
        if self.profile_samples.is_empty() || self.profile_samples.contains(&0) {
            return bad("profile sample counts must be positive".into());
        }
        for &v in &self.values {
            let ok = match self.axis {
                SweepAxis::BudgetRatio => (0.0..=1.0).contains(&v),
                SweepAxis::Beta => v > 0.5 && v <= 1.0,
                SweepAxis::Alpha => v > 0.0 && v < 1.0,
                SweepAxis::NumSamples => v >= 1.0 && v.fract() == 0.0,
                SweepAxis::A => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return bad(format!("{} value {v} out of range", self.axis));
            }
        }
        if !(0.0..=1.0).contains(&self.budget_ratio) {
            return bad(format!("budget ratio {} out of range", self.budget_ratio));
        }
        let cfg_err = |e: Error| match e {
            Error::Parameter(m) | Error::Config(m) => Error::Config(m),
            other => other,
        };
        self.split.validate().map_err(cfg_err)?;
        self.train.validate().map_err(cfg_err)?;
        self.attack.validate().map_err(cfg_err)?;
        Ok(())
    }

    /// Attack settings of one cell; the budget is resolved against the
    /// graph's clean edge count.
    pub fn cell_attack(&self, value: f64, scheme: SchemeKind, seed: u64, num_edges: usize) -> Result<AttackConfig> {
        let mut a = self.attack.clone();
        let mut ratio = self.budget_ratio;
        match self.axis {
            SweepAxis::BudgetRatio => ratio = value,
            SweepAxis::Beta => a.noise = NoiseSpec::new(value)?,
            SweepAxis::Alpha => a.smoothing.alpha = value,
            SweepAxis::NumSamples => a.smoothing.num_samples = value as usize,
            SweepAxis::A => a.scheme.a = value,
        }
        a.budget = (ratio * num_edges as f64).floor() as usize;
        a.scheme = WeightScheme::new(scheme, a.scheme.a, seed)?;
        a.smoothing.seed = seed;
        a.discretize_seed = seed;
        Ok(a)
    }

    pub fn cell_train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            ..self.train.clone()
        }
    }
}

/// Typed access to an ini document that remembers which keys were read, so
/// misspelled keys are reported instead of silently ignored.
struct Reader<'a> {
    ini: &'a Ini,
    used: Vec<(String, String)>,
}

const SECTIONS: [&str; 7] = ["dataset", "split", "train", "attack", "sweep", "profile", "output"];

impl<'a> Reader<'a> {
    fn new(ini: &'a Ini) -> Result<Self> {
        for section in ini.sections() {
            match section {
                None => {
                    if let Some((k, _)) = ini.general_section().iter().next() {
                        return Err(Error::Config(format!("key {k:?} outside any section")));
                    }
                }
                Some(s) if !SECTIONS.contains(&s) => {
                    return Err(Error::Config(format!("unknown section [{s}]")));
                }
                Some(_) => {}
            }
        }
        Ok(Self { ini, used: Vec::new() })
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<&'a str> {
        self.used.push((section.to_string(), key.to_string()));
        self.ini.get_from(Some(section), key).map(str::trim)
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("[{section}] {key} = {v:?} is not valid"))),
        }
    }

    fn require<T: FromStr>(&mut self, section: &str, key: &str) -> Result<T> {
        self.get(section, key)?
            .ok_or_else(|| Error::Config(format!("[{section}] {key} is required")))
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::Config(format!("[{section}] {key}: {s:?} is not valid")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn finish(self) -> Result<()> {
        for (section, props) in self.ini.iter() {
            let Some(section) = section else { continue };
            for (key, _) in props.iter() {
                if !self.used.iter().any(|(s, k)| s == section && k == key) {
                    return Err(Error::Config(format!("unknown key [{section}] {key}")));
                }
            }
        }
        Ok(())
    }
}
