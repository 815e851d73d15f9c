use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crgraph::attack::{
    minmax_poisoning, pgd_evasion, read_flips, write_flips, write_iterations_csv, write_summary_csv,
};
use crgraph::experiment::{
    output_dir, report_distribution, run_sweep, runtime_profile, AttackMode, ExperimentConfig, SweepOptions,
};
use crgraph::gcn::{predict_all, read_checkpoint, train, write_checkpoint};
use crgraph::graph::{classification_accuracy, split_nodes, to_real, DataSplit, Graph};
use crgraph::smoothing::{certify_nodes, read_certificates_csv, write_certificates_csv, CertifyMode};
use crgraph::{Error, GcnParams64};

#[derive(Parser, Debug)]
#[command(name = "crgraph", version, about = "Certified-robustness-weighted graph structure attacks on GCNs")]
struct Cli {
    /// Experiment config (key = value lines under [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Use this single seed instead of the config's seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep cells.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Keep finished sweep rows from a previous run.
    #[arg(long, global = true)]
    resume: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a GCN on the clean graph and save a checkpoint.
    Train,
    /// Certify the test nodes of a trained (evasion) or retrained (poisoning) model.
    Certify {
        /// Checkpoint from `train`; evasion trains one if absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Weighted PGD evasion attack, once per configured scheme.
    AttackEvasion,
    /// Weighted min-max poisoning attack, once per configured scheme.
    AttackPoisoning,
    /// Run the configured sweep.
    Sweep,
    /// Histogram of flipped pairs by their endpoints' certified sizes.
    ReportDistribution {
        #[arg(long)]
        flips: PathBuf,
        #[arg(long)]
        certificates: PathBuf,
    },
    /// Time the certified attack over the configured sample counts.
    Profile,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parameter(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Context {
    config: ExperimentConfig,
    seed: u64,
    out: PathBuf,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let mut config = match &cli.config {
            Some(path) => ExperimentConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?,
            None => ExperimentConfig::defaults(AttackMode::Evasion),
        };
        if let Some(seed) = cli.seed {
            config.seeds = vec![seed];
        }
        if cli.jobs == 0 {
            return Err(Failure::Config("config error: --jobs must be at least 1".into()));
        }
        let out = output_dir(&config, cli.out.as_deref());
        fs::create_dir_all(&out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
        Ok(Self {
            seed: config.seeds[0],
            config,
            out,
        })
    }

    fn graph(&self) -> Result<(Graph<f64>, DataSplit), Error> {
        let graph = self.config.dataset.build::<f64>(self.seed)?;
        let split = split_nodes(&graph, self.config.split, self.seed)?;
        Ok((graph, split))
    }

    fn file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn test_accuracy(params: &GcnParams64, graph: &Graph<f64>, split: &DataSplit) -> Result<f64, Error> {
    let preds = predict_all(params, graph.adjacency(), graph.features())?;
    classification_accuracy(&preds, graph.labels(), &split.test)
}

fn cmd_train(ctx: &Context) -> Result<(), Failure> {
    let (graph, split) = ctx.graph()?;
    let params = train(&graph, &split, &to_real(graph.adjacency()), &ctx.config.cell_train(ctx.seed))?;
    let path = ctx.file("model.ckpt");
    write_checkpoint(&params, &path)?;
    println!("test_accuracy={} checkpoint={}", test_accuracy(&params, &graph, &split)?, path.display());
    Ok(())
}

fn cmd_certify(ctx: &Context, model: Option<&Path>) -> Result<(), Failure> {
    let (graph, split) = ctx.graph()?;
    let train_cfg = ctx.config.cell_train(ctx.seed);
    let attack = &ctx.config.attack;
    let smoothing = crgraph::smoothing::SmoothingConfig {
        seed: ctx.seed,
        ..attack.smoothing.clone()
    };
    let labels: Vec<usize> = split.test.iter().map(|&u| graph.labels()[u]).collect();
    let train_labels: Vec<usize> = split.train.iter().map(|&u| graph.labels()[u]).collect();
    let params;
    let mode = match ctx.config.mode {
        AttackMode::Evasion => {
            params = match model {
                Some(path) => read_checkpoint(path)?,
                None => train(&graph, &split, &to_real(graph.adjacency()), &train_cfg)?,
            };
            CertifyMode::Evasion { params: &params }
        }
        AttackMode::Poisoning => CertifyMode::Poisoning {
            train_config: &train_cfg,
            train_nodes: &split.train,
            train_labels: &train_labels,
        },
    };
    let certs = certify_nodes(
        mode,
        graph.adjacency(),
        graph.features(),
        graph.num_classes(),
        &split.test,
        &labels,
        &attack.noise,
        &smoothing,
        attack.r_max,
    )?;
    let path = ctx.file("certificates.csv");
    write_certificates_csv(&certs, smoothing.alpha, attack.noise.beta(), &path)?;
    let certified = certs.iter().filter(|c| c.certified_size > 0).count();
    println!("nodes={} certified={} file={}", certs.len(), certified, path.display());
    Ok(())
}

fn cmd_attack(ctx: &Context, mode: AttackMode) -> Result<(), Failure> {
    let (graph, split) = ctx.graph()?;
    let train_cfg = ctx.config.cell_train(ctx.seed);
    let value = ctx.config.values[0];
    let params = match mode {
        AttackMode::Evasion => Some(train(&graph, &split, &to_real(graph.adjacency()), &train_cfg)?),
        AttackMode::Poisoning => None,
    };
    for &scheme in &ctx.config.schemes {
        let cfg = ctx.config.cell_attack(value, scheme, ctx.seed, graph.num_edges())?;
        let report = match &params {
            Some(p) => pgd_evasion(p, &graph, &split, &cfg)?,
            None => minmax_poisoning(&graph, &split, &train_cfg, &cfg)?,
        };
        let stem = format!("{}_{}", mode.name(), scheme);
        write_iterations_csv(&report, ctx.file(&format!("{stem}_iterations.csv")))?;
        write_summary_csv(&report, ctx.file(&format!("{stem}_summary.csv")))?;
        write_flips(graph.adjacency(), report.binary(), ctx.file(&format!("{stem}_flips.tsv")))?;
        if !report.initial_certificates.is_empty() {
            write_certificates_csv(
                &report.initial_certificates,
                cfg.smoothing.alpha,
                cfg.noise.beta(),
                ctx.file(&format!("{stem}_certificates.csv")),
            )?;
        }
        println!(
            "scheme={} budget={} flips={} pre_accuracy={} post_accuracy={}",
            scheme,
            report.budget,
            report.flips(),
            report.pre_accuracy,
            report.post_accuracy
        );
    }
    Ok(())
}

fn cmd_sweep(ctx: &Context, cli: &Cli) -> Result<ExitCode, Failure> {
    let options = SweepOptions {
        jobs: cli.jobs,
        resume: cli.resume,
    };
    let outcome = run_sweep(&ctx.config, &ctx.out, options)?;
    println!(
        "cells={} failed={} resumed={} dir={}",
        outcome.rows.len(),
        outcome.failed,
        outcome.resumed,
        ctx.out.display()
    );
    Ok(if outcome.failed > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_distribution(ctx: &Context, flips: &Path, certificates: &Path) -> Result<(), Failure> {
    let (graph, _) = ctx.graph()?;
    let delta = read_flips(graph.adjacency(), flips)?;
    let certs = read_certificates_csv(certificates)?;
    let path = ctx.file("distribution.csv");
    let h = report_distribution(&delta, graph.num_nodes(), &certs, &path)?;
    println!("mapped={} none={} file={}", h.by_size.values().sum::<usize>(), h.none, path.display());
    Ok(())
}

fn cmd_profile(ctx: &Context) -> Result<(), Failure> {
    let path = ctx.file("profile.csv");
    let profile = runtime_profile(&ctx.config, &path)?;
    for r in &profile.rows {
        println!(
            "N={} attack_seconds={:.3} certification_seconds={:.3}",
            r.num_samples, r.attack_seconds, r.certification_seconds
        );
    }
    if let Some(ok) = profile.scaling_ok {
        println!("scaling_ok={ok}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Train => cmd_train(&ctx)?,
        Command::Certify { model } => cmd_certify(&ctx, model.as_deref())?,
        Command::AttackEvasion => cmd_attack(&ctx, AttackMode::Evasion)?,
        Command::AttackPoisoning => cmd_attack(&ctx, AttackMode::Poisoning)?,
        Command::Sweep => return cmd_sweep(&ctx, cli),
        Command::ReportDistribution { flips, certificates } => cmd_distribution(&ctx, flips, certificates)?,
        Command::Profile => cmd_profile(&ctx)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
