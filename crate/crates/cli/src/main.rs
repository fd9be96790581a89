use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fraudnet::pipeline::{self, PipelineConfig, Run};
use fraudnet::synth::SynthConfig;
use fraudnet::{BipartiteGraph, Error};

#[derive(Parser)]
#[command(name = "fraudnet", version, about = "Network-based claim fraud scoring and model evaluation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Pipeline config (TOML or JSON). For `generate`, the generator config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 4 when the ranking does not converge.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the graph from the edge file and store a snapshot.
    Build,
    /// Score claims and parties from historic fraud.
    Birank {
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Compute network features for target-period claims.
    Featurize {
        /// File of claim ids (one per line, optional `claim_id` header)
        /// to featurize instead of the target period.
        #[arg(long)]
        targets: Option<PathBuf>,
    },
    /// List 4- and 6-cycles and report label homophily.
    Motifs,
    /// Write a synthetic dataset.
    Generate,
    /// Assemble the D_known and D_fraud datasets.
    MakeDatasets,
    /// Rank features, fit and evaluate models on both datasets.
    Experiment,
    /// Run every stage in order.
    Pipeline,
}

fn load_config(g: &Global) -> fraudnet::Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(o) = &g.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_targets(path: &Path, g: &BipartiteGraph) -> fraudnet::Result<Vec<usize>> {
    let mut out = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let id = line.trim();
        if id.is_empty() || (n == 0 && id == "claim_id") {
            continue;
        }
        out.push(g.claim_index(id).ok_or_else(|| Error::UnknownClaimId(id.to_string()))?);
    }
    Ok(out)
}

/// Returns whether every iterative solver converged.
fn execute(cli: &Cli) -> fraudnet::Result<bool> {
    if let Command::Generate = cli.command {
        let mut cfg = match &cli.global.config {
            Some(p) => SynthConfig::load(p)?,
            None => SynthConfig::default(),
        };
        if let Some(s) = cli.global.seed {
            cfg.seed = Some(s);
        }
        let dir = cli.global.out.clone().unwrap_or_else(|| PathBuf::from("."));
        let m = pipeline::generate_dataset(&cfg, &dir)?;
        log::info!("wrote {} claims, {} edges to {}", m.summary.n_claims, m.summary.n_edges, dir.display());
        return Ok(true);
    }

    let mut cfg = load_config(&cli.global)?;
    if let Command::Birank { alpha: Some(a) } = cli.command {
        cfg.birank.alpha = a;
        cfg.validate()?;
    }
    if let Command::Pipeline = cli.command {
        let outcome = pipeline::run_pipeline(&cfg)?;
        return Ok(outcome.manifest.convergence.is_none_or(|c| c.converged));
    }

    let stage = match cli.command {
        Command::Build => "build",
        Command::Birank { .. } => "birank",
        Command::Featurize { .. } => "featurize",
        Command::Motifs => "motifs",
        Command::MakeDatasets => "make_datasets",
        Command::Experiment => "experiment",
        Command::Generate | Command::Pipeline => unreachable!(),
    };
    let mut run = Run::new(&cfg, stage)?;
    match &cli.command {
        Command::Build => {
            pipeline::stage_build(&mut run)?;
        }
        Command::Birank { .. } => {
            let g = pipeline::load_or_build_graph(&mut run)?;
            let labels = pipeline::load_labels(&mut run, &g)?;
            pipeline::stage_birank(&mut run, &g, &labels)?;
        }
        Command::Featurize { targets } => {
            let g = pipeline::load_or_build_graph(&mut run)?;
            let labels = pipeline::load_labels(&mut run, &g)?;
            let scores = pipeline::load_scores(&mut run, &g)?;
            let (targets, cutoff) = match targets {
                Some(p) => (read_targets(p, &g)?, cfg.cutoff_day),
                None => {
                    let (cutoff, _, _) = pipeline::resolve_cutoff(&cfg, &labels)?;
                    (pipeline::target_claims(&labels, cutoff), Some(cutoff))
                }
            };
            pipeline::stage_featurize(&mut run, &g, &scores, &labels, &targets, cutoff)?;
        }
        Command::Motifs => {
            let g = pipeline::load_or_build_graph(&mut run)?;
            let labels = if cfg.input.labels.exists() { Some(pipeline::load_labels(&mut run, &g)?) } else { None };
            pipeline::stage_motifs(&mut run, &g, labels.as_ref(), true)?;
        }
        Command::MakeDatasets => {
            pipeline::stage_make_datasets(&mut run)?;
        }
        Command::Experiment => {
            pipeline::stage_experiment(&mut run)?;
        }
        Command::Generate | Command::Pipeline => unreachable!(),
    }
    let converged = run.converged();
    run.finish()?;
    Ok(converged)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::error!("{e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if cli.global.strict => {
            log::error!("ranking did not converge");
            ExitCode::from(4)
        }
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
