//! `dbp`: extract structural features, train and evaluate DNA-binding
//! protein classifiers.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "dbp", version, about = "Structure-based DNA-binding protein prediction")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Never touch the network; structures must be cached
    #[arg(long, global = true)]
    offline: bool,
    /// Use raw feature values instead of z-scores
    #[arg(long, global = true)]
    no_normalize: bool,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LearnerKind {
    Svm,
    Ccnn,
}

impl LearnerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Svm => "svm",
            LearnerKind::Ccnn => "ccnn",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Download the structures named in a manifest into the cache
    Fetch {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Compute one feature row per manifest entry
    Extract {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on a labeled feature CSV
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value = "svm")]
        learner: LearnerKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated random 80/20 evaluation
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value = "svm")]
        learner: LearnerKind,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperparameter grid evaluation
    Sweep {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value = "svm")]
        learner: LearnerKind,
        /// e.g. `1..100` or `1,2,5`
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        degree: Option<String>,
        #[arg(long)]
        hidden: Option<String>,
        /// Comma-separated: flat, cascade
        #[arg(long)]
        topology: Option<String>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify feature rows with a trained model
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class charge histograms and composition means
    Report {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn effective_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut config = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if global.offline {
        config.offline = true;
    }
    if global.no_normalize {
        config.evaluation.normalize = false;
    }
    config.verbosity = config.verbosity.max(global.verbose);
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = effective_config(&cli.global)?;
    let level = match config.verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    match cli.command {
        Command::Fetch { manifest, cache } => {
            config.paths.manifest = manifest.or(config.paths.manifest);
            config.paths.cache_dir = cache.or(config.paths.cache_dir);
            config.validate()?;
            commands::fetch(&config)
        }
        Command::Extract { manifest, cache, out } => {
            config.paths.manifest = manifest.or(config.paths.manifest);
            config.paths.cache_dir = cache.or(config.paths.cache_dir);
            config.validate()?;
            commands::extract(&config, out)
        }
        Command::Train { features, learner, out } => {
            config.validate()?;
            commands::train(&config, &features, learner, out)
        }
        Command::Evaluate {
            features,
            learner,
            repeats,
            out,
        } => {
            if let Some(r) = repeats {
                config.evaluation.repeats = r;
            }
            config.validate()?;
            commands::evaluate(&config, &features, learner, out)
        }
        Command::Sweep {
            features,
            learner,
            gamma,
            degree,
            hidden,
            topology,
            repeats,
            out,
        } => {
            if let Some(r) = repeats {
                config.evaluation.repeats = r;
            }
            if let Some(g) = gamma {
                config.sweep.gamma = g;
            }
            if let Some(d) = degree {
                config.sweep.degree = d;
            }
            if let Some(h) = hidden {
                config.sweep.hidden = h;
            }
            if let Some(t) = topology {
                config.sweep.topologies = t
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|e: dbp_core::ccnn::CcnnError| CliError::input(e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            config.validate()?;
            commands::sweep(&config, &features, learner, out)
        }
        Command::Predict { model, features, out } => {
            config.validate()?;
            commands::predict(&config, &model, &features, out)
        }
        Command::Report { features, out } => {
            config.validate()?;
            commands::report(&config, &features, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
