//! Command-line front end for the heating-profile clustering pipeline.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "heatprofile", version, about = "Cluster household heating-load profiles")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Directory of raw household CSVs.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Clean raw CSVs onto a 1-minute grid and apply the filters.
    Ingest,
    /// Build daily mean profiles per dimension.
    Profile,
    /// Engineer feature vectors from the profiles.
    Features,
    /// Compute pairwise distance matrices.
    Distances,
    /// Cluster over the k range and score every result.
    Sweep,
    /// Contingency tables and label agreement across metrics and dimensions.
    Compare,
    /// Generate a planted synthetic dataset.
    Synth,
    /// Summarise the sweep as Markdown.
    Report,
}

impl Cli {
    /// The configuration file (or defaults) with flag overrides applied.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(threads) = self.threads {
            cfg.threads = Some(threads);
        }
        if let Some(out) = &self.output {
            cfg.output_dir = out.clone();
        }
        if let Some(input) = &self.input {
            cfg.input_dir = Some(input.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let run = || -> Result<(), CliError> {
        commands::write_resolved_config(cfg)?;
        match command {
            Command::Ingest => commands::cmd_ingest(cfg).map(drop),
            Command::Profile => commands::cmd_profile(cfg).map(drop),
            Command::Features => commands::cmd_features(cfg),
            Command::Distances => commands::cmd_distances(cfg),
            Command::Sweep => commands::cmd_sweep(cfg),
            Command::Compare => commands::cmd_compare(cfg),
            Command::Synth => commands::cmd_synth(cfg).map(drop),
            Command::Report => commands::cmd_report(cfg).map(drop),
        }
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(run),
        None => run(),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    execute(cli.command, &cli.resolve()?)
}
