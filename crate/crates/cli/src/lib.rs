//! Command-line front end for `ftspec`: file formats, run configuration,
//! commands and the replicated experiments behind `bench`.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ftspec", version, about = "Spectral similarity, clustering and equality tests for functional time series")]
pub struct Cli {
    /// JSON run configuration; options given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit gridded curves to Fourier coefficients.
    Ingest(commands::IngestArgs),
    /// Generate coefficient files from the simulation models.
    Simulate(commands::SimulateArgs),
    /// Pairwise similarity and adjacency matrices.
    Similarity(commands::SimilarityArgs),
    /// Spectral clustering of a similarity matrix.
    Cluster(commands::ClusterArgs),
    /// Choose the number of clusters.
    SelectK(commands::SelectKArgs),
    /// Pairwise equality tests of time-varying spectral density operators.
    Test(commands::TestArgs),
    /// Replicated simulation study.
    Bench(commands::BenchArgs),
}

pub fn run(cli: Cli) -> CliResult<()> {
    use config::merge;
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Ingest(a) => commands::ingest(merge(a, cfg)?),
        Command::Simulate(a) => commands::simulate(merge(a, cfg)?),
        Command::Similarity(a) => commands::similarity(merge(a, cfg)?),
        Command::Cluster(a) => commands::cluster(merge(a, cfg)?),
        Command::SelectK(a) => commands::select_k_cmd(merge(a, cfg)?),
        Command::Test(a) => commands::test(merge(a, cfg)?),
        Command::Bench(a) => commands::bench(merge(a, cfg)?),
    }
}
