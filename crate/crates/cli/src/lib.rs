//! Command-line front end: analyze local homophily, generate rewired
//! graphs, build homophily-shifted splits, score predictions and sweep the
//! linear model. The binary is a thin wrapper around [`run`].

mod commands;
mod input;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{AnalyzeArgs, GenerateArgs, MetricsArgs, SbmArgs, SplitArgs, TheoryArgs};

#[derive(Debug, Parser)]
#[command(name = "homophily", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Global and local homophily of a graph, with histogram and summary.
    Analyze(AnalyzeArgs),
    /// Rewire a graph toward a Beta(alpha, beta) local-homophily goal.
    Generate(GenerateArgs),
    /// Homophily-stratified train/val/test splits, one per gamma.
    Split(SplitArgs),
    /// Micro-F1 and statistical parity of prediction files.
    Metrics(MetricsArgs),
    /// Closed-form and simulated logit gap over an affinity grid.
    Theory(TheoryArgs),
    /// Sample a stochastic block model graph with a node table.
    Sbm(SbmArgs),
}

impl Cli {
    /// Runs the parsed command and returns the files it wrote.
    pub fn execute(&self) -> anyhow::Result<Vec<PathBuf>> {
        match &self.command {
            Command::Analyze(args) => commands::analyze(args),
            Command::Generate(args) => commands::generate(args),
            Command::Split(args) => commands::split(args),
            Command::Metrics(args) => commands::metrics(args),
            Command::Theory(args) => commands::theory(args),
            Command::Sbm(args) => commands::sbm(args),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I) -> anyhow::Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)?.execute()
}
