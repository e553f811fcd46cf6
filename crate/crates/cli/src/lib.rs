//! Command-line front end for `lsnet-core`: network files, preprocessing,
//! tuning-grid runs, clustering and JSON reports.

pub mod commands;
pub mod config;
pub mod io;
pub mod preprocess;
pub mod report;

use clap::{Parser, Subcommand};

use crate::commands::Command;
use crate::config::{Options, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "lsnet", version, about = "Low-rank plus sparse logistic network models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Draw a synthetic network and its ground truth.
    Simulate(Options),
    /// Fit one (gamma, delta) pair.
    Fit(Options),
    /// Fit every cell of the tuning grid.
    Grid(Options),
    /// Scree, grid, and the heuristic/BIC/AIC picks.
    Select(Options),
    /// Spectral clustering of a saved fit.
    Cluster(Options),
    /// Recovery metrics of a saved fit against a simulated truth.
    Eval(Options),
    /// Preprocess, scree, grid, select, cluster and report in one go.
    Pipeline(Options),
}

impl Sub {
    pub fn split(self) -> (Command, Options) {
        match self {
            Sub::Simulate(o) => (Command::Simulate, o),
            Sub::Fit(o) => (Command::Fit, o),
            Sub::Grid(o) => (Command::Grid, o),
            Sub::Select(o) => (Command::Select, o),
            Sub::Cluster(o) => (Command::Cluster, o),
            Sub::Eval(o) => (Command::Eval, o),
            Sub::Pipeline(o) => (Command::Pipeline, o),
        }
    }
}

/// Resolves the configuration and runs the subcommand.
pub fn run(cli: Cli) -> anyhow::Result<report::Report> {
    let (cmd, opts) = cli.command.split();
    let cfg = RunConfig::resolve(opts)?;
    commands::run(cmd, &cfg)
}
