//! Run configuration: command-line flags layered over an optional TOML file
//! layered over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use lsnet_core::selection;
use lsnet_core::Hyperparams;
use serde::{Deserialize, Serialize};

use crate::io::NetworkFormat;

/// `lo:hi:steps`, expanded log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        Ok(selection::log_space(self.lo, self.hi, self.steps)?)
    }
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            bail!("grid must look like lo:hi:steps, got {s:?}");
        };
        let spec = GridSpec {
            lo: lo.trim().parse().with_context(|| format!("bad grid bound {lo:?}"))?,
            hi: hi.trim().parse().with_context(|| format!("bad grid bound {hi:?}"))?,
            steps: steps.trim().parse().with_context(|| format!("bad grid size {steps:?}"))?,
        };
        spec.values()?;
        Ok(spec)
    }
}

impl TryFrom<String> for GridSpec {
    type Error = anyhow::Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        format!("{}:{}:{}", g.lo, g.hi, g.steps)
    }
}

pub const DEFAULT_GAMMA_GRID: GridSpec = GridSpec {
    lo: 1e-4,
    hi: 1e-1,
    steps: 8,
};
pub const DEFAULT_DELTA_GRID: GridSpec = GridSpec {
    lo: 1e-3,
    hi: 1.0,
    steps: 8,
};

/// Flags shared by every subcommand. Unset flags fall back to the
/// configuration file and then to the defaults listed in each help line.
/// The file uses the flag names as keys plus an optional `[solver]` table.
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Network file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Network file format [default: edges].
    #[arg(long, value_enum)]
    pub format: Option<NetworkFormat>,
    /// Edge-list node ids start at 1.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub one_based: Option<bool>,
    /// Node count for edge lists without a `# nodes:` header.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Synthetic scenario (1 = pure topics, 2 = mixed topics).
    #[arg(long)]
    pub scenario: Option<usize>,
    /// Synthetic case, numbered 1-6 across both scenarios.
    #[arg(long)]
    pub case: Option<usize>,
    /// Seed for simulation and clustering [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// L1 weight on the sparse part.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Nuclear-norm weight on the low-rank part.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Gamma grid as lo:hi:steps [default: 1e-4:1e-1:8].
    #[arg(long)]
    pub grid_gamma: Option<GridSpec>,
    /// Delta grid as lo:hi:steps [default: 1e-3:1:8].
    #[arg(long)]
    pub grid_delta: Option<GridSpec>,
    /// Degree threshold applied before fitting [default: 0].
    #[arg(long)]
    pub min_degree: Option<usize>,
    /// Number of topics, overriding the scree estimate.
    #[arg(long)]
    pub k_hat: Option<usize>,
    /// Number of k-means clusters [default: the embedding dimension, plus one
    /// for simulated cases 4-6].
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Cluster on the 2-D principal projection of the embedding (always on
    /// for simulated cases 4-6).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub project: Option<bool>,
    /// Directory holding a previous `fit` or `pipeline` output.
    #[arg(long)]
    pub fit_dir: Option<PathBuf>,
    /// Labels file (`node,label`) used to restrict the network.
    #[arg(long)]
    pub restrict_labels: Option<PathBuf>,
    /// Cluster of `--restrict-labels` to keep (its giant component is used).
    #[arg(long)]
    pub restrict_cluster: Option<usize>,
    /// Number of sparse pairs listed in the report [default: 10].
    #[arg(long)]
    pub top_edges: Option<usize>,
    /// Output directory [default: out].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// TOML file with any of the above keys plus solver settings.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(skip)]
    pub solver: SolverOverrides,
}

/// Solver settings accepted from the configuration file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolverOverrides {
    pub lambda: Option<f64>,
    pub inner_step: Option<f64>,
    pub inner_tol: Option<f64>,
    pub outer_tol: Option<f64>,
    pub max_outer_iters: Option<usize>,
    pub max_inner_iters: Option<usize>,
}

impl SolverOverrides {
    fn or(self, other: Self) -> Self {
        Self {
            lambda: self.lambda.or(other.lambda),
            inner_step: self.inner_step.or(other.inner_step),
            inner_tol: self.inner_tol.or(other.inner_tol),
            outer_tol: self.outer_tol.or(other.outer_tol),
            max_outer_iters: self.max_outer_iters.or(other.max_outer_iters),
            max_inner_iters: self.max_inner_iters.or(other.max_inner_iters),
        }
    }

    fn apply(&self, mut h: Hyperparams) -> Hyperparams {
        h.lambda = self.lambda.unwrap_or(h.lambda);
        h.inner_step = self.inner_step.unwrap_or(h.inner_step);
        h.inner_tol = self.inner_tol.unwrap_or(h.inner_tol);
        h.outer_tol = self.outer_tol.unwrap_or(h.outer_tol);
        h.max_outer_iters = self.max_outer_iters.unwrap_or(h.max_outer_iters);
        h.max_inner_iters = self.max_inner_iters.unwrap_or(h.max_inner_iters);
        h
    }
}

impl Options {
    /// `self` wins over `file` field by field.
    fn or(self, file: Options) -> Options {
        Options {
            input: self.input.or(file.input),
            format: self.format.or(file.format),
            one_based: self.one_based.or(file.one_based),
            nodes: self.nodes.or(file.nodes),
            scenario: self.scenario.or(file.scenario),
            case: self.case.or(file.case),
            seed: self.seed.or(file.seed),
            gamma: self.gamma.or(file.gamma),
            delta: self.delta.or(file.delta),
            grid_gamma: self.grid_gamma.or(file.grid_gamma),
            grid_delta: self.grid_delta.or(file.grid_delta),
            min_degree: self.min_degree.or(file.min_degree),
            k_hat: self.k_hat.or(file.k_hat),
            clusters: self.clusters.or(file.clusters),
            project: self.project.or(file.project),
            fit_dir: self.fit_dir.or(file.fit_dir),
            restrict_labels: self.restrict_labels.or(file.restrict_labels),
            restrict_cluster: self.restrict_cluster.or(file.restrict_cluster),
            top_edges: self.top_edges.or(file.top_edges),
            out_dir: self.out_dir.or(file.out_dir),
            config: self.config,
            solver: self.solver.or(file.solver),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub format: NetworkFormat,
    pub one_based: bool,
    pub nodes: Option<usize>,
    /// Global case number 1-6 when the run is on a synthetic preset.
    pub case: Option<usize>,
    pub seed: u64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub grid_gamma: GridSpec,
    pub grid_delta: GridSpec,
    pub min_degree: usize,
    pub k_hat: Option<usize>,
    pub clusters: Option<usize>,
    pub project: bool,
    pub fit_dir: Option<PathBuf>,
    pub restrict_labels: Option<PathBuf>,
    pub restrict_cluster: Option<usize>,
    pub top_edges: usize,
    pub out_dir: PathBuf,
    pub solver: SolverOverrides,
}

/// Maps `--scenario`/`--case` to the global case number.
fn resolve_case(scenario: Option<usize>, case: Option<usize>) -> Result<Option<usize>> {
    match (scenario, case) {
        (None, None) => Ok(None),
        (Some(s), None) => bail!("--scenario {s} needs --case"),
        (s, Some(c)) => {
            let owner = match c {
                1..=3 => 1,
                4..=6 => 2,
                _ => bail!("--case must be in 1..=6, got {c}"),
            };
            if let Some(s) = s {
                if s != owner {
                    bail!("case {c} belongs to scenario {owner}, not {s}");
                }
            }
            Ok(Some(c))
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: Options) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => load_file(path)?,
            None => Options::default(),
        };
        let o = flags.or(file);
        Ok(Self {
            case: resolve_case(o.scenario, o.case)?,
            input: o.input,
            format: o.format.unwrap_or_default(),
            one_based: o.one_based.unwrap_or(false),
            nodes: o.nodes,
            seed: o.seed.unwrap_or(1),
            gamma: o.gamma,
            delta: o.delta,
            grid_gamma: o.grid_gamma.unwrap_or(DEFAULT_GAMMA_GRID),
            grid_delta: o.grid_delta.unwrap_or(DEFAULT_DELTA_GRID),
            min_degree: o.min_degree.unwrap_or(0),
            k_hat: o.k_hat,
            clusters: o.clusters,
            project: o.project.unwrap_or(false),
            fit_dir: o.fit_dir,
            restrict_labels: o.restrict_labels,
            restrict_cluster: o.restrict_cluster,
            top_edges: o.top_edges.unwrap_or(10),
            out_dir: o.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            solver: o.solver,
        })
    }

    /// Solver settings with the given penalties.
    pub fn hyperparams(&self, gamma: f64, delta: f64) -> Result<Hyperparams> {
        let h = self.solver.apply(Hyperparams::new(gamma, delta));
        h.validate()?;
        Ok(h)
    }
}

fn load_file(path: &Path) -> Result<Options> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
