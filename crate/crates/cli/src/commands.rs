//! Subcommand implementations. Each writes its artifacts plus `report.json`
//! into the output directory and returns the report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lsnet_core::membership::{self, MembershipResult};
use lsnet_core::selection::{self, SelectionRow, SelectionTable};
use lsnet_core::synth::{self, GroundTruth};
use lsnet_core::{AdjacencyMatrix, FitResult, Matrix, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::io::{self, EdgeListOptions};
use crate::preprocess::{self, giant_component};
use crate::report::{
    self, FitSummary, MembershipSummary, MetricsSummary, Pick, Report, Restriction, ScreeSummary, SelectionSummary,
};

pub const REPORT_FILE: &str = "report.json";
pub const L_HAT_FILE: &str = "l_hat.csv";
pub const S_HAT_FILE: &str = "s_hat.csv";
pub const NODES_FILE: &str = "nodes.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const PROJECTED_FILE: &str = "projected.csv";
pub const SELECTION_FILE: &str = "selection.csv";
pub const SCREE_FILE: &str = "scree.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Fit,
    Grid,
    Select,
    Cluster,
    Eval,
    Pipeline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Fit => "fit",
            Command::Grid => "grid",
            Command::Select => "select",
            Command::Cluster => "cluster",
            Command::Eval => "eval",
            Command::Pipeline => "pipeline",
        }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Report> {
    let mut out = Output::new(cfg.out_dir.clone());
    let mut report = Report::new(cmd.name(), cfg.seed);
    report.case = cfg.case;
    match cmd {
        Command::Simulate => simulate(cfg, &mut out, &mut report)?,
        Command::Fit => fit(cfg, &mut out, &mut report)?,
        Command::Grid => grid(cfg, &mut out, &mut report, false)?,
        Command::Select => grid(cfg, &mut out, &mut report, true)?,
        Command::Cluster => cluster(cfg, &mut out, &mut report)?,
        Command::Eval => eval(cfg, &mut out, &mut report)?,
        Command::Pipeline => pipeline(cfg, &mut out, &mut report)?,
    }
    report.files = out.written.clone();
    report.files.push(REPORT_FILE.to_string());
    out.write(REPORT_FILE, &report.to_json())?;
    Ok(report)
}

struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    fn new(dir: PathBuf) -> Self {
        Self {
            dir,
            written: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        io::write_atomic(&self.dir.join(name), contents)?;
        if name != REPORT_FILE {
            self.written.push(name.to_string());
        }
        Ok(())
    }
}

/// The network under analysis. `ids[r]` is the input id of row `r`.
struct Source {
    network: AdjacencyMatrix,
    ids: Vec<usize>,
    truth: Option<GroundTruth>,
}

fn simulated(case: usize, seed: u64) -> Result<(GroundTruth, AdjacencyMatrix)> {
    let gt = synth::generate_ground_truth(&synth::preset(case, seed)?)?;
    let x = synth::sample_adjacency(&gt, seed);
    Ok((gt, x))
}

fn load_source(cfg: &RunConfig, report: &mut Report) -> Result<Source> {
    if let Some(path) = &cfg.input {
        let opts = EdgeListOptions {
            one_based: cfg.one_based,
            nodes: cfg.nodes,
        };
        let loaded = io::load_network(path, cfg.format, opts)?;
        if loaded.self_loops_dropped > 0 {
            report
                .warnings
                .push(format!("dropped {} self-loop(s)", loaded.self_loops_dropped));
        }
        let base = usize::from(cfg.one_based);
        let ids = (0..loaded.network.n()).map(|i| i + base).collect();
        return Ok(Source {
            network: loaded.network,
            ids,
            truth: None,
        });
    }
    let Some(case) = cfg.case else {
        bail!("no network given: pass --input FILE or --case N");
    };
    let (gt, network) = simulated(case, cfg.seed)?;
    Ok(Source {
        ids: (0..network.n()).collect(),
        network,
        truth: Some(gt),
    })
}

/// Degree filter, then the optional restriction to one cluster of an earlier
/// run and its giant component. Truth is dropped once rows no longer line up.
fn prepare(cfg: &RunConfig, report: &mut Report) -> Result<Source> {
    let src = load_source(cfg, report)?;
    let pre = preprocess::preprocess(&src.network, cfg.min_degree)?;
    if pre.summary.isolated > 0 {
        report.warnings.push(format!(
            "removed {} isolated node(s) over {} round(s)",
            pre.summary.isolated, pre.summary.isolation_rounds
        ));
    }
    let full = pre.kept.len() == src.network.n();
    let mut ids: Vec<usize> = pre.kept.iter().map(|&r| src.ids[r]).collect();
    let mut network = pre.network;
    report.preprocess = Some(pre.summary);
    let mut truth = src.truth.filter(|_| full);

    match (&cfg.restrict_labels, cfg.restrict_cluster) {
        (None, None) => {}
        (Some(path), Some(cluster)) => {
            let labels = io::read_labels(path)?;
            let wanted: Vec<usize> = labels.iter().filter(|(_, l)| *l == cluster).map(|(id, _)| *id).collect();
            if wanted.is_empty() {
                bail!("cluster {cluster} does not occur in {}", path.display());
            }
            let subset: Vec<usize> = (0..ids.len()).filter(|&r| wanted.contains(&ids[r])).collect();
            if subset.is_empty() {
                bail!("none of the nodes of cluster {cluster} survive preprocessing");
            }
            let (sub, rows) = giant_component(&network, &subset)?;
            report.restriction = Some(Restriction {
                labels_file: path.display().to_string(),
                cluster,
                cluster_size: wanted.len(),
                giant_component_size: rows.len(),
            });
            ids = rows.iter().map(|&r| ids[r]).collect();
            network = sub;
            truth = None;
        }
        _ => bail!("--restrict-labels and --restrict-cluster go together"),
    }
    report.nodes = network.n();
    report.edges = network.edge_count();
    Ok(Source { network, ids, truth })
}

fn simulate(cfg: &RunConfig, out: &mut Output, report: &mut Report) -> Result<()> {
    let case = cfg.case.ok_or_else(|| anyhow!("simulate needs --case (1-3 scenario 1, 4-6 scenario 2)"))?;
    let (gt, x) = simulated(case, cfg.seed)?;
    report.nodes = x.n();
    report.edges = x.edge_count();
    let name = match cfg.format {
        io::NetworkFormat::Edges => "network.txt",
        io::NetworkFormat::Dense => "network_dense.txt",
    };
    out.write(name, &io::format_network(&x, cfg.format, cfg.one_based))?;
    out.write("truth.json", &truth_json(&gt)?)?;
    let ids: Vec<usize> = (0..x.n()).map(|i| i + usize::from(cfg.one_based)).collect();
    out.write(LABELS_FILE, &io::format_labels(&ids, &gt.labels()))?;
    out.write("l_star.csv", &io::format_matrix(&gt.l_star))?;
    out.write("s_star.csv", &io::format_matrix(&gt.s_star))?;
    out.write("p_star.csv", &io::format_matrix(&gt.p_star))?;
    out.write("f_star.csv", &io::format_matrix(&gt.f_star))?;
    Ok(())
}

#[derive(Serialize)]
struct TruthFile<'a> {
    n: usize,
    k: usize,
    n_l: usize,
    l: usize,
    n_m: usize,
    m: usize,
    s_count: usize,
    seed: u64,
    alpha_star: f64,
    d_star: &'a [f64],
    rank_l_star: usize,
    topics: &'a [Vec<usize>],
    overlap_l: &'a [usize],
    overlap_m: &'a [usize],
    adhoc_pairs: &'a [(usize, usize)],
}

fn truth_json(gt: &GroundTruth) -> Result<String> {
    let c = &gt.config;
    let file = TruthFile {
        n: c.n,
        k: c.k,
        n_l: c.n_l,
        l: c.l,
        n_m: c.n_m,
        m: c.m,
        s_count: c.s_count,
        seed: c.seed,
        alpha_star: gt.alpha_star,
        d_star: &gt.d_star,
        rank_l_star: selection::numerical_rank(&gt.l_star),
        topics: &gt.topics,
        overlap_l: &gt.overlap_l,
        overlap_m: &gt.overlap_m,
        adhoc_pairs: &gt.adhoc_pairs,
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

fn write_fit(out: &mut Output, report: &mut Report, cfg: &RunConfig, src: &Source, fit: &FitResult) -> Result<()> {
    out.write(L_HAT_FILE, &io::format_matrix(&fit.params.l))?;
    out.write(S_HAT_FILE, &io::format_matrix(&fit.params.s))?;
    out.write(NODES_FILE, &format_nodes(&src.ids, fit.params.alpha))?;
    report.top_edges = report::top_edges(&fit.params.s, &src.ids, cfg.top_edges);
    if !fit.converged {
        report.warnings.push(format!(
            "fit did not converge in {} iterations (residual {:e})",
            fit.iters,
            fit.residual_history.last().copied().unwrap_or(f64::NAN)
        ));
    }
    Ok(())
}

/// Row index to input id, with the fitted intercept in a comment line.
fn format_nodes(ids: &[usize], alpha: f64) -> String {
    let mut s = format!("# alpha: {alpha}\nindex,node\n");
    for (r, id) in ids.iter().enumerate() {
        s.push_str(&format!("{r},{id}\n"));
    }
    s
}

fn parse_nodes(text: &str) -> Result<(f64, Vec<usize>)> {
    let mut alpha = 0.0;
    let mut ids = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(a) = line.strip_prefix("# alpha:") {
            alpha = a.trim().parse().context("bad alpha line")?;
        } else if !line.starts_with('#') && !line.starts_with("index") {
            let (r, id) = line.split_once(',').ok_or_else(|| anyhow!("bad node line {line:?}"))?;
            if r.trim().parse::<usize>()? != ids.len() {
                bail!("node rows out of order at {line:?}");
            }
            ids.push(id.trim().parse()?);
        }
    }
    Ok((alpha, ids))
}

fn fit(cfg: &RunConfig, out: &mut Output, report: &mut Report) -> Result<()> {
    let (Some(gamma), Some(delta)) = (cfg.gamma, cfg.delta) else {
        bail!("fit needs both --gamma and --delta");
    };
    let src = prepare(cfg, report)?;
    let h = cfg.hyperparams(gamma, delta)?;
    let fit = lsnet_core::fit(&src.network, &h, None)?;
    report.fit = Some(FitSummary::new(gamma, delta, &fit));
    write_fit(out, report, cfg, &src, &fit)
}

fn fit_grid(cfg: &RunConfig, x: &AdjacencyMatrix) -> Result<Vec<(SelectionRow, FitResult)>> {
    let gammas = cfg.grid_gamma.values()?;
    let deltas = cfg.grid_delta.values()?;
    let h = cfg.hyperparams(gammas[0], deltas[0])?;
    selection::grid_cells(&gammas, &deltas)
        .into_par_iter()
        .map(|(g, d)| selection::fit_cell(x, g, d, &h).map_err(Into::into))
        .collect()
}

struct Scree {
    k_hat: usize,
}

fn scree(cfg: &RunConfig, out: &mut Output, report: &mut Report, x: &AdjacencyMatrix) -> Result<Scree> {
    let eigs = selection::scree_eigenvalues(x, selection::SCREE_COUNT);
    out.write(SCREE_FILE, &report::scree_csv(&eigs))?;
    let elbow = selection::estimate_k_elbow(&eigs);
    let k_hat = match (cfg.k_hat, &elbow) {
        (Some(k), _) => k,
        (None, Ok(e)) => e.k,
        (None, Err(e)) => bail!("cannot read K from the scree ({e}); pass --k-hat"),
    };
    if let Ok(e) = &elbow {
        if e.flat {
            report.warnings.push("scree has no visible elbow".into());
        }
    }
    report.scree = Some(ScreeSummary {
        eigenvalues: eigs,
        k_elbow: elbow.as_ref().map_or(0, |e| e.k),
        flat: elbow.as_ref().is_ok_and(|e| e.flat),
        k_hat,
        overridden: cfg.k_hat.is_some(),
    });
    Ok(Scree { k_hat })
}

/// Grid fits and, with `select`, the scree and the three tuning rules.
/// Returns the fits and the heuristic pick's index.
fn grid_core(
    cfg: &RunConfig,
    out: &mut Output,
    report: &mut Report,
    src: &Source,
    select: bool,
) -> Result<(Vec<(SelectionRow, FitResult)>, Option<usize>, usize)> {
    let x = &src.network;
    let fits = fit_grid(cfg, x)?;
    let table = SelectionTable {
        rows: fits.iter().map(|(r, _)| r.clone()).collect(),
    };
    out.write(SELECTION_FILE, &report::selection_csv(&table.rows))?;
    let mut summary = SelectionSummary {
        cells: table.rows.len(),
        converged_cells: table.rows.iter().filter(|r| r.converged).count(),
        table_file: SELECTION_FILE.to_string(),
        heuristic: None,
        bic: None,
        aic: None,
    };
    if summary.converged_cells < summary.cells {
        report.warnings.push(format!(
            "{} of {} grid cells stopped at the iteration cap",
            summary.cells - summary.converged_cells,
            summary.cells
        ));
    }
    let mut pick = None;
    let mut k_hat = 0;
    if select {
        k_hat = scree(cfg, out, report, x)?.k_hat;
        summary.bic = selection::select_bic(&table).map(Pick::from);
        summary.aic = selection::select_aic(&table).map(Pick::from);
        match selection::heuristic_select(&table, k_hat, x.nnz()) {
            Ok(row) => {
                summary.heuristic = Some(Pick::from(row));
                pick = table.rows.iter().position(|r| std::ptr::eq(r, row));
            }
            Err(e) => report.warnings.push(format!("heuristic rule found no cell: {e}")),
        }
    }
    report.selection = Some(summary);
    Ok((fits, pick, k_hat))
}

fn grid(cfg: &RunConfig, out: &mut Output, report: &mut Report, select: bool) -> Result<()> {
    let src = prepare(cfg, report)?;
    grid_core(cfg, out, report, &src, select)?;
    Ok(())
}

/// Default cluster count: `K` plus one for the overlapping scenario presets,
/// where mixed nodes form their own group; `K` otherwise.
fn default_clusters(cfg: &RunConfig, k: usize) -> usize {
    match cfg.case {
        Some(4..=6) if cfg.input.is_none() => k + 1,
        _ => k,
    }
}

fn assign(
    cfg: &RunConfig,
    out: &mut Output,
    report: &mut Report,
    l_hat: &Matrix,
    dim: usize,
    ids: &[usize],
) -> Result<MembershipResult> {
    let emb = membership::spectral_embedding(l_hat, dim)?;
    if emb.rank_deficient {
        report
            .warnings
            .push(format!("embedding dimension {dim} exceeds the numerical rank of L_hat"));
    }
    let project = cfg.project || matches!(cfg.case, Some(4..=6) if cfg.input.is_none());
    let clusters = cfg.clusters.unwrap_or_else(|| default_clusters(cfg, dim));
    if clusters > ids.len() {
        bail!("--clusters {clusters} exceeds the {} nodes", ids.len());
    }
    let points = if project {
        membership::project_principal(&emb.vectors).context("projection needs an embedding of dimension 2 or more")?
    } else {
        emb.vectors.clone()
    };
    let mut result = membership::cluster_nodes(&points, clusters, cfg.seed)?;
    out.write(LABELS_FILE, &io::format_labels(ids, &result.labels))?;
    if project {
        out.write(PROJECTED_FILE, &io::format_matrix(&points))?;
        result.projected = Some(points);
    }
    let mut sizes = vec![0; clusters];
    for &l in &result.labels {
        sizes[l] += 1;
    }
    report.membership = Some(MembershipSummary {
        clusters,
        embedding_dim: dim,
        projected: project,
        inertia: result.inertia,
        rank_deficient: emb.rank_deficient,
        sizes,
        labels_file: LABELS_FILE.to_string(),
    });
    Ok(result)
}

struct SavedFit {
    alpha: f64,
    l: Matrix,
    s: Matrix,
    ids: Vec<usize>,
}

fn read_fit_dir(dir: &Path) -> Result<SavedFit> {
    let l = io::read_matrix(&dir.join(L_HAT_FILE))?;
    let s = io::read_matrix(&dir.join(S_HAT_FILE))?;
    let nodes_path = dir.join(NODES_FILE);
    let text = std::fs::read_to_string(&nodes_path).with_context(|| format!("reading {}", nodes_path.display()))?;
    let (alpha, ids) = parse_nodes(&text).with_context(|| format!("parsing {}", nodes_path.display()))?;
    for (name, m) in [(L_HAT_FILE, &l), (S_HAT_FILE, &s)] {
        if m.nrows() != ids.len() || m.ncols() != ids.len() {
            bail!("{name} is {}x{} but {NODES_FILE} lists {} nodes", m.nrows(), m.ncols(), ids.len());
        }
    }
    Ok(SavedFit { alpha, l, s, ids })
}

fn embedding_dim(cfg: &RunConfig, l: &Matrix) -> Result<usize> {
    match cfg.k_hat {
        Some(k) => Ok(k),
        None => match selection::numerical_rank(l) {
            0 => bail!("L_hat has rank 0; pass --k-hat to choose an embedding dimension"),
            r => Ok(r),
        },
    }
}

fn cluster(cfg: &RunConfig, out: &mut Output, report: &mut Report) -> Result<()> {
    let dir = cfg.fit_dir.as_ref().ok_or_else(|| anyhow!("cluster needs --fit-dir with a saved fit"))?;
    let saved = read_fit_dir(dir)?;
    report.nodes = saved.ids.len();
    let dim = embedding_dim(cfg, &saved.l)?;
    assign(cfg, out, report, &saved.l, dim, &saved.ids)?;
    Ok(())
}

fn as_fit(params: ModelParams) -> FitResult {
    FitResult {
        rank_l: selection::numerical_rank(&params.l),
        support_s: selection::sparse_support(&params.s),
        objective: f64::NAN,
        iters: 0,
        converged: true,
        residual_history: Vec::new(),
        objective_history: Vec::new(),
        inner_iters: 0,
        params,
    }
}

fn metrics(report: &mut Report, fit: &FitResult, gt: &GroundTruth, labels: &[usize]) -> Result<()> {
    let e = selection::evaluate_metrics(fit, gt, labels, &gt.labels())?;
    report.metrics = Some(MetricsSummary::from(&e));
    Ok(())
}

fn eval(cfg: &RunConfig, out: &mut Output, report: &mut Report) -> Result<()> {
    let case = cfg.case.ok_or_else(|| anyhow!("eval needs --case and --seed to regenerate the truth"))?;
    let dir = cfg.fit_dir.as_ref().ok_or_else(|| anyhow!("eval needs --fit-dir with a saved fit"))?;
    let (gt, x) = simulated(case, cfg.seed)?;
    let saved = read_fit_dir(dir)?;
    if saved.ids != (0..gt.n()).collect::<Vec<_>>() {
        bail!("eval needs a fit on the full simulated network of {} nodes", gt.n());
    }
    report.nodes = x.n();
    report.edges = x.edge_count();
    let labels_path = dir.join(LABELS_FILE);
    let labels = if labels_path.exists() {
        let pairs = io::read_labels(&labels_path)?;
        let by_node: BTreeMap<usize, usize> = pairs.into_iter().collect();
        saved
            .ids
            .iter()
            .map(|id| by_node.get(id).copied().ok_or_else(|| anyhow!("node {id} has no label")))
            .collect::<Result<Vec<_>>>()?
    } else {
        let dim = embedding_dim(cfg, &saved.l)?;
        assign(cfg, out, report, &saved.l, dim, &saved.ids)?.labels
    };
    let fit = as_fit(ModelParams {
        alpha: saved.alpha,
        l: saved.l,
        s: saved.s,
    });
    metrics(report, &fit, &gt, &labels)
}

fn pipeline(cfg: &RunConfig, out: &mut Output, report: &mut Report) -> Result<()> {
    let src = prepare(cfg, report)?;
    let (mut fits, pick, k_hat) = grid_core(cfg, out, report, &src, true)?;
    let Some(pick) = pick else {
        bail!(
            "no grid cell has rank {k_hat} and a sparse support inside the window; \
             widen --grid-gamma/--grid-delta or set --k-hat"
        );
    };
    let (row, fit) = fits.swap_remove(pick);
    report.fit = Some(FitSummary::new(row.gamma, row.delta, &fit));
    write_fit(out, report, cfg, &src, &fit)?;
    let labels = assign(cfg, out, report, &fit.params.l, k_hat, &src.ids)?.labels;
    if let Some(gt) = &src.truth {
        metrics(report, &fit, gt, &labels)?;
    }
    Ok(())
}
