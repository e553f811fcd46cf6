//! The JSON run report. Every key is always written; absent sections are
//! `null` and absent lists are empty.

use lsnet_core::selection::{self, EvalReport, Ratio, SelectionRow};
use lsnet_core::{FitResult, Matrix};
use serde::{Deserialize, Serialize};

use crate::preprocess::PreprocessSummary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub nodes: usize,
    pub edges: usize,
    pub seed: u64,
    pub case: Option<usize>,
    pub restriction: Option<Restriction>,
    pub preprocess: Option<PreprocessSummary>,
    pub scree: Option<ScreeSummary>,
    pub selection: Option<SelectionSummary>,
    pub fit: Option<FitSummary>,
    pub membership: Option<MembershipSummary>,
    pub metrics: Option<MetricsSummary>,
    pub top_edges: Vec<TopEdge>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            nodes: 0,
            edges: 0,
            seed,
            case: None,
            restriction: None,
            preprocess: None,
            scree: None,
            selection: None,
            fit: None,
            membership: None,
            metrics: None,
            top_edges: Vec::new(),
            files: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Sub-network chosen from an earlier clustering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    pub labels_file: String,
    pub cluster: usize,
    pub cluster_size: usize,
    pub giant_component_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeSummary {
    pub eigenvalues: Vec<f64>,
    pub k_elbow: usize,
    pub flat: bool,
    /// `K` used downstream: the elbow unless overridden.
    pub k_hat: usize,
    pub overridden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pick {
    pub gamma: f64,
    pub delta: f64,
    pub rank: usize,
    pub support_size: usize,
    pub converged: bool,
}

impl From<&SelectionRow> for Pick {
    fn from(r: &SelectionRow) -> Self {
        Self {
            gamma: r.gamma,
            delta: r.delta,
            rank: r.rank_l,
            support_size: r.s_count,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub cells: usize,
    pub converged_cells: usize,
    pub table_file: String,
    pub heuristic: Option<Pick>,
    pub bic: Option<Pick>,
    pub aic: Option<Pick>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    pub rank: usize,
    pub support_size: usize,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

impl FitSummary {
    pub fn new(gamma: f64, delta: f64, fit: &FitResult) -> Self {
        Self {
            gamma,
            delta,
            alpha: fit.params.alpha,
            rank: fit.rank_l,
            support_size: fit.support_size(),
            objective: fit.objective,
            iterations: fit.iters,
            converged: fit.converged,
            residual: fit.residual_history.last().copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipSummary {
    pub clusters: usize,
    pub embedding_dim: usize,
    pub projected: bool,
    pub inertia: f64,
    pub rank_deficient: bool,
    pub sizes: Vec<usize>,
    pub labels_file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: usize,
    pub den: usize,
}

impl From<Ratio> for Fraction {
    fn from(r: Ratio) -> Self {
        Self { num: r.num, den: r.den }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub m1: u8,
    pub m2: Fraction,
    pub m3: Fraction,
    pub m4: Fraction,
    pub rank_found: usize,
    pub rank_true: usize,
    pub rank_l_star: usize,
    pub m2_by_convention: bool,
}

impl From<&EvalReport> for MetricsSummary {
    fn from(e: &EvalReport) -> Self {
        Self {
            m1: e.m1,
            m2: e.m2.into(),
            m3: e.m3.into(),
            m4: e.m4.into(),
            rank_found: e.rank_found,
            rank_true: e.rank_true,
            rank_l_star: e.rank_l_star,
            m2_by_convention: e.m2_by_convention,
        }
    }
}

/// A sparse pair, with node ids of the input network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopEdge {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// The `count` largest `S_ij` over the support (`i < j`), ties broken by
/// `(i, j)`. `nodes` maps row indices to input node ids.
pub fn top_edges(s: &Matrix, nodes: &[usize], count: usize) -> Vec<TopEdge> {
    let mut pairs: Vec<(usize, usize)> = selection::sparse_support(s);
    pairs.sort_by(|&(a, b), &(c, d)| s[(c, d)].total_cmp(&s[(a, b)]).then((a, b).cmp(&(c, d))));
    pairs
        .into_iter()
        .take(count)
        .map(|(i, j)| TopEdge {
            i: nodes[i],
            j: nodes[j],
            value: s[(i, j)],
        })
        .collect()
}

/// CSV of a tuning grid.
pub fn selection_csv(rows: &[SelectionRow]) -> String {
    let mut out = String::from("gamma,delta,rank,support_size,loglik,bic,aic,m_size,objective,iterations,converged\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.gamma, r.delta, r.rank_l, r.s_count, r.loglik, r.bic, r.aic, r.m_size, r.objective, r.iters, r.converged
        ));
    }
    out
}

pub fn scree_csv(eigs: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (k, v) in eigs.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", k + 1));
    }
    out
}
