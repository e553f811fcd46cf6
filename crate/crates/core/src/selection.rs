//! Model selection: scree analysis, tuning grids, information criteria and
//! recovery metrics.

use alloc::format;
use alloc::vec::Vec;

use crate::admm::{self, FitResult};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matching;
use crate::model::{self, AdjacencyMatrix, Hyperparams};
use crate::synth::GroundTruth;
use crate::Matrix;

/// Relative eigenvalue cut-off for [`numerical_rank`].
pub const RANK_REL_TOL: f64 = 1e-6;
/// Magnitude above which a sparse entry counts as non-zero.
pub const SUPPORT_TOL: f64 = 1e-8;
/// Number of eigenvalues in a scree plot.
pub const SCREE_COUNT: usize = 15;
/// Heuristic window on `|S|` relative to `||X||_0`.
pub const SUPPORT_WINDOW: (f64, f64) = (1e-4, 1e-1);

const ELBOW_EPS: f64 = 1e-9;

/// Eigenvalues above `1e-6 * max(lambda_max, 1e-12)`.
pub fn numerical_rank(l: &Matrix) -> usize {
    let eig = linalg::sym_eigenvalues_desc(&linalg::symmetrize(l));
    let Some(&top) = eig.first() else {
        return 0;
    };
    let cut = RANK_REL_TOL * top.max(1e-12);
    eig.iter().filter(|&&v| v > cut).count()
}

/// Pairs `i < j` with `|S_ij| > 1e-8`.
pub fn sparse_support(s: &Matrix) -> Vec<(usize, usize)> {
    let n = s.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if s[(i, j)].abs() > SUPPORT_TOL {
                out.push((i, j));
            }
        }
    }
    out
}

/// The `count` largest eigenvalues of `X`, descending. `count` is clamped to `n`.
pub fn scree_eigenvalues(x: &AdjacencyMatrix, count: usize) -> Vec<f64> {
    let mut eig = linalg::sym_eigenvalues_desc(x.matrix());
    eig.truncate(count.min(x.n()));
    eig
}

/// Result of the automated elbow rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElbowEstimate {
    pub k: usize,
    /// Set when the spectrum has no gap at all; `k` is then 1.
    pub flat: bool,
}

/// How the elbow of a scree plot is located. Both search `j = 1 ..= len - 2`
/// (1-based) and break ties towards the smaller `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElbowRule {
    /// Largest drop `e_j - e_{j+1}`.
    #[default]
    LargestGap,
    /// Largest `(e_j - e_{j+1}) / (e_{j+1} - e_{j+2} + 1e-9)`. Degenerates on
    /// spectra with repeated eigenvalues below the elbow, since the
    /// denominator then collapses to `1e-9`.
    GapRatio,
}

/// Elbow of a descending spectrum under [`ElbowRule::LargestGap`].
pub fn estimate_k_elbow(eigs: &[f64]) -> Result<ElbowEstimate> {
    estimate_k_elbow_with(eigs, ElbowRule::default())
}

pub fn estimate_k_elbow_with(eigs: &[f64], rule: ElbowRule) -> Result<ElbowEstimate> {
    if eigs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "elbow search needs at least 3 eigenvalues, got {}",
            eigs.len()
        )));
    }
    let spread = eigs[0] - eigs[eigs.len() - 1];
    if !(spread > 1e-12 * eigs[0].abs().max(1.0)) {
        return Ok(ElbowEstimate { k: 1, flat: true });
    }
    let mut best = (f64::NEG_INFINITY, 1);
    for j in 1..=eigs.len() - 2 {
        let gap = eigs[j - 1] - eigs[j];
        let score = match rule {
            ElbowRule::LargestGap => gap,
            ElbowRule::GapRatio => gap / (eigs[j] - eigs[j + 1] + ELBOW_EPS),
        };
        if score > best.0 {
            best = (score, j);
        }
    }
    Ok(ElbowEstimate {
        k: best.1,
        flat: false,
    })
}

/// `(bic, aic, |M|)` with `|M| = s + nK - K(K-1)/2 + 1`.
pub fn information_criteria(loglik: f64, rank_l: usize, s_count: usize, n: usize) -> (f64, f64, usize) {
    let k = rank_l;
    let m_size = s_count + n * k + 1 - k * k.saturating_sub(1) / 2;
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let bic = -2.0 * loglik + m_size as f64 * libm::log(pairs);
    let aic = -2.0 * loglik + 2.0 * m_size as f64;
    (bic, aic, m_size)
}

/// One cell of a tuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRow {
    pub gamma: f64,
    pub delta: f64,
    pub rank_l: usize,
    /// Non-zero sparse pairs `i < j`.
    pub s_count: usize,
    /// Unpenalised log-likelihood at the fitted parameters.
    pub loglik: f64,
    pub bic: f64,
    pub aic: f64,
    pub m_size: usize,
    pub objective: f64,
    pub iters: usize,
    pub converged: bool,
}

impl SelectionRow {
    pub fn from_fit(x: &AdjacencyMatrix, gamma: f64, delta: f64, fit: &FitResult) -> Result<Self> {
        let loglik = model::log_likelihood(x, &fit.params)?;
        let s_count = fit.support_size();
        let (bic, aic, m_size) = information_criteria(loglik, fit.rank_l, s_count, x.n());
        Ok(Self {
            gamma,
            delta,
            rank_l: fit.rank_l,
            s_count,
            loglik,
            bic,
            aic,
            m_size,
            objective: fit.objective,
            iters: fit.iters,
            converged: fit.converged,
        })
    }
}

/// Grid summary, rows ordered with `gamma` outer and `delta` inner.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionTable {
    pub rows: Vec<SelectionRow>,
}

/// `steps` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && steps >= 1) {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < lo <= hi and steps >= 1, got {lo}:{hi}:{steps}"
        )));
    }
    if steps == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (libm::log(lo), libm::log(hi));
    Ok((0..steps)
        .map(|t| libm::exp(a + (b - a) * t as f64 / (steps - 1) as f64))
        .collect())
}

/// Default gamma grid: 8 log-spaced values on `[1e-4, 1e-1]`.
pub fn default_gammas() -> Vec<f64> {
    log_space(1e-4, 1e-1, 8).expect("static grid")
}

/// Default delta grid: 8 log-spaced values on `[1e-3, 1]`.
pub fn default_deltas() -> Vec<f64> {
    log_space(1e-3, 1.0, 8).expect("static grid")
}

/// The `(gamma, delta)` cells of a grid in table order.
pub fn grid_cells(gammas: &[f64], deltas: &[f64]) -> Vec<(f64, f64)> {
    gammas
        .iter()
        .flat_map(|&g| deltas.iter().map(move |&d| (g, d)))
        .collect()
}

/// Fits one grid cell.
pub fn fit_cell(x: &AdjacencyMatrix, gamma: f64, delta: f64, h: &Hyperparams) -> Result<(SelectionRow, FitResult)> {
    let fit = admm::fit(x, &h.with_penalties(gamma, delta), None)?;
    let row = SelectionRow::from_fit(x, gamma, delta, &fit)?;
    Ok((row, fit))
}

/// Fits every cell independently and keeps the fits alongside the rows.
pub fn grid_fits(
    x: &AdjacencyMatrix,
    gammas: &[f64],
    deltas: &[f64],
    h: &Hyperparams,
) -> Result<Vec<(SelectionRow, FitResult)>> {
    if gammas.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidArgument("tuning grids must be non-empty".into()));
    }
    grid_cells(gammas, deltas)
        .into_iter()
        .map(|(g, d)| fit_cell(x, g, d, h))
        .collect()
}

/// Fits every `(gamma, delta)` pair and tabulates rank, support size,
/// log-likelihood and information criteria.
pub fn grid_search(x: &AdjacencyMatrix, gammas: &[f64], deltas: &[f64], h: &Hyperparams) -> Result<SelectionTable> {
    Ok(SelectionTable {
        rows: grid_fits(x, gammas, deltas, h)?
            .into_iter()
            .map(|(row, _)| row)
            .collect(),
    })
}

/// Heuristic tuning rule: among rows with `rank = k_hat` and
/// `1e-4 ||X||_0 <= |S| <= 1e-1 ||X||_0`, take the most frequent `|S|` and
/// return its row. Ties prefer the larger `gamma`, then the larger `delta`.
/// Rows that hit the iteration cap stay eligible; check `converged` on the
/// result.
pub fn heuristic_select(table: &SelectionTable, k_hat: usize, x_nnz: usize) -> Result<&SelectionRow> {
    let lo = SUPPORT_WINDOW.0 * x_nnz as f64;
    let hi = SUPPORT_WINDOW.1 * x_nnz as f64;
    let eligible: Vec<&SelectionRow> = table
        .rows
        .iter()
        .filter(|r| r.rank_l == k_hat)
        .filter(|r| lo <= r.s_count as f64 && r.s_count as f64 <= hi)
        .collect();
    let freq = |s: usize| eligible.iter().filter(|r| r.s_count == s).count();
    let top = eligible.iter().map(|r| freq(r.s_count)).max().ok_or(Error::EmptySelection { k_hat, lo, hi })?;
    eligible
        .iter()
        .copied()
        .filter(|r| freq(r.s_count) == top)
        .max_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.delta.total_cmp(&b.delta)))
        .ok_or(Error::EmptySelection { k_hat, lo, hi })
}

fn argmin_by<F: Fn(&SelectionRow) -> f64>(table: &SelectionTable, key: F) -> Option<&SelectionRow> {
    table
        .rows
        .iter()
        .fold(None, |best: Option<&SelectionRow>, r| match best {
            Some(b) if key(b) <= key(r) => Some(b),
            _ => Some(r),
        })
}

/// Row with the smallest BIC (first in table order on ties).
pub fn select_bic(table: &SelectionTable) -> Option<&SelectionRow> {
    argmin_by(table, |r| r.bic)
}

/// Row with the smallest AIC (first in table order on ties).
pub fn select_aic(table: &SelectionTable) -> Option<&SelectionRow> {
    argmin_by(table, |r| r.aic)
}

/// `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

/// Recovery metrics of a fitted model against the generating truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    /// 1 when `rank(L_hat)` equals the number of generating topics `K`.
    pub m1: u8,
    /// Share of true ad-hoc pairs recovered.
    pub m2: Ratio,
    /// Share of true non-ad-hoc pairs flagged as ad-hoc.
    pub m3: Ratio,
    /// Misclassified nodes under the best label matching.
    pub m4: Ratio,
    pub rank_found: usize,
    /// Number of generating topics.
    pub rank_true: usize,
    /// Numerical rank of `L*`. Centering the factors drops it to `K - 1`
    /// when every node carries one topic.
    pub rank_l_star: usize,
    /// Set when the truth has no ad-hoc pairs; `m2` is then reported as 1/1.
    pub m2_by_convention: bool,
}

/// Computes M1-M4.
pub fn evaluate_metrics(
    fit: &FitResult,
    truth: &GroundTruth,
    labels_found: &[usize],
    labels_true: &[usize],
) -> Result<EvalReport> {
    let n = truth.n();
    linalg::ensure_square(&fit.params.s, n)?;
    for labels in [labels_found, labels_true] {
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
    }
    let rank_true = truth.config.k;
    let found = &fit.params.s;
    let (mut tp, mut pos, mut fp, mut neg) = (0, 0, 0, 0);
    for i in 0..n {
        for j in i + 1..n {
            let hit = found[(i, j)].abs() > SUPPORT_TOL;
            if truth.s_star[(i, j)] != 0.0 {
                pos += 1;
                tp += usize::from(hit);
            } else {
                neg += 1;
                fp += usize::from(hit);
            }
        }
    }
    let m2_by_convention = pos == 0;
    Ok(EvalReport {
        m1: u8::from(fit.rank_l == rank_true),
        m2: if m2_by_convention { Ratio { num: 1, den: 1 } } else { Ratio { num: tp, den: pos } },
        m3: Ratio { num: fp, den: neg },
        m4: Ratio {
            num: matching::min_mismatches(labels_found, labels_true),
            den: n,
        },
        rank_found: fit.rank_l,
        rank_true,
        rank_l_star: numerical_rank(&truth.l_star),
        m2_by_convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gamma: f64, delta: f64, rank_l: usize, s_count: usize) -> SelectionRow {
        SelectionRow {
            gamma,
            delta,
            rank_l,
            s_count,
            loglik: -1.0,
            bic: 0.0,
            aic: 0.0,
            m_size: 0,
            objective: 0.0,
            iters: 1,
            converged: true,
        }
    }

    #[test]
    fn elbow_examples() {
        let spectrum = [10.0, 9.5, 9.0, 0.1, 0.05, 0.04, 0.03];
        assert_eq!(estimate_k_elbow(&spectrum).unwrap().k, 3);
        let single = [5.0, 0.1, 0.09, 0.08, 0.07];
        assert_eq!(estimate_k_elbow(&single).unwrap().k, 1);
        let flat = estimate_k_elbow(&[2.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(flat, ElbowEstimate { k: 1, flat: true });
        assert!(estimate_k_elbow(&[1.0, 0.0]).is_err());
        for rule in [ElbowRule::LargestGap, ElbowRule::GapRatio] {
            assert_eq!(estimate_k_elbow_with(&spectrum, rule).unwrap().k, 3);
            assert_eq!(estimate_k_elbow_with(&single, rule).unwrap().k, 1);
        }
        // repeated eigenvalues below the elbow trip the ratio rule
        let tied = [9.0, 8.5, 8.0, 1.7, 1.0, 0.0, 0.0, -1.0, -1.0];
        assert_eq!(estimate_k_elbow(&tied).unwrap().k, 3);
        assert_eq!(estimate_k_elbow_with(&tied, ElbowRule::GapRatio).unwrap().k, 5);
    }

    #[test]
    fn scree_of_simple_graphs() {
        let complete = AdjacencyMatrix::from_edges(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j)))).unwrap();
        let eig = scree_eigenvalues(&complete, 5);
        assert!((eig[0] - 4.0).abs() < 1e-12);
        assert!(eig[1..].iter().all(|v| (v + 1.0).abs() < 1e-12));
        let empty = scree_eigenvalues(&AdjacencyMatrix::empty(6), 15);
        assert_eq!(empty.len(), 6);
        assert!(empty.iter().all(|v| v.abs() < 1e-12));
        let cliques = AdjacencyMatrix::from_edges(
            10,
            (0..10).flat_map(|i| (i + 1..10).map(move |j| (i, j))).filter(|&(i, j)| i / 5 == j / 5),
        )
        .unwrap();
        let eig = scree_eigenvalues(&cliques, 3);
        assert!((eig[0] - 4.0).abs() < 1e-12 && (eig[1] - 4.0).abs() < 1e-12);
        assert!((eig[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn information_criteria_examples() {
        let (bic, aic, m) = information_criteria(-100.0, 3, 9, 30);
        assert_eq!(m, 97);
        let log_pairs = (435.0f64).ln();
        assert!((bic - (200.0 + 97.0 * log_pairs)).abs() < 1e-9);
        assert!((aic - (200.0 + 194.0)).abs() < 1e-12);
        assert!(((aic - bic) - 97.0 * (2.0 - log_pairs)).abs() < 1e-9);
        assert_eq!(information_criteria(0.0, 0, 0, 12).2, 1);
    }

    #[test]
    fn heuristic_picks_modal_support() {
        let table = SelectionTable {
            rows: alloc::vec![
                row(0.1, 0.1, 3, 12),
                row(0.2, 0.1, 3, 12),
                row(0.3, 0.1, 3, 12),
                row(0.4, 0.1, 3, 40),
                row(0.5, 0.1, 2, 12),
            ],
        };
        let pick = heuristic_select(&table, 3, 1000).unwrap();
        assert_eq!(pick.s_count, 12);
        assert_eq!(pick.gamma, 0.3);

        let single = SelectionTable { rows: alloc::vec![row(0.1, 0.2, 2, 5)] };
        assert_eq!(heuristic_select(&single, 2, 100).unwrap().delta, 0.2);
        // window is [0.01, 10]
        assert!(matches!(heuristic_select(&single, 2, 10), Err(Error::EmptySelection { .. })));
        assert!(heuristic_select(&single, 3, 100).is_err());
    }

    #[test]
    fn heuristic_tie_breaks_on_gamma_then_delta() {
        let table = SelectionTable {
            rows: alloc::vec![row(0.1, 0.5, 2, 4), row(0.2, 0.1, 2, 6), row(0.2, 0.3, 2, 4), row(0.1, 0.9, 2, 6)],
        };
        let pick = heuristic_select(&table, 2, 100).unwrap();
        assert_eq!((pick.gamma, pick.delta), (0.2, 0.3));
    }

    #[test]
    fn capped_rows_stay_eligible() {
        let mut capped = row(0.3, 0.1, 2, 5);
        capped.converged = false;
        capped.bic = -1.0;
        let table = SelectionTable {
            rows: alloc::vec![row(0.1, 0.1, 1, 5), capped],
        };
        assert_eq!(heuristic_select(&table, 2, 100).unwrap().gamma, 0.3);
        assert_eq!(select_bic(&table).unwrap().gamma, 0.3);
    }

    #[test]
    fn log_space_endpoints() {
        let g = log_space(1e-4, 1e-1, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[0] - 1e-4).abs() < 1e-18 && (g[3] - 1e-1).abs() < 1e-15);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        assert!(log_space(0.0, 1.0, 3).is_err());
        assert_eq!(default_gammas().len(), 8);
        assert_eq!(grid_cells(&[1.0, 2.0], &[3.0, 4.0, 5.0])[3], (2.0, 3.0));
    }

    #[test]
    fn rank_and_support_helpers() {
        assert_eq!(numerical_rank(&Matrix::zeros(4, 4)), 0);
        let mut l = Matrix::zeros(3, 3);
        l[(0, 0)] = 2.0;
        l[(1, 1)] = 1e-7;
        l[(2, 2)] = 1e-5;
        assert_eq!(numerical_rank(&l), 2);
        let mut s = Matrix::zeros(3, 3);
        s[(0, 2)] = 0.5;
        s[(2, 0)] = 0.5;
        s[(1, 1)] = 3.0;
        s[(0, 1)] = 1e-9;
        assert_eq!(sparse_support(&s), alloc::vec![(0, 2)]);
    }
}
