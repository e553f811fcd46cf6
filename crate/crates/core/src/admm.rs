//! Three-block ADMM for the penalised likelihood.
//!
//! The problem is split over `x = (alpha, M, L, S)` with the consensus set
//! `{M symmetric, M = L + S}`. Each outer iteration runs
//!
//! 1. the x-step: [`prox_smooth`] on `(alpha, M)`, [`prox_l`] on `L` and
//!    [`prox_s`] on `S`, each evaluated at `z - u`;
//! 2. the z-step: [`consensus_project`] of `x + u`;
//! 3. the dual step `u <- u + x - z`,
//!
//! and stops once `||x_M - x_L - x_S||_F <= outer_tol`.

use alloc::vec::Vec;

use wide::f64x4;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{self, AdjacencyMatrix, Hyperparams, ModelParams};
use crate::selection;
use crate::Matrix;

/// Symmetry tolerance for inputs of the eigenvalue prox.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// One ADMM variable block `(alpha, M, L, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub alpha: f64,
    pub m: Matrix,
    pub l: Matrix,
    pub s: Matrix,
}

impl Block {
    pub fn zeros(n: usize) -> Self {
        Self {
            alpha: 0.0,
            m: Matrix::zeros(n, n),
            l: Matrix::zeros(n, n),
            s: Matrix::zeros(n, n),
        }
    }

    fn from_params(p: &ModelParams) -> Self {
        Self {
            alpha: p.alpha,
            m: &p.l + &p.s,
            l: p.l.clone(),
            s: p.s.clone(),
        }
    }
}

/// Primal, consensus and scaled dual iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: Block,
    pub z: Block,
    pub u: Block,
    pub iter: usize,
    /// `||x_M - x_L - x_S||_F` after the latest x-step.
    pub residual: f64,
}

impl AdmmState {
    pub fn new(n: usize) -> Self {
        Self {
            x: Block::zeros(n),
            z: Block::zeros(n),
            u: Block::zeros(n),
            iter: 0,
            residual: f64::INFINITY,
        }
    }
}

/// Outcome of [`fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `(x_alpha, x_L, x_S)` of the final iterate.
    pub params: ModelParams,
    pub objective: f64,
    pub rank_l: usize,
    /// Unordered pairs `i < j` with a non-zero sparse entry.
    pub support_s: Vec<(usize, usize)>,
    pub iters: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// Objective at `(x_alpha, x_L, x_S)` after every iteration.
    pub objective_history: Vec<f64>,
    /// Total inner gradient steps over all outer iterations.
    pub inner_iters: usize,
}

impl FitResult {
    pub fn support_size(&self) -> usize {
        self.support_s.len()
    }
}

/// Data of the smooth sub-problem, flattened over the strict upper triangle
/// in column-major order and packed four pairs per lane. Padding lanes carry
/// `mask = 0` and stay at zero.
struct SmoothProblem {
    n: usize,
    pairs: usize,
    x_upper: Vec<f64x4>,
    mask: Vec<f64x4>,
}

fn pack(values: impl Iterator<Item = f64>, pairs: usize) -> Vec<f64x4> {
    let mut flat: Vec<f64> = values.collect();
    debug_assert_eq!(flat.len(), pairs);
    flat.resize(pairs.div_ceil(4) * 4, 0.0);
    flat.chunks_exact(4)
        .map(|c| f64x4::from([c[0], c[1], c[2], c[3]]))
        .collect()
}

fn upper(m: &Matrix) -> impl Iterator<Item = f64> + '_ {
    (0..m.ncols()).flat_map(move |j| (0..j).map(move |i| m[(i, j)]))
}

/// Logistic function on four lanes. The argument is clamped to `[-700, 700]`,
/// where the result is already saturated, to keep `exp` in range.
#[inline]
fn sigmoid4(t: f64x4) -> f64x4 {
    let t = t.max(f64x4::splat(-700.0));
    f64x4::ONE / (f64x4::ONE + (-t).exp())
}

impl SmoothProblem {
    fn new(x: &AdjacencyMatrix) -> Self {
        let n = x.n();
        let pairs = n * n.saturating_sub(1) / 2;
        Self {
            n,
            pairs,
            x_upper: pack(upper(x.matrix()), pairs),
            mask: pack(core::iter::repeat_n(1.0, pairs), pairs),
        }
    }

    fn gather(&self, m: &Matrix) -> Vec<f64x4> {
        pack(upper(m), self.pairs)
    }

    /// Step size actually used: the configured one unless it exceeds
    /// `1.5 / Lip`, where `Lip = (P + 1) / (4n) + 1/lambda` bounds the
    /// Hessian of the sub-problem (`P` = number of pairs).
    fn step(&self, h: &Hyperparams) -> f64 {
        let lip = (self.pairs as f64 + 1.0) / (4.0 * self.n as f64) + 1.0 / h.lambda;
        h.inner_step.min(1.5 / lip)
    }

    /// Gradient descent on the `(alpha, M)` sub-problem starting from
    /// `(alpha, m_upper)`, updated in place. Returns the number of steps, or
    /// the last step length when the cap is hit or the iterate blows up.
    fn solve(
        &self,
        v_alpha: f64,
        v_upper: &[f64x4],
        alpha: &mut f64,
        m_upper: &mut [f64x4],
        h: &Hyperparams,
    ) -> core::result::Result<usize, f64> {
        let inv_n = 1.0 / self.n as f64;
        let inv_lambda = 1.0 / h.lambda;
        let step = self.step(h);
        let (inv_n4, inv_lambda4, step4) = (f64x4::splat(inv_n), f64x4::splat(inv_lambda), f64x4::splat(step));
        let mut last = f64::INFINITY;
        for t in 1..=h.max_inner_iters {
            let a = *alpha;
            let a4 = f64x4::splat(a);
            let mut resid = f64x4::ZERO;
            let mut change = f64x4::ZERO;
            for (((m, &v), &xv), &w) in m_upper.iter_mut().zip(v_upper).zip(&self.x_upper).zip(&self.mask) {
                let r = (sigmoid4(a4 + *m) - xv) * w;
                resid += r;
                let d = step4 * (r * inv_n4 + (*m - v) * inv_lambda4);
                *m -= d;
                change = change.max(d.abs());
            }
            let da = step * (resid.reduce_add() * inv_n + (a - v_alpha) * inv_lambda);
            *alpha = a - da;
            last = change.to_array().iter().fold(da.abs(), |acc, &c| acc.max(c));
            if !last.is_finite() || !alpha.is_finite() {
                return Err(f64::NAN);
            }
            if last <= h.inner_tol {
                return Ok(t);
            }
        }
        Err(last)
    }

    fn scatter(&self, v: &Matrix, m_upper: &[f64x4]) -> Matrix {
        let mut out = v.clone();
        let mut flat = m_upper.iter().flat_map(|c| c.to_array());
        for j in 0..self.n {
            for i in 0..j {
                out[(i, j)] = flat.next().expect("packed length");
            }
        }
        out
    }
}

fn prox_smooth_from(
    problem: &SmoothProblem,
    v_alpha: f64,
    v_m: &Matrix,
    start_alpha: f64,
    start_m: &Matrix,
    h: &Hyperparams,
) -> Result<(f64, Matrix, usize)> {
    let v_upper = problem.gather(v_m);
    let mut m_upper = problem.gather(start_m);
    let mut alpha = start_alpha;
    match problem.solve(v_alpha, &v_upper, &mut alpha, &mut m_upper, h) {
        Ok(steps) => Ok((alpha, problem.scatter(v_m, &m_upper), steps)),
        Err(last_step) => Err(Error::InnerNotConverged {
            iters: h.max_inner_iters,
            last_step,
            alpha,
            m: problem.scatter(v_m, &m_upper),
        }),
    }
}

/// Proximal map of the smooth likelihood term:
///
/// ```text
/// argmin_{alpha, M}  -(alpha/n) sum_{i<j} X_ij - (1/n) sum_{i<j} X_ij M_ij
///                    + (1/n) sum_{i<j} log(1 + e^{alpha + M_ij})
///                    + (alpha - v_alpha)^2 / (2 lambda) + ||M - V_M||_F^2 / (2 lambda)
/// ```
///
/// solved by gradient descent from `(v_alpha, V_M)` with step
/// `h.inner_step`, stopping when the largest coordinate change drops to
/// `h.inner_tol`. Entries with `i >= j` are returned equal to `V_M`.
pub fn prox_smooth(
    x: &AdjacencyMatrix,
    v_alpha: f64,
    v_m: &Matrix,
    h: &Hyperparams,
) -> Result<(f64, Matrix)> {
    linalg::ensure_square(v_m, x.n())?;
    if !v_alpha.is_finite() || v_m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prox_smooth input"));
    }
    let problem = SmoothProblem::new(x);
    prox_smooth_from(&problem, v_alpha, v_m, v_alpha, v_m, h).map(|(a, m, _)| (a, m))
}

/// Eigenvalue soft-threshold followed by centering:
/// `J (T diag(Lambda - threshold)_+ Tᵀ) J` for `V = T Lambda Tᵀ`.
///
/// The output is symmetric, positive semidefinite and satisfies `JLJ = L`.
pub fn prox_l(v: &Matrix, threshold: f64) -> Result<Matrix> {
    prox_l_with_rank(v, threshold).map(|(l, _)| l)
}

/// [`prox_l`] that also reports how many eigenvalues survived.
pub fn prox_l_with_rank(v: &Matrix, threshold: f64) -> Result<(Matrix, usize)> {
    let n = v.nrows();
    linalg::ensure_square(v, n)?;
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "eigenvalue threshold must be non-negative, got {threshold}"
        )));
    }
    linalg::check_symmetric(v, SYMMETRY_TOL)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("prox_l input"));
    }
    let sym = linalg::symmetrize(v);
    let (values, vectors) = linalg::sym_eigen_desc(&sym);
    let kept: Vec<usize> = (0..n).filter(|&k| values[k] - threshold > 0.0).collect();
    if kept.is_empty() {
        return Ok((Matrix::zeros(n, n), 0));
    }
    let q = Matrix::from_fn(n, kept.len(), |i, c| vectors[(i, kept[c])]);
    let mut qw = q.clone();
    for (c, &k) in kept.iter().enumerate() {
        qw.column_mut(c).scale_mut(values[k] - threshold);
    }
    let low_rank = qw * q.transpose();
    Ok((linalg::symmetrize(&linalg::center(&low_rank)), kept.len()))
}

/// Off-diagonal soft-threshold. Diagonal entries pass through unchanged.
pub fn prox_s(v: &Matrix, threshold: f64) -> Matrix {
    let n = v.nrows();
    Matrix::from_fn(n, v.ncols(), |i, j| {
        let a = v[(i, j)];
        if i == j {
            a
        } else if a > threshold {
            a - threshold
        } else if a < -threshold {
            a + threshold
        } else {
            0.0
        }
    })
}

/// Euclidean projection of `(alpha, M, L, S)` onto
/// `{M symmetric, M = L + S}` for symmetric `L` and `S`:
///
/// ```text
/// z_L = (M + Mᵀ)/6 + 2L/3 - S/3
/// z_S = (M + Mᵀ)/6 - L/3 + 2S/3
/// z_M = z_L + z_S = (M + Mᵀ)/3 + (L + S)/3
/// ```
pub fn consensus_project(bar_alpha: f64, bar_m: &Matrix, bar_l: &Matrix, bar_s: &Matrix) -> Result<Block> {
    let n = bar_m.nrows();
    linalg::ensure_square(bar_m, n)?;
    linalg::ensure_square(bar_l, n)?;
    linalg::ensure_square(bar_s, n)?;
    let third = 1.0 / 3.0;
    let sixth = 1.0 / 6.0;
    let mut z_l = Matrix::zeros(n, n);
    let mut z_s = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let sym = sixth * (bar_m[(i, j)] + bar_m[(j, i)]);
            let (l, s) = (bar_l[(i, j)], bar_s[(i, j)]);
            z_l[(i, j)] = sym + 2.0 * third * l - third * s;
            z_s[(i, j)] = sym - third * l + 2.0 * third * s;
        }
    }
    Ok(Block {
        alpha: bar_alpha,
        m: &z_l + &z_s,
        l: z_l,
        s: z_s,
    })
}

/// Cheap objective for the iterate `(alpha, L, S)` when `L` is PSD by
/// construction, so that `||L||_* = trace(L)`.
fn objective_psd(problem: &SmoothProblem, alpha: f64, l: &Matrix, s: &Matrix, h: &Hyperparams) -> f64 {
    let n = problem.n;
    let a4 = f64x4::splat(alpha);
    let logits = pack(upper(l).zip(upper(s)).map(|(a, b)| a + b), problem.pairs);
    let mut ll = f64x4::ZERO;
    for ((&t, &xv), &w) in logits.iter().zip(&problem.x_upper).zip(&problem.mask) {
        let t = a4 + t;
        let softplus = t.max(f64x4::ZERO) + (f64x4::ONE + (-t.abs()).exp()).ln();
        ll += (xv * t - softplus) * w;
    }
    let l1: f64 = upper(s).map(f64::abs).sum::<f64>() + upper(&s.transpose()).map(f64::abs).sum::<f64>();
    -ll.reduce_add() / n as f64 + h.gamma * l1 + h.delta * l.trace().max(0.0)
}

/// Runs ADMM from zeros (or from `init`) until the residual drops to
/// `h.outer_tol` or `h.max_outer_iters` is reached.
pub fn fit(x: &AdjacencyMatrix, h: &Hyperparams, init: Option<&ModelParams>) -> Result<FitResult> {
    fit_with_observer(x, h, init, |_| {})
}

/// [`fit`] with a callback invoked on the state after every iteration.
pub fn fit_with_observer<F>(
    x: &AdjacencyMatrix,
    h: &Hyperparams,
    init: Option<&ModelParams>,
    mut observe: F,
) -> Result<FitResult>
where
    F: FnMut(&AdmmState),
{
    h.validate()?;
    let n = x.n();
    let mut state = AdmmState::new(n);
    if let Some(p) = init {
        linalg::ensure_square(&p.l, n)?;
        linalg::ensure_square(&p.s, n)?;
        state.x = Block::from_params(p);
        state.z = state.x.clone();
    }
    let problem = SmoothProblem::new(x);
    let l_threshold = h.lambda * h.delta;
    let s_threshold = h.lambda * h.gamma;

    let mut residual_history = Vec::new();
    let mut objective_history = Vec::new();
    let mut inner_iters = 0;
    let mut converged = false;
    let mut prev_v: Option<(f64, Matrix)> = None;

    while state.iter < h.max_outer_iters {
        let AdmmState { x: xb, z, u, .. } = &mut state;

        // Step 1: separable proximal updates at z - u.
        let v_alpha = z.alpha - u.alpha;
        let v_m = &z.m - &u.m;
        let (start_alpha, start_m) = match &prev_v {
            Some((pa, pm)) => (xb.alpha + v_alpha - pa, &xb.m + (&v_m - pm)),
            None => (xb.alpha, xb.m.clone()),
        };
        let (alpha, m, steps) = prox_smooth_from(&problem, v_alpha, &v_m, start_alpha, &start_m, h)?;
        prev_v = Some((v_alpha, v_m.clone()));
        inner_iters += steps;
        xb.alpha = alpha;
        xb.m = m;
        xb.l = prox_l(&(&z.l - &u.l), l_threshold)?;
        xb.s = prox_s(&(&z.s - &u.s), s_threshold);

        let residual = linalg::frobenius(&(&xb.m - &xb.l - &xb.s));

        // Step 2: projection onto the consensus set.
        let bar_alpha = xb.alpha + u.alpha;
        let new_z = consensus_project(bar_alpha, &(&xb.m + &u.m), &(&xb.l + &u.l), &(&xb.s + &u.s))?;
        *z = new_z;

        // Step 3: scaled dual update.
        u.alpha += xb.alpha - z.alpha;
        u.m += &xb.m - &z.m;
        u.l += &xb.l - &z.l;
        u.s += &xb.s - &z.s;

        state.iter += 1;
        state.residual = residual;
        residual_history.push(residual);
        objective_history.push(objective_psd(&problem, state.x.alpha, &state.x.l, &state.x.s, h));
        observe(&state);

        if residual <= h.outer_tol {
            converged = true;
            break;
        }
    }

    let params = ModelParams {
        alpha: state.x.alpha,
        l: state.x.l,
        s: state.x.s,
    };
    let objective = model::objective(x, &params, h)?;
    Ok(FitResult {
        rank_l: selection::numerical_rank(&params.l),
        support_s: selection::sparse_support(&params.s),
        objective,
        params,
        iters: state.iter,
        converged,
        residual_history,
        objective_history,
        inner_iters,
    })
}
