//! The logistic low-rank plus sparse network model.
//!
//! The log-likelihood only reads pairs `i < j`; diagonal entries of `L` and
//! `S` never enter it. The penalised objective is
//!
//! ```text
//! -(1/n) loglik(alpha, L, S) + gamma * sum_{i != j} |S_ij| + delta * ||L||_*
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::Matrix;

/// Logistic function, evaluated without overflow for large `|t|`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

/// `log(1 + e^t)`.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + libm::log1p(libm::exp(-t))
    } else {
        libm::log1p(libm::exp(t))
    }
}

/// `sigmoid(t) * (1 - sigmoid(t))`, the logistic variance.
#[inline]
pub fn logistic_variance(t: f64) -> f64 {
    sigmoid(t) * sigmoid(-t)
}

/// Symmetric binary network with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: Matrix,
    edge_count: usize,
}

impl AdjacencyMatrix {
    /// Validates a dense 0/1 matrix.
    pub fn new(entries: Matrix) -> Result<Self> {
        let n = entries.nrows();
        linalg::ensure_square(&entries, n)?;
        let mut edge_count = 0;
        for j in 0..n {
            for i in 0..n {
                let v = entries[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry ({i}, {j}) = {v} is not binary"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidAdjacency(format!(
                        "diagonal entry ({i}, {i}) is non-zero"
                    )));
                }
                if v != entries[(j, i)] {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry ({i}, {j}) differs from ({j}, {i})"
                    )));
                }
                if i < j && v == 1.0 {
                    edge_count += 1;
                }
            }
        }
        Ok(Self {
            entries,
            edge_count,
        })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            entries: Matrix::zeros(n, n),
            edge_count: 0,
        }
    }

    /// Builds the network from undirected pairs. Duplicates collapse; self
    /// loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut x = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidAdjacency(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidAdjacency(format!("self loop at node {i}")));
            }
            x.set_edge(i, j, true);
        }
        Ok(x)
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize, on: bool) {
        let was = self.entries[(i, j)] == 1.0;
        if was == on {
            return;
        }
        let v = if on { 1.0 } else { 0.0 };
        self.entries[(i, j)] = v;
        self.entries[(j, i)] = v;
        if on {
            self.edge_count += 1;
        } else {
            self.edge_count -= 1;
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[(i, j)] == 1.0
    }

    /// The 0/1 entries as a real matrix.
    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    /// Number of undirected edges (pairs `i < j`).
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `||X||_0`: non-zero entries counting both triangles.
    pub fn nnz(&self) -> usize {
        2 * self.edge_count
    }

    pub fn degree(&self, i: usize) -> usize {
        self.entries.column(i).iter().filter(|&&v| v == 1.0).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::with_capacity(self.edge_count);
        for i in 0..n {
            for j in i + 1..n {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Neighbours of `i` in increasing order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.get(i, j)).collect()
    }

    /// Subgraph induced by `nodes` (in the given order).
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let m = nodes.len();
        let entries = Matrix::from_fn(m, m, |a, b| self.entries[(nodes[a], nodes[b])]);
        let edge_count = (0..m)
            .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
            .filter(|&(a, b)| entries[(a, b)] == 1.0)
            .count();
        Self {
            entries,
            edge_count,
        }
    }
}

/// Intercept, low-rank and sparse parts of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub l: Matrix,
    pub s: Matrix,
}

impl ModelParams {
    pub fn zeros(n: usize) -> Self {
        Self {
            alpha: 0.0,
            l: Matrix::zeros(n, n),
            s: Matrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    /// `alpha 11ᵀ + L + S`.
    pub fn logits(&self) -> Matrix {
        self.l.add_scalar(self.alpha) + &self.s
    }

    fn check(&self, n: usize) -> Result<()> {
        linalg::ensure_square(&self.l, n)?;
        linalg::ensure_square(&self.s, n)?;
        if !self.alpha.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        Ok(())
    }
}

/// Penalty weights and solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    /// L1 weight on `S`.
    pub gamma: f64,
    /// Nuclear-norm weight on `L`.
    pub delta: f64,
    /// ADMM proximal scale.
    pub lambda: f64,
    /// Step size of the inner gradient descent.
    pub inner_step: f64,
    /// Inner stop: largest coordinate change per step.
    pub inner_tol: f64,
    /// Outer stop on `||x_M - x_L - x_S||_F`.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
}

impl Hyperparams {
    pub const DEFAULT_LAMBDA: f64 = 0.5;
    pub const DEFAULT_INNER_STEP: f64 = 0.05;
    pub const DEFAULT_INNER_TOL: f64 = 1e-9;
    pub const DEFAULT_OUTER_TOL: f64 = 1e-7;
    pub const DEFAULT_MAX_OUTER: usize = 20_000;
    pub const DEFAULT_MAX_INNER: usize = 50_000;

    pub fn new(gamma: f64, delta: f64) -> Self {
        Self {
            gamma,
            delta,
            lambda: Self::DEFAULT_LAMBDA,
            inner_step: Self::DEFAULT_INNER_STEP,
            inner_tol: Self::DEFAULT_INNER_TOL,
            outer_tol: Self::DEFAULT_OUTER_TOL,
            max_outer_iters: Self::DEFAULT_MAX_OUTER,
            max_inner_iters: Self::DEFAULT_MAX_INNER,
        }
    }

    pub fn with_penalties(self, gamma: f64, delta: f64) -> Self {
        Self {
            gamma,
            delta,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("lambda", self.lambda),
            ("inner_step", self.inner_step),
            ("inner_tol", self.inner_tol),
            ("outer_tol", self.outer_tol),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidHyperparams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::InvalidHyperparams(
                "iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Constants of the error-bound assumptions: spikiness bound `kappa`,
/// intercept constant `c` and strong-convexity constant `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticConfig {
    pub kappa: f64,
    pub c: f64,
    pub tau: f64,
}

impl DiagnosticConfig {
    pub fn new(kappa: f64, c: f64, tau: f64) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("C", c), ("tau", tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { kappa, c, tau })
    }

    /// Uses [`strong_convexity_tau`] of `theta` for `tau`.
    pub fn with_computed_tau(kappa: f64, c: f64, theta: &Matrix) -> Result<Self> {
        Self::new(kappa, c, strong_convexity_tau(theta))
    }
}

/// `sigmoid(alpha + l + s)`.
pub fn edge_probability(alpha: f64, l: f64, s: f64) -> Result<f64> {
    if !(alpha.is_finite() && l.is_finite() && s.is_finite()) {
        return Err(Error::NonFinite("edge_probability input"));
    }
    Ok(sigmoid(alpha + l + s))
}

/// Log-likelihood over pairs `i < j`:
/// `alpha sum X_ij + X•L/2 + X•S/2 - sum log(1 + exp(alpha + L_ij + S_ij))`.
pub fn log_likelihood(x: &AdjacencyMatrix, p: &ModelParams) -> Result<f64> {
    let n = x.n();
    p.check(n)?;
    let xm = x.matrix();
    let mut linear = 0.0;
    let mut log_partition = 0.0;
    for j in 0..n {
        for i in 0..j {
            let t = p.alpha + p.l[(i, j)] + p.s[(i, j)];
            log_partition += softplus(t);
            if xm[(i, j)] == 1.0 {
                // both mirrored entries of X•L/2 and X•S/2
                linear += p.alpha
                    + 0.5 * (p.l[(i, j)] + p.l[(j, i)] + p.s[(i, j)] + p.s[(j, i)]);
            }
        }
    }
    Ok(linear - log_partition)
}

/// `sum_{i,j} X_ij Theta_ij - log(1 + exp(Theta_ij))` over all ordered pairs,
/// diagonal included. Not scaled by `1/n`.
pub fn log_likelihood_full_pairs(x: &AdjacencyMatrix, theta: &Matrix) -> Result<f64> {
    linalg::ensure_square(theta, x.n())?;
    Ok(x
        .matrix()
        .iter()
        .zip(theta.iter())
        .map(|(&xv, &t)| xv * t - softplus(t))
        .sum())
}

/// `sum_{i != j} |S_ij|`.
pub fn l1_off_diagonal(s: &Matrix) -> f64 {
    let n = s.nrows();
    let mut total = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                total += s[(i, j)].abs();
            }
        }
    }
    total
}

/// Nuclear norm of a (nearly) PSD matrix: sum of eigenvalues clamped at zero.
pub fn nuclear_norm_psd(l: &Matrix) -> f64 {
    linalg::sym_eigenvalues_desc(&linalg::symmetrize(l))
        .into_iter()
        .map(|v| v.max(0.0))
        .sum()
}

/// Penalised objective `-(1/n) loglik + gamma ||S||_1 + delta ||L||_*`.
pub fn objective(x: &AdjacencyMatrix, p: &ModelParams, h: &Hyperparams) -> Result<f64> {
    let n = x.n() as f64;
    let ll = log_likelihood(x, p)?;
    Ok(-ll / n + h.gamma * l1_off_diagonal(&p.s) + h.delta * nuclear_norm_psd(&p.l))
}

/// Gradient of the smooth term
/// `-(alpha/n) sum_{i<j} X_ij - (1/n) sum_{i<j} X_ij M_ij + (1/n) sum_{i<j} log(1 + e^{alpha + M_ij})`
/// with respect to `alpha` and `M`. Entries of `M` with `i >= j` have zero
/// gradient.
pub fn smooth_gradient(x: &AdjacencyMatrix, alpha: f64, m: &Matrix) -> Result<(f64, Matrix)> {
    let n = x.n();
    linalg::ensure_square(m, n)?;
    let inv_n = 1.0 / n as f64;
    let xm = x.matrix();
    let mut g = Matrix::zeros(n, n);
    let mut g_alpha = 0.0;
    for j in 0..n {
        for i in 0..j {
            let r = (sigmoid(alpha + m[(i, j)]) - xm[(i, j)]) * inv_n;
            g[(i, j)] = r;
            g_alpha += r;
        }
    }
    Ok((g_alpha, g))
}

/// Entry-wise edge probabilities `sigmoid(alpha + L_ij + S_ij)`. The diagonal
/// is filled in but carries no meaning for the model.
pub fn probability_matrix(p: &ModelParams) -> Matrix {
    let n = p.n();
    Matrix::from_fn(n, n, |i, j| sigmoid(p.alpha + p.l[(i, j)] + p.s[(i, j)]))
}

/// Squared estimation error
/// `n^2 (alpha_hat - alpha)^2 + ||L_hat - L||_F^2 + ||S_hat - S||_F^2`.
pub fn error_metric(fit: &ModelParams, truth: &ModelParams) -> Result<f64> {
    let n = truth.n();
    fit.check(n)?;
    truth.check(n)?;
    let da = fit.alpha - truth.alpha;
    let nf = n as f64;
    let dl: f64 = fit.l.iter().zip(truth.l.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let ds: f64 = fit.s.iter().zip(truth.s.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(nf * nf * da * da + dl + ds)
}

/// Lower bounds on `(delta, gamma)` under which the error bound applies:
///
/// ```text
/// delta_min = 2 ||(X - P*)/n||_op
/// gamma_min = 2 ||(X - P*)/n||_inf + 4 kappa tau (C n + 1) / n
/// ```
pub fn regularization_floor(
    x: &AdjacencyMatrix,
    p_star: &Matrix,
    d: &DiagnosticConfig,
) -> Result<(f64, f64)> {
    let n = x.n();
    linalg::ensure_square(p_star, n)?;
    let nf = n as f64;
    let residual = (x.matrix() - p_star) / nf;
    let delta_min = 2.0 * linalg::operator_norm(&residual);
    let gamma_min =
        2.0 * linalg::max_abs(&residual) + 4.0 * d.kappa * d.tau * (d.c * nf + 1.0) / nf;
    Ok((delta_min, gamma_min))
}

/// Smallest eigenvalue of the (diagonal) Hessian of the all-pairs scaled
/// negative log-likelihood at `theta`: `min_ij (1/n) sigmoid'(theta_ij)`.
pub fn strong_convexity_tau(theta: &Matrix) -> f64 {
    let n = theta.nrows().max(1) as f64;
    theta
        .iter()
        .map(|&t| logistic_variance(t))
        .fold(f64::INFINITY, f64::min)
        / n
}

/// Diagnostics for the identifiability and spikiness assumptions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    /// `||J L J - L||_F`.
    pub centering_gap: f64,
    pub centered: bool,
    /// `||L||_inf`.
    pub l_max_abs: f64,
    /// `kappa / n`.
    pub spikiness_bound: f64,
    pub spiky_ok: bool,
    pub alpha_ok: bool,
    pub tau: f64,
}

/// Evaluates the centering, spikiness (`||L||_inf <= kappa / n`) and
/// intercept (`|alpha| <= C kappa`) conditions for `p`.
pub fn check_assumptions(p: &ModelParams, d: &DiagnosticConfig) -> AssumptionReport {
    let n = p.n() as f64;
    let centering_gap = linalg::frobenius(&(linalg::center(&p.l) - &p.l));
    let l_max_abs = linalg::max_abs(&p.l);
    let spikiness_bound = d.kappa / n;
    AssumptionReport {
        centering_gap,
        centered: centering_gap <= 1e-8 * (1.0 + linalg::frobenius(&p.l)),
        l_max_abs,
        spikiness_bound,
        spiky_ok: l_max_abs <= spikiness_bound,
        alpha_ok: p.alpha.abs() <= d.c * d.kappa,
        tau: strong_convexity_tau(&p.logits()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = core::f64::consts::LN_2;

    fn pair(edge: bool) -> AdjacencyMatrix {
        let mut x = AdjacencyMatrix::empty(2);
        x.set_edge(0, 1, edge);
        x
    }

    #[test]
    fn edge_probability_values() {
        assert_eq!(edge_probability(0.0, 0.0, 0.0).unwrap(), 0.5);
        // sigmoid(10) = 1 / (1 + e^-10), e^-10 = 4.539992976248485e-5
        let e10 = 4.539_992_976_248_485e-5;
        let up = edge_probability(-10.0, 20.0, 0.0).unwrap();
        assert!((up - 1.0 / (1.0 + e10)).abs() < 1e-15);
        assert!((up - 0.999_954_602_131_297_6).abs() < 1e-15);
        let down = edge_probability(-10.0, 0.0, 0.0).unwrap();
        assert!((down - 4.539_786_870_243_439e-5).abs() < 1e-18);
        assert!(edge_probability(f64::NAN, 0.0, 0.0).is_err());
        assert!(edge_probability(0.0, f64::INFINITY, 0.0).is_err());
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
    }

    #[test]
    fn log_likelihood_small_cases() {
        let zero = ModelParams::zeros(2);
        assert!((log_likelihood(&pair(true), &zero).unwrap() + LN2).abs() < 1e-15);
        assert!((log_likelihood(&pair(false), &zero).unwrap() + LN2).abs() < 1e-15);
        let p = ModelParams {
            alpha: 1.0,
            ..ModelParams::zeros(2)
        };
        let expect = 1.0 - (1.0 + core::f64::consts::E).ln();
        assert!((log_likelihood(&pair(true), &p).unwrap() - expect).abs() < 1e-15);
        assert!((expect + 0.313_261_687_518_222_8).abs() < 1e-15);
        assert!(log_likelihood(&pair(true), &ModelParams::zeros(3)).is_err());
    }

    #[test]
    fn full_pairs_likelihood() {
        let x1 = AdjacencyMatrix::empty(1);
        let v = log_likelihood_full_pairs(&x1, &Matrix::zeros(1, 1)).unwrap();
        assert!((v + LN2).abs() < 1e-15);
        let v = log_likelihood_full_pairs(&pair(true), &Matrix::zeros(2, 2)).unwrap();
        assert!((v + 4.0 * LN2).abs() < 1e-14);
        assert!(log_likelihood_full_pairs(&pair(true), &Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn objective_examples() {
        let x = AdjacencyMatrix::empty(4);
        let h = Hyperparams::new(0.3, 0.7);
        let base = objective(&x, &ModelParams::zeros(4), &h).unwrap();
        assert!((base - 1.5 * LN2).abs() < 1e-14);
        assert!((base - 1.039_720_770_839_917_9).abs() < 1e-12);
    }

    #[test]
    fn sparse_penalty_counts_both_mirror_entries() {
        let x = AdjacencyMatrix::empty(4);
        let h = Hyperparams::new(0.3, 0.7);
        let mut p = ModelParams::zeros(4);
        p.s[(0, 1)] = -1.5;
        p.s[(1, 0)] = -1.5;
        p.s[(2, 2)] = 100.0; // diagonal is free
        assert!((l1_off_diagonal(&p.s) - 3.0).abs() < 1e-15);
        let ll = log_likelihood(&x, &p).unwrap();
        let obj = objective(&x, &p, &h).unwrap();
        assert!((obj - (-ll / 4.0 + 0.3 * 3.0)).abs() < 1e-14);
    }

    #[test]
    fn nuclear_penalty_of_centering_projector() {
        let n = 5;
        let c = 2.5;
        let j = Matrix::identity(n, n) - Matrix::from_element(n, n, 1.0 / n as f64);
        assert!((nuclear_norm_psd(&(j * c)) - c * (n as f64 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn smooth_gradient_examples() {
        let (ga, gm) = smooth_gradient(&AdjacencyMatrix::empty(3), 0.0, &Matrix::zeros(3, 3)).unwrap();
        assert!((ga - 0.5).abs() < 1e-15);
        assert!((gm[(0, 1)] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(gm[(1, 0)], 0.0);
        let (ga, gm) = smooth_gradient(&pair(true), 0.0, &Matrix::zeros(2, 2)).unwrap();
        assert!((ga + 0.25).abs() < 1e-15);
        assert!((gm[(0, 1)] + 0.25).abs() < 1e-15);
        assert_eq!(gm[(1, 0)], 0.0);
        assert_eq!(gm[(0, 0)], 0.0);
    }

    #[test]
    fn probability_matrix_zero_params() {
        let p = probability_matrix(&ModelParams::zeros(3));
        assert!(p.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn error_metric_examples() {
        let a = ModelParams::zeros(3);
        assert_eq!(error_metric(&a, &a).unwrap(), 0.0);
        let b = ModelParams {
            alpha: 1.0,
            ..ModelParams::zeros(3)
        };
        assert_eq!(error_metric(&b, &a).unwrap(), 9.0);
        assert!(error_metric(&b, &ModelParams::zeros(2)).is_err());
    }

    #[test]
    fn regularization_floor_cases() {
        let x = pair(true);
        let d = DiagnosticConfig::new(2.0, 3.0, 0.01).unwrap();
        // P* = X exactly
        let (dm, gm) = regularization_floor(&x, x.matrix(), &d).unwrap();
        assert_eq!(dm, 0.0);
        assert!((gm - 4.0 * 2.0 * 0.01 * (3.0 * 2.0 + 1.0) / 2.0).abs() < 1e-15);
        assert!(gm >= 4.0 * d.kappa * d.tau * d.c);

        // Residual R = [[-a, 1-b], [1-b, -a]]/2 has singular values |(-a) +- (1-b)|/2.
        let (a, b) = (0.2, 0.7);
        let p_star = Matrix::from_row_slice(2, 2, &[a, b, b, a]);
        let (dm, _) = regularization_floor(&x, &p_star, &d).unwrap();
        let s1 = ((-a + (1.0 - b)).abs()).max((-a - (1.0 - b)).abs()) / 2.0;
        assert!((dm - 2.0 * s1).abs() < 1e-14);
    }

    #[test]
    fn tau_values() {
        assert!((strong_convexity_tau(&Matrix::zeros(4, 4)) - 0.0625).abs() < 1e-15);
        let mut theta = Matrix::zeros(4, 4);
        theta[(1, 2)] = 10.0;
        // sigmoid(10) * sigmoid(-10) = e^-10 / (1 + e^-10)^2
        let e = (-10.0f64).exp();
        let expect = e / ((1.0 + e) * (1.0 + e)) / 4.0;
        assert!((strong_convexity_tau(&theta) - expect).abs() < 1e-18);
        assert!((expect * 4.0 - 4.539_580_773_595_167e-5).abs() < 1e-17);
    }

    #[test]
    fn adjacency_validation() {
        let mut m = Matrix::zeros(3, 3);
        m[(0, 1)] = 1.0;
        assert!(AdjacencyMatrix::new(m.clone()).is_err());
        m[(1, 0)] = 1.0;
        let x = AdjacencyMatrix::new(m.clone()).unwrap();
        assert_eq!(x.edge_count(), 1);
        assert_eq!(x.nnz(), 2);
        m[(2, 2)] = 1.0;
        assert!(AdjacencyMatrix::new(m.clone()).is_err());
        m[(2, 2)] = 0.0;
        m[(0, 2)] = 0.5;
        m[(2, 0)] = 0.5;
        assert!(AdjacencyMatrix::new(m).is_err());
        assert!(AdjacencyMatrix::from_edges(3, [(0, 3)]).is_err());
        assert!(AdjacencyMatrix::from_edges(3, [(1, 1)]).is_err());
        let y = AdjacencyMatrix::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(y, x);
    }
}
