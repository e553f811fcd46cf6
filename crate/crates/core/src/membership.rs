//! Node membership from the fitted low-rank component.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::selection;
use crate::Matrix;

pub const KMEANS_RESTARTS: usize = 20;
pub const KMEANS_MAX_ITERS: usize = 300;

/// Leading eigenvectors of `L_hat`, one per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// `n x K`; column `k` is the `k`-th leading eigenvector.
    pub vectors: Matrix,
    pub eigvals: Vec<f64>,
    /// Set when `K` exceeds the numerical rank of the input.
    pub rank_deficient: bool,
}

/// Top-`k` eigenvectors of a symmetric matrix. Each vector is oriented so
/// that its largest-magnitude entry (first such index on ties) is positive.
pub fn spectral_embedding(l_hat: &Matrix, k: usize) -> Result<Embedding> {
    let n = l_hat.nrows();
    linalg::ensure_square(l_hat, n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "embedding dimension must be in 1..={n}, got {k}"
        )));
    }
    let (values, vectors) = linalg::sym_eigen_desc(&linalg::symmetrize(l_hat));
    let mut e = vectors.columns(0, k).into_owned();
    for c in 0..k {
        let mut pivot = 0;
        for i in 1..n {
            if e[(i, c)].abs() > e[(pivot, c)].abs() {
                pivot = i;
            }
        }
        if e[(pivot, c)] < 0.0 {
            e.column_mut(c).neg_mut();
        }
    }
    Ok(Embedding {
        vectors: e,
        eigvals: values[..k].to_vec(),
        rank_deficient: selection::numerical_rank(l_hat) < k,
    })
}

/// k-means assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult {
    /// Cluster of every node, numbered by first appearance.
    pub labels: Vec<usize>,
    /// `k x d` centroids, row `c` belongs to label `c`.
    pub centers: Matrix,
    pub inertia: f64,
    /// Best inertia so far after each restart.
    pub best_inertia_trace: Vec<f64>,
    /// 2-D principal coordinates when clustering ran on a projection.
    pub projected: Option<Matrix>,
}

fn sq_dist(points: &Matrix, i: usize, centers: &Matrix, c: usize) -> f64 {
    (0..points.ncols())
        .map(|d| {
            let t = points[(i, d)] - centers[(c, d)];
            t * t
        })
        .sum()
}

fn nearest(points: &Matrix, i: usize, centers: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centers.nrows() {
        let d = sq_dist(points, i, centers, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(points: &Matrix, k: usize, rng: &mut ChaCha20Rng) -> Matrix {
    let (n, dim) = points.shape();
    let mut centers = Matrix::zeros(k, dim);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from(&points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).copy_from(&points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centers, c));
        }
    }
    centers
}

fn lloyd(points: &Matrix, mut centers: Matrix) -> (Vec<usize>, Matrix, f64) {
    let (n, dim) = points.shape();
    let k = centers.nrows();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let (c, _) = nearest(points, i, &centers);
            if *label != c {
                *label = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Matrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for d in 0..dim {
                sums[(c, d)] += points[(i, d)];
            }
        }
        for c in 0..k {
            // empty clusters keep their previous centre
            if counts[c] > 0 {
                for d in 0..dim {
                    centers[(c, d)] = sums[(c, d)] / counts[c] as f64;
                }
            }
        }
    }
    let inertia = (0..n).map(|i| sq_dist(points, i, &centers, labels[i])).sum();
    (labels, centers, inertia)
}

/// Renumbers clusters by order of first appearance.
fn canonicalize(labels: &[usize], centers: &Matrix) -> (Vec<usize>, Matrix) {
    let k = centers.nrows();
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &c in labels {
        if map[c] == usize::MAX {
            map[c] = next;
            next += 1;
        }
    }
    for m in map.iter_mut() {
        if *m == usize::MAX {
            *m = next;
            next += 1;
        }
    }
    let mut out = Matrix::zeros(k, centers.ncols());
    for c in 0..k {
        out.row_mut(map[c]).copy_from(&centers.row(c));
    }
    (labels.iter().map(|&c| map[c]).collect(), out)
}

/// k-means with k-means++ seeding, 20 restarts of at most 300 Lloyd
/// iterations; the lowest-inertia restart wins (earliest on ties).
/// Rows of `points` are the observations.
pub fn cluster_nodes(points: &Matrix, k: usize, seed: u64) -> Result<MembershipResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cluster count must be in 1..={n}, got {k}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, Matrix, f64)> = None;
    let mut trace = Vec::with_capacity(KMEANS_RESTARTS);
    for _ in 0..KMEANS_RESTARTS {
        let init = plus_plus_init(points, k, &mut rng);
        let run = lloyd(points, init);
        if best.as_ref().is_none_or(|b| run.2 < b.2) {
            best = Some(run);
        }
        trace.push(best.as_ref().map_or(f64::INFINITY, |b| b.2));
    }
    let (labels, centers, inertia) = best.expect("at least one restart");
    let (labels, centers) = canonicalize(&labels, &centers);
    Ok(MembershipResult {
        labels,
        centers,
        inertia,
        best_inertia_trace: trace,
        projected: None,
    })
}

/// Coordinates of the centred rows of `e` on its first two principal axes.
/// Axis signs follow the embedding convention (largest loading positive).
pub fn project_principal(e: &Matrix) -> Result<Matrix> {
    let (n, k) = e.shape();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "principal projection needs at least 2 columns, got {k}"
        )));
    }
    let mut centred = e.clone();
    for c in 0..k {
        let mean = centred.column(c).sum() / n.max(1) as f64;
        centred.column_mut(c).add_scalar_mut(-mean);
    }
    let scatter = centred.transpose() * &centred;
    let (_, axes) = linalg::sym_eigen_desc(&scatter);
    let mut top = axes.columns(0, 2).into_owned();
    for c in 0..2 {
        let mut pivot = 0;
        for i in 1..k {
            if top[(i, c)].abs() > top[(pivot, c)].abs() {
                pivot = i;
            }
        }
        if top[(pivot, c)] < 0.0 {
            top.column_mut(c).neg_mut();
        }
    }
    Ok(centred * top)
}

/// Mean silhouette width of a labelling (Euclidean distances).
pub fn silhouette(points: &Matrix, labels: &[usize]) -> f64 {
    let n = points.nrows();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    if k < 2 || n < 2 {
        return 0.0;
    }
    let dist = |a: usize, b: usize| {
        libm::sqrt(
            (0..points.ncols())
                .map(|d| {
                    let t = points[(a, d)] - points[(b, d)];
                    t * t
                })
                .sum::<f64>(),
        )
    };
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += dist(i, j);
                counts[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}
