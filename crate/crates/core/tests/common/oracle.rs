//! Reference implementations that share no code with the crate under test
//! beyond the `Matrix` type.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;

/// Cyclic Jacobi eigensolver. Returns eigenvalues in descending order and the
/// matching eigenvectors as columns.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Mat::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

pub fn centering(n: usize) -> Mat {
    Mat::identity(n, n) - Mat::from_element(n, n, 1.0 / n as f64)
}

/// `J (sum_k (lambda_k - t)_+ q_k q_kᵀ) J` with an explicit `J`.
pub fn prox_l_bruteforce(v: &Mat, t: f64) -> Mat {
    let n = v.nrows();
    let (vals, vecs) = jacobi_eigen(v);
    let mut out = Mat::zeros(n, n);
    for k in 0..n {
        let w = vals[k] - t;
        if w > 0.0 {
            let q = vecs.column(k);
            out += w * &q * q.transpose();
        }
    }
    let j = centering(n);
    &j * out * &j
}

/// Projection onto `{M = L + S, M = Mᵀ}` by solving the KKT system of each
/// unordered pair (and each diagonal entry) with a dense LU.
pub fn consensus_kkt(bar_m: &Mat, bar_l: &Mat, bar_s: &Mat) -> (Mat, Mat, Mat) {
    let n = bar_m.nrows();
    let (mut zm, mut zl, mut zs) = (Mat::zeros(n, n), Mat::zeros(n, n), Mat::zeros(n, n));
    for i in 0..n {
        // variables (m, l, s); constraint m - l - s = 0
        let k = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.0, 0.0, 1.0, //
                0.0, 2.0, 0.0, -1.0, //
                0.0, 0.0, 2.0, -1.0, //
                1.0, -1.0, -1.0, 0.0,
            ],
        );
        let rhs = DVector::from_vec(vec![2.0 * bar_m[(i, i)], 2.0 * bar_l[(i, i)], 2.0 * bar_s[(i, i)], 0.0]);
        let x = k.lu().solve(&rhs).expect("KKT solve");
        zm[(i, i)] = x[0];
        zl[(i, i)] = x[1];
        zs[(i, i)] = x[2];
        for j in i + 1..n {
            // variables (m_ij, m_ji, l_ij, l_ji, s_ij, s_ji); three constraints
            let mut k = DMatrix::zeros(9, 9);
            for d in 0..6 {
                k[(d, d)] = 2.0;
            }
            let a = [
                [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, -1.0, 0.0, -1.0, 0.0],
                [0.0, 1.0, 0.0, -1.0, 0.0, -1.0],
            ];
            for (c, row) in a.iter().enumerate() {
                for (d, &v) in row.iter().enumerate() {
                    k[(6 + c, d)] = v;
                    k[(d, 6 + c)] = v;
                }
            }
            let targets = [
                bar_m[(i, j)],
                bar_m[(j, i)],
                bar_l[(i, j)],
                bar_l[(j, i)],
                bar_s[(i, j)],
                bar_s[(j, i)],
            ];
            let mut rhs = DVector::zeros(9);
            for d in 0..6 {
                rhs[d] = 2.0 * targets[d];
            }
            let x = k.lu().solve(&rhs).expect("KKT solve");
            zm[(i, j)] = x[0];
            zm[(j, i)] = x[1];
            zl[(i, j)] = x[2];
            zl[(j, i)] = x[3];
            zs[(i, j)] = x[4];
            zs[(j, i)] = x[5];
        }
    }
    (zm, zl, zs)
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Smooth part of the sub-problem over `i < j`, written directly.
pub fn smooth_value(x: &Mat, alpha: f64, m: &Mat) -> f64 {
    let n = x.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let t = alpha + m[(i, j)];
            total += softplus(t) - x[(i, j)] * t;
        }
    }
    total / n as f64
}

/// Central differences of [`smooth_value`] with step `h`.
pub fn smooth_gradient_fd(x: &Mat, alpha: f64, m: &Mat, h: f64) -> (f64, Mat) {
    let n = x.nrows();
    let ga = (smooth_value(x, alpha + h, m) - smooth_value(x, alpha - h, m)) / (2.0 * h);
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut up = m.clone();
            let mut dn = m.clone();
            up[(i, j)] += h;
            dn[(i, j)] -= h;
            g[(i, j)] = (smooth_value(x, alpha, &up) - smooth_value(x, alpha, &dn)) / (2.0 * h);
        }
    }
    (ga, g)
}

/// Penalised objective with `||L||_*` from the Jacobi spectrum.
pub fn full_objective(x: &Mat, alpha: f64, l: &Mat, s: &Mat, gamma: f64, delta: f64) -> f64 {
    let n = x.nrows();
    let nuclear: f64 = jacobi_eigen(l).0.iter().map(|v| v.abs()).sum();
    let mut l1 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                l1 += s[(i, j)].abs();
            }
        }
    }
    smooth_value(x, alpha, &(l + s)) + gamma * l1 + delta * nuclear
}

/// Accelerated proximal gradient with adaptive restart on
/// `(alpha, L, S)`, `L` PSD and centered, `S` symmetric with zero diagonal.
/// Returns the best objective seen.
pub fn fista(x: &Mat, gamma: f64, delta: f64, iters: usize) -> f64 {
    let n = x.nrows();
    let nf = n as f64;
    let j = centering(n);
    // gradient of the smooth part, as a symmetric matrix in Frobenius geometry
    let grad = |alpha: f64, theta: &Mat| -> (f64, Mat) {
        let mut g = Mat::zeros(n, n);
        let mut ga = 0.0;
        for i in 0..n {
            for k in i + 1..n {
                let r = (logistic(alpha + theta[(i, k)]) - x[(i, k)]) / nf;
                ga += r;
                g[(i, k)] = 0.5 * r;
                g[(k, i)] = 0.5 * r;
            }
        }
        (ga, g)
    };
    let prox = |alpha: f64, l: &Mat, s: &Mat, t: f64| -> (f64, Mat, Mat) {
        let lc = &j * l * &j;
        let lc = 0.5 * (&lc + lc.transpose());
        let (vals, vecs) = jacobi_eigen(&lc);
        let mut lp = Mat::zeros(n, n);
        for k in 0..n {
            let w = vals[k] - t * delta;
            if w > 0.0 {
                let q = vecs.column(k);
                lp += w * &q * q.transpose();
            }
        }
        let lp = &j * lp * &j;
        let sp = Mat::from_fn(n, n, |a, b| {
            if a == b {
                0.0
            } else {
                let v = s[(a, b)];
                v.signum() * (v.abs() - t * gamma).max(0.0)
            }
        });
        (alpha, lp, sp)
    };
    let obj = |a: f64, l: &Mat, s: &Mat| full_objective(x, a, l, s, gamma, delta);
    // (da + dL_ij + dS_ij)^2 <= 3 (da^2 + dL_ij^2 + dS_ij^2) and each pair
    // appears twice in the Frobenius norms, so 3P/(4n) bounds the Hessian.
    let pairs = nf * (nf - 1.0) / 2.0;
    let step = 4.0 * nf / (3.0 * pairs);
    let (mut a, mut l, mut s) = (0.0, Mat::zeros(n, n), Mat::zeros(n, n));
    let (mut ya, mut yl, mut ys) = (a, l.clone(), s.clone());
    let mut tk: f64 = 1.0;
    let mut best = obj(a, &l, &s);
    let mut last = best;
    for _ in 0..iters {
        let (ga, g) = grad(ya, &(&yl + &ys));
        let (na, nl, ns) = prox(ya - step * ga, &(&yl - step * &g), &(&ys - step * &g), step);
        let cur = obj(na, &nl, &ns);
        best = best.min(cur);
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * tk * tk).sqrt());
        if cur > last {
            // restart momentum
            tk = 1.0;
            ya = na;
            yl = nl.clone();
            ys = ns.clone();
        } else {
            let w = (tk - 1.0) / tn;
            ya = na + w * (na - a);
            yl = &nl + w * (&nl - &l);
            ys = &ns + w * (&ns - &s);
            tk = tn;
        }
        let change = (na - a).abs() + (&nl - &l).abs().max() + (&ns - &s).abs().max();
        a = na;
        l = nl;
        s = ns;
        last = cur;
        if change < 1e-15 {
            break;
        }
    }
    best
}
