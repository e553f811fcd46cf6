//! Best label matching between two clusterings.

use alloc::vec;
use alloc::vec::Vec;

/// Largest label count for which all permutations are enumerated.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Contingency counts `c[a][b] = |{i : found[i] = a, truth[i] = b}|`, padded
/// to a square `k x k`.
fn contingency(found: &[usize], truth: &[usize]) -> Vec<Vec<usize>> {
    let kf = found.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let k = kf.max(kt);
    let mut c = vec![vec![0usize; k]; k];
    for (&a, &b) in found.iter().zip(truth) {
        c[a][b] += 1;
    }
    c
}

fn best_by_permutation(c: &[Vec<usize>]) -> usize {
    let k = c.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let score = |p: &[usize]| p.iter().enumerate().map(|(a, &b)| c[a][b]).sum::<usize>();
    let mut best = score(&perm);
    // Heap's algorithm
    let mut counters = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            best = best.max(score(&perm));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    best
}

/// Hungarian algorithm (potentials form) minimising `cost` over square
/// assignments. Returns `assign[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Number of nodes whose found label disagrees with the true label under the
/// best one-to-one relabelling of the found clusters.
pub fn min_mismatches(found: &[usize], truth: &[usize]) -> usize {
    assert_eq!(found.len(), truth.len(), "label vectors differ in length");
    if found.is_empty() {
        return 0;
    }
    let c = contingency(found, truth);
    let matched = if c.len() <= EXHAUSTIVE_LIMIT {
        best_by_permutation(&c)
    } else {
        let top = found.len() as f64;
        let cost: Vec<Vec<f64>> = c
            .iter()
            .map(|row| row.iter().map(|&v| top - v as f64).collect())
            .collect();
        hungarian(&cost)
            .iter()
            .enumerate()
            .map(|(a, &b)| c[a][b])
            .sum()
    };
    found.len() - matched
}
