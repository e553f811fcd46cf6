//! Synthetic topic networks with ad-hoc links.
//!
//! Ground truth is drawn in a fixed order from a ChaCha20 stream seeded with
//! `ScenarioConfig::seed` (stream 0):
//!
//! 1. the intercept `alpha* ~ U[-11, -10]`;
//! 2. the overlap node sets (first `n_l` nodes, then `n_m` nodes from the rest);
//! 3. the topic subsets of overlap nodes (ascending node order, `n_l` set first);
//! 4. the factor weights `D*_k ~ U[19, 20]`;
//! 5. the ad-hoc endpoint sets `C*_1 .. C*_K`;
//! 6. the ad-hoc weights `S*_ij ~ U[19, 20]`, block pairs `(p, q)` in
//!    lexicographic order, `r` ascending within a pair.
//!
//! [`sample_adjacency`] then draws the upper triangle row by row from stream 1
//! of its own seed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::model::{sigmoid, AdjacencyMatrix, ModelParams};
use crate::Matrix;

const ALPHA_RANGE: (f64, f64) = (-11.0, -10.0);
const WEIGHT_RANGE: (f64, f64) = (19.0, 20.0);

/// Size and overlap structure of a synthetic network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub n: usize,
    /// Number of topics.
    pub k: usize,
    /// Nodes carrying `l` topics.
    pub n_l: usize,
    pub l: usize,
    /// Nodes carrying `m` topics.
    pub n_m: usize,
    pub m: usize,
    /// Number of ad-hoc pairs (`i < j`).
    pub s_count: usize,
    pub seed: u64,
}

fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

impl ScenarioConfig {
    /// A network where every node carries exactly one topic.
    pub fn pure(n: usize, k: usize, s_count: usize) -> Self {
        Self {
            n,
            k,
            n_l: 0,
            l: 2,
            n_m: 0,
            m: 3,
            s_count,
            seed: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Ad-hoc pairs per block pair.
    pub fn pairs_per_block_pair(&self) -> usize {
        match choose2(self.k) {
            0 => 0,
            c => self.s_count / c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.k == 0 || self.n == 0 {
            return bad("n and K must be positive".into());
        }
        if self.n % self.k != 0 {
            return bad(format!("n = {} is not divisible by K = {}", self.n, self.k));
        }
        if self.n_l + self.n_m > self.n {
            return bad(format!(
                "n_l + n_m = {} exceeds n = {}",
                self.n_l + self.n_m,
                self.n
            ));
        }
        if self.n_l > 0 && !(1 < self.l && self.l <= self.k) {
            return bad(format!("need 1 < l <= K, got l = {}, K = {}", self.l, self.k));
        }
        if self.n_m > 0 && !(1 < self.m && self.m <= self.k) {
            return bad(format!("need 1 < m <= K, got m = {}, K = {}", self.m, self.k));
        }
        if self.n_l > 0 && self.n_m > 0 && self.l >= self.m {
            return bad(format!("need l < m, got l = {}, m = {}", self.l, self.m));
        }
        if self.s_count > 0 {
            let pairs = choose2(self.k);
            if pairs == 0 {
                return bad("ad-hoc links need at least two topics".into());
            }
            if self.s_count % pairs != 0 {
                return bad(format!(
                    "|S*| = {} is not divisible by C(K,2) = {pairs}",
                    self.s_count
                ));
            }
            if self.pairs_per_block_pair() > self.n / self.k {
                return bad(format!(
                    "{} ad-hoc endpoints per block exceed the block size {}",
                    self.pairs_per_block_pair(),
                    self.n / self.k
                ));
            }
        }
        Ok(())
    }
}

/// The six reference networks: cases 1-3 have only single-topic nodes,
/// cases 4-6 add nodes carrying two (`l = 2`) or three (`m = 3`) topics.
pub fn scenario_presets() -> Vec<ScenarioConfig> {
    let mixed = |n, n_l, n_m| ScenarioConfig {
        n,
        k: 3,
        n_l,
        l: 2,
        n_m,
        m: 3,
        s_count: 18,
        seed: 0,
    };
    vec![
        ScenarioConfig::pure(30, 3, 9),
        ScenarioConfig::pure(80, 4, 18),
        ScenarioConfig::pure(120, 5, 30),
        mixed(120, 0, 10),
        mixed(210, 50, 0),
        mixed(210, 10, 10),
    ]
}

/// Preset `case` (1-based, 1..=6) with the given seed.
pub fn preset(case: usize, seed: u64) -> Result<ScenarioConfig> {
    scenario_presets()
        .get(case.wrapping_sub(1))
        .map(|c| c.with_seed(seed))
        .ok_or_else(|| Error::InvalidConfig(format!("unknown case {case}, expected 1..=6")))
}

/// Generated parameters and bookkeeping needed for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub config: ScenarioConfig,
    pub alpha_star: f64,
    /// Binary `K x n` loadings before centering.
    pub f_binary: Matrix,
    /// Centered loadings `F_binary J` (rows sum to zero).
    pub f_star: Matrix,
    pub d_star: Vec<f64>,
    /// `F*ᵀ D* F*`.
    pub l_star: Matrix,
    pub s_star: Matrix,
    pub p_star: Matrix,
    /// Sorted topic set of every node.
    pub topics: Vec<Vec<usize>>,
    /// Nodes carrying `l` topics, ascending.
    pub overlap_l: Vec<usize>,
    /// Nodes carrying `m` topics, ascending.
    pub overlap_m: Vec<usize>,
    /// Ad-hoc pairs with `i < j`, in generation order.
    pub adhoc_pairs: Vec<(usize, usize)>,
}

impl GroundTruth {
    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            alpha: self.alpha_star,
            l: self.l_star.clone(),
            s: self.s_star.clone(),
        }
    }

    /// Node labels indexing the distinct topic sets, ordered by set size and
    /// then lexicographically (single topics `k` map to label `k`).
    pub fn labels(&self) -> Vec<usize> {
        let mut sets: Vec<&Vec<usize>> = self.topics.iter().collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        self.topics
            .iter()
            .map(|t| sets.iter().position(|s| *s == t).unwrap_or(0))
            .collect()
    }

    /// Number of distinct topic sets.
    pub fn label_count(&self) -> usize {
        let labels = self.labels();
        labels.iter().max().map_or(0, |m| m + 1)
    }
}

fn uniform(rng: &mut ChaCha20Rng, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..=range.1)
}

/// Draws `(alpha*, F*, D*, S*)` and the edge probabilities `P*`.
pub fn generate_ground_truth(cfg: &ScenarioConfig) -> Result<GroundTruth> {
    cfg.validate()?;
    let (n, k) = (cfg.n, cfg.k);
    let block = n / k;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);

    let alpha_star = uniform(&mut rng, ALPHA_RANGE);

    let omega_l = index::sample(&mut rng, n, cfg.n_l).into_vec();
    let rest: Vec<usize> = (0..n).filter(|i| !omega_l.contains(i)).collect();
    let omega_m: Vec<usize> = index::sample(&mut rng, rest.len(), cfg.n_m)
        .into_iter()
        .map(|p| rest[p])
        .collect();
    let mut overlap_l = omega_l;
    let mut overlap_m = omega_m;
    overlap_l.sort_unstable();
    overlap_m.sort_unstable();

    let mut topics: Vec<Vec<usize>> = (0..n).map(|i| vec![i / block]).collect();
    for (nodes, count) in [(&overlap_l, cfg.l), (&overlap_m, cfg.m)] {
        for &i in nodes.iter() {
            let mut t = index::sample(&mut rng, k, count).into_vec();
            t.sort_unstable();
            topics[i] = t;
        }
    }
    let mut f_binary = Matrix::zeros(k, n);
    for (i, t) in topics.iter().enumerate() {
        for &topic in t {
            f_binary[(topic, i)] = 1.0;
        }
    }
    // F J: subtract each row's mean.
    let mut f_star = f_binary.clone();
    for r in 0..k {
        let mean = f_star.row(r).sum() / n as f64;
        f_star.row_mut(r).add_scalar_mut(-mean);
    }

    let d_star: Vec<f64> = (0..k).map(|_| uniform(&mut rng, WEIGHT_RANGE)).collect();

    let per_pair = cfg.pairs_per_block_pair();
    let mut endpoints: Vec<Vec<usize>> = Vec::with_capacity(k);
    if per_pair > 0 {
        for b in 0..k {
            let eligible: Vec<usize> = (b * block..(b + 1) * block)
                .filter(|i| !overlap_l.contains(i) && !overlap_m.contains(i))
                .collect();
            if eligible.len() < per_pair {
                return Err(Error::InvalidConfig(format!(
                    "block {b} has {} single-topic nodes, fewer than the {per_pair} ad-hoc endpoints required",
                    eligible.len()
                )));
            }
            let picks = index::sample(&mut rng, eligible.len(), per_pair);
            endpoints.push(picks.into_iter().map(|p| eligible[p]).collect());
        }
    }

    let mut s_star = Matrix::zeros(n, n);
    let mut adhoc_pairs = Vec::with_capacity(cfg.s_count);
    if per_pair > 0 {
        for p in 0..k {
            for q in p + 1..k {
                for r in 0..per_pair {
                    let (a, b) = (endpoints[p][r], endpoints[q][r]);
                    let (i, j) = (a.min(b), a.max(b));
                    let w = uniform(&mut rng, WEIGHT_RANGE);
                    s_star[(i, j)] = w;
                    s_star[(j, i)] = w;
                    adhoc_pairs.push((i, j));
                }
            }
        }
    }

    let d = Matrix::from_diagonal(&nalgebra::DVector::from_vec(d_star.clone()));
    let l_star = f_star.transpose() * d * &f_star;
    let l_star = crate::linalg::symmetrize(&l_star);
    let p_star = Matrix::from_fn(n, n, |i, j| sigmoid(alpha_star + l_star[(i, j)] + s_star[(i, j)]));

    Ok(GroundTruth {
        config: *cfg,
        alpha_star,
        f_binary,
        f_star,
        d_star,
        l_star,
        s_star,
        p_star,
        topics,
        overlap_l,
        overlap_m,
        adhoc_pairs,
    })
}

/// Draws `X_ij ~ Bernoulli(P*_ij)` for `i < j` (row-major) and mirrors it.
pub fn sample_adjacency(gt: &GroundTruth, seed: u64) -> AdjacencyMatrix {
    sample_from_probabilities(&gt.p_star, seed)
}

/// Bernoulli draw of an undirected network from a probability matrix.
pub fn sample_from_probabilities(p: &Matrix, seed: u64) -> AdjacencyMatrix {
    let n = p.nrows();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut x = AdjacencyMatrix::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u < p[(i, j)] {
                x.set_edge(i, j, true);
            }
        }
    }
    x
}
