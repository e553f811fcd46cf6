//! Degree filtering, isolated-node removal and giant components.

use std::collections::VecDeque;

use anyhow::{bail, Result};
use lsnet_core::AdjacencyMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub network: AdjacencyMatrix,
    /// Original index of every kept node, ascending.
    pub kept: Vec<usize>,
    pub summary: PreprocessSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessSummary {
    pub nodes_in: usize,
    pub min_degree: usize,
    pub below_degree: usize,
    pub isolated: usize,
    /// Removal passes that dropped at least one isolated node.
    pub isolation_rounds: usize,
    pub nodes_out: usize,
}

/// Keeps nodes whose degree in `x` is at least `min_degree`, then removes
/// nodes isolated in the induced subgraph until none are left.
pub fn preprocess(x: &AdjacencyMatrix, min_degree: usize) -> Result<Preprocessed> {
    let degrees = x.degrees();
    let mut kept: Vec<usize> = (0..x.n()).filter(|&i| degrees[i] >= min_degree).collect();
    let below_degree = x.n() - kept.len();
    let mut isolated = 0;
    let mut isolation_rounds = 0;
    loop {
        let sub = x.induced(&kept);
        let before = kept.len();
        let sub_degrees = sub.degrees();
        kept = kept
            .iter()
            .zip(&sub_degrees)
            .filter(|(_, &d)| d > 0)
            .map(|(&i, _)| i)
            .collect();
        if kept.len() == before {
            break;
        }
        isolated += before - kept.len();
        isolation_rounds += 1;
    }
    if kept.is_empty() {
        bail!(
            "no nodes left after keeping degree >= {min_degree} and removing isolated nodes \
             ({below_degree} below the degree threshold, {isolated} isolated)"
        );
    }
    let network = x.induced(&kept);
    Ok(Preprocessed {
        summary: PreprocessSummary {
            nodes_in: x.n(),
            min_degree,
            below_degree,
            isolated,
            isolation_rounds,
            nodes_out: kept.len(),
        },
        network,
        kept,
    })
}

/// Connected components, each sorted, ordered by their smallest node.
pub fn components(x: &AdjacencyMatrix) -> Vec<Vec<usize>> {
    let n = x.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in x.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Largest connected component of the subgraph induced by `subset`. Ties go
/// to the component holding the smallest node index. Returns the induced
/// network and the original indices of its nodes, ascending.
pub fn giant_component(x: &AdjacencyMatrix, subset: &[usize]) -> Result<(AdjacencyMatrix, Vec<usize>)> {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.is_empty() {
        bail!("giant component of an empty node set");
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i >= x.n()) {
        bail!("node {bad} outside a network of {} nodes", x.n());
    }
    let sub = x.induced(&nodes);
    let mut best: Vec<usize> = Vec::new();
    for comp in components(&sub) {
        if comp.len() > best.len() {
            best = comp;
        }
    }
    let original: Vec<usize> = best.iter().map(|&i| nodes[i]).collect();
    Ok((x.induced(&original), original))
}
