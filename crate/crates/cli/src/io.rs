//! Network, matrix and label files.
//!
//! Networks are read either as edge lists (`i j` per line, `#` comments, an
//! optional `# nodes: N` header) or as dense 0/1 matrices separated by
//! whitespace or commas. Real matrices are written as dense CSV up to
//! [`DENSE_LIMIT`] rows and as `row,col,value` triplets above that; both
//! forms print every value with its shortest round-trip representation.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lsnet_core::{AdjacencyMatrix, Matrix};
use serde::{Deserialize, Serialize};

/// Largest dimension written as a dense CSV.
pub const DENSE_LIMIT: usize = 512;

const TRIPLET_HEADER: &str = "# triplets";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkFormat {
    /// One undirected pair per line.
    #[default]
    Edges,
    /// Square 0/1 matrix.
    Dense,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Node ids start at 1 instead of 0.
    pub one_based: bool,
    /// Node count; otherwise taken from a `# nodes:` header or the largest id.
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedNetwork {
    pub network: AdjacencyMatrix,
    pub self_loops_dropped: usize,
    pub duplicates: usize,
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn nodes_header(line: &str) -> Option<&str> {
    let rest = line.trim_start_matches('#').trim();
    let (key, value) = rest.split_once(':')?;
    key.trim().eq_ignore_ascii_case("nodes").then(|| value.trim())
}

pub fn parse_edge_list(text: &str, opts: EdgeListOptions) -> Result<LoadedNetwork> {
    let mut header_n = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(v) = nodes_header(line) {
                header_n = Some(
                    v.parse::<usize>()
                        .with_context(|| format!("line {}: bad node count {v:?}", lineno + 1))?,
                );
            }
            continue;
        }
        let ids: Vec<&str> = fields(line).collect();
        if ids.len() != 2 {
            bail!("line {}: expected two node ids, found {:?}", lineno + 1, line);
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&ids) {
            let id: usize = tok
                .parse()
                .with_context(|| format!("line {}: bad node id {tok:?}", lineno + 1))?;
            *slot = if opts.one_based {
                id.checked_sub(1)
                    .ok_or_else(|| anyhow!("line {}: node id 0 in a 1-based list", lineno + 1))?
            } else {
                id
            };
        }
        pairs.push((lineno + 1, pair[0], pair[1]));
    }
    let n = match opts.nodes.or(header_n) {
        Some(n) => n,
        None => pairs.iter().map(|&(_, i, j)| i.max(j) + 1).max().unwrap_or(0),
    };
    let mut network = AdjacencyMatrix::empty(n);
    let (mut self_loops_dropped, mut duplicates) = (0, 0);
    let mut kept = Vec::with_capacity(pairs.len());
    for (lineno, i, j) in pairs {
        if i >= n || j >= n {
            bail!("line {lineno}: edge ({i}, {j}) out of range for {n} nodes");
        }
        if i == j {
            self_loops_dropped += 1;
            continue;
        }
        kept.push((i, j));
    }
    kept.iter_mut().for_each(|p| *p = (p.0.min(p.1), p.0.max(p.1)));
    let before = kept.len();
    kept.sort_unstable();
    kept.dedup();
    duplicates += before - kept.len();
    if !kept.is_empty() {
        network = AdjacencyMatrix::from_edges(n, kept)?;
    }
    Ok(LoadedNetwork {
        network,
        self_loops_dropped,
        duplicates,
    })
}

pub fn parse_dense(text: &str) -> Result<AdjacencyMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = fields(line)
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v == 0.0 || v == 1.0 => Ok(v),
                _ => Err(anyhow!("line {}: entry {tok:?} is not 0 or 1", lineno + 1)),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
        bail!("dense network is not square: row {} has {} entries, expected {n}", r + 1, row.len());
    }
    let entries = Matrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(AdjacencyMatrix::new(entries)?)
}

pub fn load_network(path: &Path, format: NetworkFormat, opts: EdgeListOptions) -> Result<LoadedNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let loaded = match format {
        NetworkFormat::Edges => parse_edge_list(&text, opts),
        NetworkFormat::Dense => parse_dense(&text).map(|network| LoadedNetwork {
            network,
            self_loops_dropped: 0,
            duplicates: 0,
        }),
    };
    loaded.with_context(|| format!("parsing {}", path.display()))
}

pub fn format_edge_list(x: &AdjacencyMatrix, one_based: bool) -> String {
    let base = usize::from(one_based);
    let mut out = format!("# nodes: {}\n", x.n());
    for (i, j) in x.edges() {
        out.push_str(&format!("{} {}\n", i + base, j + base));
    }
    out
}

pub fn format_dense(x: &AdjacencyMatrix) -> String {
    let n = x.n();
    let mut out = String::with_capacity(2 * n * n);
    for i in 0..n {
        let row: Vec<&str> = (0..n).map(|j| if x.get(i, j) { "1" } else { "0" }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_network(x: &AdjacencyMatrix, format: NetworkFormat, one_based: bool) -> String {
    match format {
        NetworkFormat::Edges => format_edge_list(x, one_based),
        NetworkFormat::Dense => format_dense(x),
    }
}

pub fn format_matrix(m: &Matrix) -> String {
    let (r, c) = m.shape();
    let mut out = String::new();
    if r.max(c) <= DENSE_LIMIT {
        for i in 0..r {
            let row: Vec<String> = (0..c).map(|j| m[(i, j)].to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    } else {
        out.push_str(&format!("{TRIPLET_HEADER} {r} {c}\n"));
        for j in 0..c {
            for i in 0..r {
                let v = m[(i, j)];
                // -0.0 is kept so that the round trip is bit-exact
                if v.to_bits() != 0 {
                    out.push_str(&format!("{i},{j},{v}\n"));
                }
            }
        }
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = lines.clone().next().unwrap_or("");
    if let Some(dims) = first.strip_prefix(TRIPLET_HEADER) {
        lines.next();
        let dims: Vec<usize> = fields(dims)
            .map(|t| t.parse().context("bad triplet header"))
            .collect::<Result<_>>()?;
        let [r, c] = dims[..] else {
            bail!("triplet header needs two dimensions");
        };
        let mut m = Matrix::zeros(r, c);
        for line in lines {
            let toks: Vec<&str> = fields(line).collect();
            let [i, j, v] = toks[..] else {
                bail!("bad triplet line {line:?}");
            };
            let (i, j): (usize, usize) = (i.parse()?, j.parse()?);
            if i >= r || j >= c {
                bail!("triplet ({i}, {j}) outside {r}x{c}");
            }
            m[(i, j)] = v.parse().with_context(|| format!("bad value {v:?}"))?;
        }
        return Ok(m);
    }
    let rows: Vec<Vec<f64>> = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad value {t:?}")))
                .collect()
        })
        .collect::<Result<_>>()?;
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        bail!("ragged matrix rows");
    }
    Ok(Matrix::from_fn(rows.len(), c, |i, j| rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `node,label` rows; node ids are those of the input network.
pub fn format_labels(nodes: &[usize], labels: &[usize]) -> String {
    let mut out = String::from("node,label\n");
    for (node, label) in nodes.iter().zip(labels) {
        out.push_str(&format!("{node},{label}\n"));
    }
    out
}

pub fn parse_labels(text: &str) -> Result<Vec<(usize, usize)>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("node"))
        .map(|l| {
            let toks: Vec<&str> = fields(l).collect();
            let [node, label] = toks[..] else {
                bail!("bad label line {l:?}");
            };
            Ok((node.parse()?, label.parse()?))
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_labels(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .ok_or_else(|| anyhow!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_edge() {
        let opts = EdgeListOptions {
            one_based: true,
            nodes: Some(3),
        };
        let x = parse_edge_list("1 2\n", opts).unwrap().network;
        assert_eq!(x.n(), 3);
        assert!(x.get(0, 1) && x.get(1, 0));
        assert_eq!(x.edge_count(), 1);
    }

    #[test]
    fn duplicates_and_self_loops() {
        let opts = EdgeListOptions {
            one_based: true,
            nodes: Some(3),
        };
        let once = parse_edge_list("1 2\n", opts).unwrap();
        let twice = parse_edge_list("1 2\n2 1\n", opts).unwrap();
        assert_eq!(once.network, twice.network);
        assert_eq!(twice.duplicates, 1);
        let looped = parse_edge_list("1 2\n3 3\n", opts).unwrap();
        assert_eq!(looped.self_loops_dropped, 1);
        assert_eq!(looped.network, once.network);
    }

    #[test]
    fn edge_list_errors() {
        let opts = EdgeListOptions {
            one_based: false,
            nodes: Some(2),
        };
        assert!(parse_edge_list("0 2\n", opts).is_err());
        assert!(parse_edge_list("0 x\n", opts).is_err());
        assert!(parse_edge_list("0 1 2\n", opts).is_err());
        let one = EdgeListOptions {
            one_based: true,
            nodes: None,
        };
        assert!(parse_edge_list("0 1\n", one).is_err());
    }

    #[test]
    fn node_count_sources() {
        let x = parse_edge_list("# nodes: 6\n0 1\n", EdgeListOptions::default()).unwrap();
        assert_eq!(x.network.n(), 6);
        let x = parse_edge_list("0 1\n4,2\n", EdgeListOptions::default()).unwrap();
        assert_eq!(x.network.n(), 5);
    }

    #[test]
    fn dense_validation() {
        assert!(parse_dense("0 1\n1 0\n").is_ok());
        assert!(parse_dense("0,1\n1,0\n").is_ok());
        assert!(parse_dense("0 1\n0 0\n").is_err());
        assert!(parse_dense("0 2\n2 0\n").is_err());
        assert!(parse_dense("1 0\n0 0\n").is_err());
        assert!(parse_dense("0 1 0\n1 0\n").is_err());
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let m = Matrix::from_row_slice(2, 3, &[0.1, -0.0, 1e-300, f64::MAX, -2.5, 1.0 / 3.0]);
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn large_matrices_use_triplets() {
        let n = DENSE_LIMIT + 1;
        let mut m = Matrix::zeros(n, n);
        m[(3, 7)] = 0.25;
        m[(n - 1, 0)] = -0.0;
        let text = format_matrix(&m);
        assert!(text.starts_with(TRIPLET_HEADER));
        assert_eq!(text.lines().count(), 3);
        let back = parse_matrix(&text).unwrap();
        assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn labels_round_trip() {
        let text = format_labels(&[4, 9, 11], &[0, 1, 0]);
        assert_eq!(parse_labels(&text).unwrap(), vec![(4, 0), (9, 1), (11, 0)]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.txt");
        write_atomic(&path, "a").unwrap();
        write_atomic(&path, "b").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "b");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
