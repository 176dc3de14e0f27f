use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Undirected weighted graph stored as a dense symmetric adjacency matrix.
///
/// The adjacency is symmetric, nonnegative and hollow (no self-loops).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T> {
    adjacency: Array2<T>,
}

/// One parsed line of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl<T: Real> Graph<T> {
    pub fn from_adjacency(adjacency: Array2<T>) -> Result<Self> {
        let (rows, cols) = adjacency.dim();
        if rows != cols {
            return Err(Error::Dimension(format!("adjacency is {rows}x{cols}")));
        }
        if rows == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        for i in 0..rows {
            if adjacency[[i, i]] != T::zero() {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            for j in 0..rows {
                let a = adjacency[[i, j]];
                if !a.is_finite() || a < T::zero() {
                    return Err(Error::InvalidGraph(format!(
                        "weight ({i},{j}) = {a} is not a finite nonnegative number"
                    )));
                }
                if a != adjacency[[j, i]] {
                    return Err(Error::InvalidGraph(format!("adjacency not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { adjacency })
    }

    /// Builds a graph from undirected weighted edges. Each edge must appear once.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut adjacency = Array2::zeros((n_nodes, n_nodes));
        for &(i, j, w) in edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) out of range for {n_nodes} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) has weight {w}")));
            }
            if adjacency[[i, j]] != T::zero() {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) listed twice")));
            }
            adjacency[[i, j]] = w;
            adjacency[[j, i]] = w;
        }
        Self::from_adjacency(adjacency)
    }

    /// Parses the `i j [w]` edge-list format. When `n_nodes` is `None` the node
    /// count is one past the largest id seen.
    pub fn parse_edge_list(text: &str, n_nodes: Option<usize>) -> Result<Self> {
        let records = parse_edge_records(text)?;
        let n = match n_nodes {
            Some(n) => n,
            None => records
                .iter()
                .map(|e| e.source.max(e.target) + 1)
                .max()
                .ok_or_else(|| Error::InvalidGraph("edge list is empty".into()))?,
        };
        let edges = records
            .iter()
            .map(|e| {
                let w = T::from_f64(e.weight)
                    .ok_or_else(|| Error::InvalidGraph(format!("weight {} not representable", e.weight)))?;
                Ok((e.source, e.target, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(n, &edges)
    }

    pub fn read_edge_list(path: impl AsRef<Path>, n_nodes: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_edge_list(&text, n_nodes)
    }

    /// Serializes the upper triangle as an edge list. Unit weights are omitted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes {}", self.n_nodes());
        for (i, j, w) in self.edges() {
            if w == T::one() {
                let _ = writeln!(out, "{i} {j}");
            } else {
                let _ = writeln!(out, "{i} {j} {:e}", w.as_f64());
            }
        }
        out
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &Array2<T> {
        &self.adjacency
    }

    /// Edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.n_nodes();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.adjacency[[i, j]];
                if w != T::zero() {
                    edges.push((i, j, w));
                }
            }
        }
        edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Weighted degrees `A·1`.
    pub fn degrees(&self) -> Vec<T> {
        self.adjacency.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for (v, w) in self.adjacency.row(u).iter().enumerate() {
                if !seen[v] && *w != T::zero() {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }
}

/// Parses edge-list lines into records without building a graph. Lines
/// starting with `#` and blank lines are skipped.
pub fn parse_edge_records(text: &str) -> Result<Vec<EdgeRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `i j [w]`, found {} fields", fields.len()),
            });
        }
        let id = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad node id {s:?}: {e}"),
            })
        };
        let source = id(fields[0])?;
        let target = id(fields[1])?;
        let weight = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad weight {s:?}: {e}"),
            })?,
            None => 1.0,
        };
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("weight must be positive, got {weight}"),
            });
        }
        if !seen.insert((source, target)) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate edge ({source},{target})"),
            });
        }
        records.push(EdgeRecord { source, target, weight });
    }
    Ok(records)
}
