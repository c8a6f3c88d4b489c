//! Undirected weighted graphs and the plain-text edge-list format.
//!
//! An edge list has one edge per line, `u v` or `u v w`, with 0-indexed
//! vertices and an optional positive weight. Everything after a `#` is a
//! comment. The vertex count is one more than the largest index seen.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    // (u, v, w) with u < v, sorted.
    edges: Vec<(usize, usize, f64)>,
    weighted: bool,
}

impl Graph {
    /// Build a graph from unit-weight edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::build(n, &weighted, false)
    }

    /// Build a graph from weighted edges.
    pub fn with_weights(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::build(n, edges, true)
    }

    fn build(n: usize, edges: &[(usize, usize, f64)], weighted: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        let mut seen = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Graph(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key, w).is_some() {
                return Err(Error::Graph(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
        }
        let g = Graph { n, edges: seen.into_iter().map(|((u, v), w)| (u, v, w)).collect(), weighted };
        if !g.is_connected() {
            return Err(Error::Graph("graph is disconnected".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    /// Neighbour lists with weights.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }

    /// Weighted degree of every vertex.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for &(u, v, w) in &self.edges {
            s[u] += w;
            s[v] += w;
        }
        s
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v, _) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Render in the edge-list format; `from_edge_list` reads it back.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v, w) in &self.edges {
            if self.weighted {
                let _ = writeln!(out, "{u} {v} {w}");
            } else {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }
}

/// Parse an edge-list document.
pub fn from_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut weighted = false;
    let mut n = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `u v` or `u v w`, found {} fields", fields.len()),
            });
        }
        let vertex = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("`{s}` is not a vertex index") })
        };
        let u = vertex(fields[0])?;
        let v = vertex(fields[1])?;
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at vertex {u}") });
        }
        let w = match fields.get(2) {
            Some(s) => {
                weighted = true;
                let w: f64 = s.parse().map_err(|_| Error::Parse { line, msg: format!("`{s}` is not a number") })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Parse { line, msg: format!("weight {w} is not positive") });
                }
                w
            }
            None => 1.0,
        };
        if edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            return Err(Error::Parse { line, msg: format!("duplicate edge ({u}, {v})") });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(Error::Graph("edge list is empty".into()));
    }
    Graph::build(n, &edges, weighted)
}
