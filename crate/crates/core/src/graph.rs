//! Simple undirected graphs with optional loops, and their text format.
//!
//! The file format is line oriented: a header `n m`, then `m` lines `i j`
//! with 1-based vertex labels and `i <= j`. Blank lines and lines starting
//! with `#` are ignored by the reader; the writer emits edges in ascending
//! order so reading and writing round-trip exactly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Undirected graph on vertices `0..n`. Edges are stored as `(i, j)` with
/// `i <= j`; `(i, i)` is a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Edgeless graph. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a graph needs at least one vertex");
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.edges.insert((i, j));
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j {
                g.edges.insert((i.min(j), i.max(j)));
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 1..n {
            g.edges.insert((i - 1, i));
        }
        g
    }

    pub fn star(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 1..n {
            g.edges.insert((0, i));
        }
        g
    }

    /// Adds `{i, j}`; returns whether the edge was new.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidParameter(format!(
                "edge ({i}, {j}) out of range for {} vertices",
                self.n
            )));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(i, j)| i == j)
    }

    /// Number of `j` with `ij ∈ E`; a loop counts once.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            if i != j {
                deg[j] += 1;
            }
        }
        deg
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> SymmetricMatrix {
        let mut a = SymmetricMatrix::zeros(self.n);
        for &(i, j) in &self.edges {
            a.set(i, j, 1.0);
        }
        a
    }

    /// Normalized Laplacian `I − T A T` with `T = diag(deg^{-1/2})`, and
    /// `T(i,i) = 0` for isolated vertices (their row is `e_iᵀ`).
    pub fn laplacian(&self) -> SymmetricMatrix {
        let scale: Vec<f64> = self
            .degrees()
            .into_iter()
            .map(|d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
            .collect();
        normalized_laplacian(&self.adjacency(), &scale)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.to_text().as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            let _ = writeln!(s, "{} {}", i + 1, j + 1);
        }
        s
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut g: Option<Graph> = None;
        let mut seen = 0usize;
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| format_error(lineno, e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (a, b) = parse_pair(trimmed, lineno)?;
            match header {
                None => {
                    if a == 0 {
                        return Err(format_error(lineno, "vertex count must be positive".into()));
                    }
                    header = Some((a, b));
                    g = Some(Graph::new(a));
                }
                Some((n, m)) => {
                    if seen == m {
                        return Err(format_error(lineno, format!("more than the declared {m} edges")));
                    }
                    if a == 0 || b == 0 || a > n || b > n {
                        return Err(format_error(lineno, format!("vertex out of range 1..={n}")));
                    }
                    if a > b {
                        return Err(format_error(lineno, format!("edge {a} {b} must satisfy i <= j")));
                    }
                    let graph = g.as_mut().expect("header parsed");
                    if !graph.add_edge(a - 1, b - 1)? {
                        return Err(format_error(lineno, format!("duplicate edge {a} {b}")));
                    }
                    seen += 1;
                }
            }
        }
        match header {
            None => Err(format_error(0, "missing header line".into())),
            Some((_, m)) if seen != m => Err(format_error(0, format!("declared {m} edges, found {seen}"))),
            Some(_) => Ok(g.expect("header parsed")),
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

/// `I − T W T` for a weight matrix `W` and diagonal scaling `T`.
pub(crate) fn normalized_laplacian(weights: &SymmetricMatrix, scale: &[f64]) -> SymmetricMatrix {
    let n = weights.order();
    SymmetricMatrix::from_fn(n, |i, j| {
        let off = scale[i] * weights.get(i, j) * scale[j];
        if i == j {
            1.0 - off
        } else {
            -off
        }
    })
}

fn format_error(line: usize, message: String) -> Error {
    Error::GraphFormat { line, message }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let mut next = || -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| format_error(lineno, "expected two integers".into()))?
            .parse::<usize>()
            .map_err(|e| format_error(lineno, e.to_string()))
    };
    let pair = (next()?, next()?);
    if parts.next().is_some() {
        return Err(format_error(lineno, "trailing tokens".into()));
    }
    Ok(pair)
}
