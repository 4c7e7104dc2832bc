//! Penalty matrices `D` and the graph bookkeeping used to read fused solutions.

use crate::error::{Error, Result};
use crate::numlin::{self, DenseMatrix};

/// A sparse `m x p` penalty matrix stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrix {
    p: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl PenaltyMatrix {
    /// Builds a matrix from sparse rows of `(column, coefficient)` pairs.
    /// Entries within a row are sorted by column; duplicates are rejected.
    pub fn new(p: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::invalid(format!("row {i} repeats column {}", w[0].0)));
                }
            }
            if let Some(&(j, _)) = row.iter().find(|&&(j, _)| j >= p) {
                return Err(Error::invalid(format!(
                    "row {i} has column {j} outside 0..{p}"
                )));
            }
            if row.iter().any(|&(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite("penalty matrix"));
            }
        }
        Ok(PenaltyMatrix { p, rows })
    }

    /// Sparse copy of a dense matrix (exact zeros are dropped).
    pub fn from_dense(d: &DenseMatrix) -> Result<Self> {
        let rows = (0..d.n_rows())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        Self::new(d.n_cols(), rows)
    }

    pub fn identity(p: usize) -> Self {
        PenaltyMatrix {
            p,
            rows: (0..p).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.p];
        for &(j, v) in &self.rows[i] {
            out[j] = v;
        }
        out
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.rows[i].iter().all(|&(_, v)| v == 0.0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.m(), self.p);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// `D β`
    pub fn apply(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.p {
            return Err(Error::dims(format!(
                "vector of length {} for {} columns",
                beta.len(),
                self.p
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * beta[j]).sum())
            .collect())
    }

    /// `Dᵀ u`
    pub fn apply_t(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.m() {
            return Err(Error::dims(format!(
                "vector of length {} for {} rows",
                u.len(),
                self.m()
            )));
        }
        let mut out = vec![0.0; self.p];
        for (r, &ui) in self.rows.iter().zip(u) {
            if ui != 0.0 {
                for &(j, v) in r {
                    out[j] += v * ui;
                }
            }
        }
        Ok(out)
    }

    /// The rows listed, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> PenaltyMatrix {
        PenaltyMatrix {
            p: self.p,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Stacks `self` over `below`.
    pub fn vstack(&self, below: &PenaltyMatrix) -> Result<PenaltyMatrix> {
        if self.p != below.p {
            return Err(Error::dims(
                "stacking penalties with different column counts",
            ));
        }
        let mut rows = self.rows.clone();
        rows.extend(below.rows.iter().cloned());
        Ok(PenaltyMatrix { p: self.p, rows })
    }
}

/// An undirected graph given by an edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (k, &(i, j)) in edges.iter().enumerate() {
            if i == j {
                return Err(Error::invalid(format!(
                    "edge {k} is a self-loop on node {i}"
                )));
            }
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::invalid(format!(
                    "edge {k} = ({i}, {j}) references a node outside 0..{n_nodes}"
                )));
            }
        }
        Ok(Graph { n_nodes, edges })
    }

    /// The path graph `0 - 1 - ... - (n-1)`.
    pub fn chain(n: usize) -> Self {
        Graph {
            n_nodes: n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of edges that repeat an earlier edge (in either orientation).
    pub fn duplicate_edges(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| !seen.insert((i.min(j), i.max(j))))
            .map(|(k, _)| k)
            .collect()
    }
}

/// First differences: the `(n-1) x n` matrix with rows `e_{i+1} - e_i`.
pub fn make_d1d(n: usize) -> PenaltyMatrix {
    make_graph_fused(&Graph::chain(n))
}

/// Trend filtering of order `k`: `(k+1)`-th differences, `(n-k-1) x n`.
pub fn make_trend_filter(n: usize, k: usize) -> Result<PenaltyMatrix> {
    if k == 0 {
        return Err(Error::invalid("trend filtering order must be at least 1"));
    }
    if n < k + 2 {
        return Err(Error::invalid(format!(
            "trend filtering of order {k} needs at least {} points, got {n}",
            k + 2
        )));
    }
    let mut coef: Vec<f64> = vec![-1.0, 2.0, -1.0];
    for _ in 1..k {
        let mut next = vec![0.0; coef.len() + 1];
        for (j, c) in coef.iter().enumerate() {
            next[j] -= c;
            next[j + 1] += c;
        }
        coef = next;
    }
    let rows = (0..n - k - 1)
        .map(|i| coef.iter().enumerate().map(|(j, &c)| (i + j, c)).collect())
        .collect();
    Ok(PenaltyMatrix { p: n, rows })
}

/// One row per edge; the edge `(i, j)` contributes `-1` at `min(i, j)` and
/// `+1` at `max(i, j)`.
pub fn make_graph_fused(g: &Graph) -> PenaltyMatrix {
    let rows = g
        .edges
        .iter()
        .map(|&(i, j)| vec![(i.min(j), -1.0), (i.max(j), 1.0)])
        .collect();
    PenaltyMatrix { p: g.n_nodes, rows }
}

/// The `rows x cols` lattice, nodes numbered row-major.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges =
        Vec::with_capacity(rows * cols.saturating_sub(1) + cols * rows.saturating_sub(1));
    for r in 0..rows {
        for c in 1..cols {
            edges.push((id(r, c - 1), id(r, c)));
        }
    }
    for r in 1..rows {
        for c in 0..cols {
            edges.push((id(r - 1, c), id(r, c)));
        }
    }
    Graph {
        n_nodes: rows * cols,
        edges,
    }
}

/// Fused rows over `(lambda1 / lambda2) I`; the path parameter is `lambda2`.
pub fn make_sparse_fused(g: &Graph, lambda1: f64, lambda2: f64) -> Result<PenaltyMatrix> {
    if !(lambda2 > 0.0 && lambda2.is_finite()) {
        return Err(Error::invalid("sparse fused lasso needs lambda2 > 0"));
    }
    if !(lambda1 >= 0.0 && lambda1.is_finite()) {
        return Err(Error::invalid("sparse fused lasso needs lambda1 >= 0"));
    }
    let ratio = lambda1 / lambda2;
    let mut d = make_graph_fused(g);
    d.rows.extend((0..g.n_nodes).map(|i| vec![(i, ratio)]));
    Ok(d)
}

/// Outlier-robust regression as a generalized lasso: the design `[I X]` and
/// the penalty `[I 0]` on the outlier coefficients. The first `pinned`
/// outlier coefficients are fixed at zero, which removes their columns from
/// the design and their rows from the penalty.
pub fn outlier_design(x: &DenseMatrix, pinned: usize) -> Result<(DenseMatrix, PenaltyMatrix)> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if pinned > n {
        return Err(Error::invalid(format!(
            "cannot pin {pinned} of {n} outlier coefficients"
        )));
    }
    let free = n - pinned;
    let mut eye = DenseMatrix::zeros(n, free);
    for c in 0..free {
        eye[(pinned + c, c)] = 1.0;
    }
    let design = eye.hstack(x)?;
    let rows = (0..free).map(|c| vec![(c, 1.0)]).collect();
    Ok((design, PenaltyMatrix { p: free + p, rows }))
}

/// Components of the subgraph keeping only edges with `active[e]` set.
/// Labels are numbered in order of each component's smallest node.
pub fn connected_components(g: &Graph, active: &[bool]) -> Result<(Vec<usize>, usize)> {
    if active.len() != g.edges.len() {
        return Err(Error::dims(format!(
            "mask has {} entries for {} edges",
            active.len(),
            g.edges.len()
        )));
    }
    let mut parent: Vec<usize> = (0..g.n_nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (&(i, j), _) in g.edges.iter().zip(active).filter(|(_, &a)| a) {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut label = vec![usize::MAX; g.n_nodes];
    let mut labels = vec![0; g.n_nodes];
    let mut count = 0;
    for (v, slot) in labels.iter_mut().enumerate() {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        *slot = label[r];
    }
    Ok((labels, count))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reducibility {
    /// `rank(D) = m`: the problem can be rewritten as a lasso.
    Reducible,
    NotReducible,
}

pub fn lasso_reducibility(d: &PenaltyMatrix) -> Reducibility {
    if numlin::rank(&d.to_dense()) == d.m() {
        Reducibility::Reducible
    } else {
        Reducibility::NotReducible
    }
}
