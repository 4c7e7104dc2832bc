#![allow(dead_code)]

use genlasso::numlin::DenseMatrix;
use genlasso::penalty::{self, Graph, PenaltyMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_vec(rows, cols, normal_vec(rng, rows * cols)).unwrap()
}

/// A connected graph on `n` nodes: a random spanning tree plus `extra`
/// further edges, which close cycles.
pub fn cyclic_graph(rng: &mut impl Rng, n: usize, extra: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 1000 {
        tries += 1;
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let e = (i.min(j), i.max(j));
        if i != j && !edges.iter().any(|&(a, b)| (a.min(b), a.max(b)) == e) {
            edges.push(e);
        }
    }
    Graph::new(n, edges).unwrap()
}

pub struct Instance {
    pub label: String,
    pub y: Vec<f64>,
    pub d: PenaltyMatrix,
    pub graph: Option<Graph>,
}

/// Small instances (`n ≤ 15`, `m ≤ 20`) cycling through penalty families,
/// including duplicated rows, cycles and rank-deficient dense penalties.
pub fn small_instance(rng: &mut impl Rng, k: usize) -> Instance {
    let (label, d, graph): (&str, PenaltyMatrix, Option<Graph>) = match k % 10 {
        0 => {
            let n = rng.random_range(3..=15);
            ("d1d", penalty::make_d1d(n), Some(Graph::chain(n)))
        }
        1 => (
            "tf1",
            penalty::make_trend_filter(rng.random_range(4..=15), 1).unwrap(),
            None,
        ),
        2 => (
            "tf2",
            penalty::make_trend_filter(rng.random_range(5..=12), 2).unwrap(),
            None,
        ),
        3 => {
            let n = rng.random_range(4..=10);
            let extra = rng.random_range(1..=(21 - n).min(8));
            let g = cyclic_graph(rng, n, extra);
            ("cyclic graph", penalty::make_graph_fused(&g), Some(g))
        }
        4 => {
            let n = rng.random_range(4..=9);
            let mut g = cyclic_graph(rng, n, 2);
            let mut edges = g.edges().to_vec();
            let dup = edges[rng.random_range(0..edges.len())];
            edges.push((dup.1, dup.0));
            g = Graph::new(n, edges).unwrap();
            ("duplicate edge", penalty::make_graph_fused(&g), Some(g))
        }
        5 => (
            "identity",
            PenaltyMatrix::identity(rng.random_range(2..=15)),
            None,
        ),
        6 => {
            let n = rng.random_range(3..=9);
            let g = cyclic_graph(rng, n, 1);
            let l1 = rng.random_range(0.2..1.5);
            (
                "sparse fused",
                penalty::make_sparse_fused(&g, l1, 1.0).unwrap(),
                None,
            )
        }
        7 => {
            // more rows than columns, with an exact duplicate
            let n = rng.random_range(3..=8);
            let m = rng.random_range(n + 1..=20);
            let mut rows: Vec<Vec<f64>> = (0..m - 1).map(|_| normal_vec(rng, n)).collect();
            let dup = rows[rng.random_range(0..rows.len())].clone();
            rows.push(dup);
            let d = PenaltyMatrix::from_dense(&DenseMatrix::from_rows(&rows, n).unwrap()).unwrap();
            ("dense m>n", d, None)
        }
        8 => {
            let (r, c) = if rng.random_bool(0.5) { (3, 3) } else { (2, 4) };
            let g = penalty::grid_graph(r, c);
            ("2d grid", penalty::make_graph_fused(&g), Some(g))
        }
        _ => {
            let n = rng.random_range(4..=15);
            let m = rng.random_range(2..n);
            (
                "dense m<n",
                PenaltyMatrix::from_dense(&normal_matrix(rng, m, n)).unwrap(),
                None,
            )
        }
    };
    let y = normal_vec(rng, d.p()).iter().map(|v| 2.0 * v).collect();
    Instance {
        label: label.to_string(),
        y,
        d,
        graph,
    }
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn soft_threshold(y: f64, lambda: f64) -> f64 {
    y.signum() * (y.abs() - lambda).max(0.0)
}
