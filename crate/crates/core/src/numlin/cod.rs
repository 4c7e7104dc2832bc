//! Complete orthogonal decomposition: Householder QR with column pivoting
//! followed by a second QR of the leading trapezoid, giving minimum-norm
//! least-squares solutions for matrices of any rank.

use super::matrix::{dot, norm2, DenseMatrix};

/// A Householder reflector `I - tau v vᵀ` acting on entries `start..start + v.len()`.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    start: usize,
    v: Vec<f64>,
    tau: f64,
}

impl Reflector {
    /// Builds the reflector mapping `x` onto `beta e1`; returns it with `beta`.
    pub(crate) fn new(start: usize, x: &[f64]) -> (Reflector, f64) {
        let identity = |beta| {
            (
                Reflector {
                    start,
                    v: Vec::new(),
                    tau: 0.0,
                },
                beta,
            )
        };
        if x.is_empty() {
            return identity(0.0);
        }
        if x[1..].iter().all(|&t| t == 0.0) {
            return identity(x[0]);
        }
        let norm = norm2(x);
        let beta = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= beta;
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let tau = if vv == 0.0 { 0.0 } else { 2.0 / vv };
        (Reflector { start, v, tau }, beta)
    }

    #[inline]
    pub(crate) fn apply(&self, x: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let seg = &mut x[self.start..self.start + self.v.len()];
        let s = self.tau * dot(&self.v, seg);
        if s != 0.0 {
            for (xi, vi) in seg.iter_mut().zip(&self.v) {
                *xi -= s * vi;
            }
        }
    }
}

/// Rank tolerance for a triangular diagonal with largest entry `rmax`.
pub fn rank_tolerance(rows: usize, cols: usize, rmax: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * rmax
}

/// `A P = Q [R11 R12; 0 0]`, and when `A` is rank deficient additionally
/// `[R11 R12]ᵀ = Z T`, so that `A⁺ = P Z T⁻ᵀ Q₁ᵀ`.
#[derive(Debug, Clone)]
pub struct Cod {
    rows: usize,
    cols: usize,
    rank: usize,
    perm: Vec<usize>,
    q: Vec<Reflector>,
    /// Leading `rank` rows of the pivoted triangular factor, row-major, `rank x cols`.
    r_top: Vec<Vec<f64>>,
    /// Second-stage reflectors and the `rank x rank` upper triangle `T` (row-major).
    z: Vec<Reflector>,
    t: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

impl Cod {
    pub fn new(a: &DenseMatrix) -> Cod {
        let (rows, cols) = (a.n_rows(), a.n_cols());
        let mut columns: Vec<Vec<f64>> = (0..cols).map(|j| a.col(j)).collect();
        Self::from_columns(rows, &mut columns)
    }

    /// Factors the matrix whose columns are given (each of length `rows`).
    pub(crate) fn from_columns(rows: usize, columns: &mut [Vec<f64>]) -> Cod {
        let cols = columns.len();
        let mut perm: Vec<usize> = (0..cols).collect();
        let mut q = Vec::new();
        let mut diag = Vec::new();
        let steps = rows.min(cols);
        let mut rmax = 0.0f64;
        let mut rank = 0;
        for j in 0..steps {
            let (best, best_norm) = (j..cols)
                .map(|c| (c, norm2(&columns[c][j..])))
                .fold((j, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if j == 0 {
                rmax = best_norm;
            }
            if best_norm <= rank_tolerance(rows, cols, rmax) || best_norm == 0.0 {
                break;
            }
            columns.swap(j, best);
            perm.swap(j, best);
            let (h, beta) = Reflector::new(j, &columns[j][j..]);
            columns[j][j] = beta;
            for v in columns[j][j + 1..].iter_mut() {
                *v = 0.0;
            }
            for col in columns[j + 1..].iter_mut() {
                h.apply(col);
            }
            q.push(h);
            diag.push(beta);
            rank += 1;
        }
        let r_top: Vec<Vec<f64>> = (0..rank)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();

        let (z, t) = if rank < cols {
            // QR of r_topᵀ (cols x rank); columns of r_topᵀ are the rows of r_top.
            let mut zc: Vec<Vec<f64>> = r_top.clone();
            let mut z = Vec::with_capacity(rank);
            for j in 0..rank {
                let (h, beta) = Reflector::new(j, &zc[j][j..]);
                zc[j][j] = beta;
                for v in zc[j][j + 1..].iter_mut() {
                    *v = 0.0;
                }
                for col in zc[j + 1..].iter_mut() {
                    h.apply(col);
                }
                z.push(h);
            }
            // T[i][j] = zc[j][i] for i <= j
            let t = (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| if i <= j { zc[j][i] } else { 0.0 })
                        .collect()
                })
                .collect();
            (z, t)
        } else {
            (Vec::new(), Vec::new())
        };

        Cod {
            rows,
            cols,
            rank,
            perm,
            q,
            r_top,
            z,
            t,
            diag,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// Ratio of largest to smallest retained pivot; infinite when rank is zero.
    pub fn condition_estimate(&self) -> f64 {
        match (self.diag.first(), self.diag.last()) {
            (Some(a), Some(b)) => a.abs() / b.abs(),
            _ => f64::INFINITY,
        }
    }

    fn qt_apply(&self, b: &[f64]) -> Vec<f64> {
        let mut c = b.to_vec();
        for h in &self.q {
            h.apply(&mut c);
        }
        c
    }

    /// Minimum-norm least-squares solution `A⁺ b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.rows, "rhs length");
        let c = self.qt_apply(b);
        let r = self.rank;
        let mut w = vec![0.0; self.cols];
        if r == self.cols {
            for i in (0..r).rev() {
                let row = &self.r_top[i];
                let s: f64 = (i + 1..r).map(|j| row[j] * w[j]).sum();
                w[i] = (c[i] - s) / row[i];
            }
        } else if r > 0 {
            // Tᵀ z = c[..r], forward substitution
            let mut zv = vec![0.0; self.cols];
            for i in 0..r {
                let s: f64 = (0..i).map(|j| self.t[j][i] * zv[j]).sum();
                zv[i] = (c[i] - s) / self.t[i][i];
            }
            for h in self.z.iter().rev() {
                h.apply(&mut zv);
            }
            w = zv;
        }
        let mut x = vec![0.0; self.cols];
        for (j, &p) in self.perm.iter().enumerate() {
            x[p] = w[j];
        }
        x
    }

    /// Orthogonal projection of `b` onto the column space of `A`.
    pub fn project_range(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.rows, "vector length");
        let c = self.qt_apply(b);
        let mut out = vec![0.0; self.rows];
        out[..self.rank].copy_from_slice(&c[..self.rank]);
        for h in self.q.iter().rev() {
            h.apply(&mut out);
        }
        out
    }

    /// Approximate operation count of one factorization of this shape.
    pub(crate) fn flop_estimate(rows: usize, cols: usize, rank: usize) -> u64 {
        (4 * rows * cols * rank.max(1)) as u64
    }
}
