//! QR factorization of `Aᵀ` that follows row insertions and deletions of `A`.
//!
//! The factor keeps `Aᵀ = Q R` with `R` stored column by column (one column per
//! tracked row of `A`). `Q` itself is not stored unless requested; instead the
//! images `Qᵀ v` of a few registered vectors are kept current under every
//! update. Deleting a row turns its column of `R` into such an image, which
//! is what later allows the row to be re-inserted without `Q`.

use std::collections::BTreeMap;

use super::cod::{rank_tolerance, Cod, Reflector};
use super::matrix::{axpy, DenseMatrix};
use crate::error::{Error, Result};

/// Handle for a row of the factored matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(usize);

impl RowId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QrOptions {
    /// Keep `Q` explicitly, enabling insertion of arbitrary new rows.
    pub keep_q: bool,
    /// Keep the images of deleted rows so they can be re-inserted.
    pub retain_detached: bool,
}

/// Unpivoted triangular factors whose smallest diagonal falls below this
/// fraction of the largest are solved through a complete orthogonal
/// decomposition instead of back substitution.
const BACKSUB_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct Givens {
    p: usize,
    c: f64,
    s: f64,
}

impl Givens {
    /// Rotation on rows `(p, p+1)` (or `(p, q)`) that zeroes `b` against `a`.
    fn zeroing(p: usize, a: f64, b: f64) -> Option<Givens> {
        if b == 0.0 {
            return None;
        }
        let r = a.hypot(b);
        Some(Givens {
            p,
            c: a / r,
            s: b / r,
        })
    }

    #[inline]
    fn apply(&self, x: &mut [f64]) {
        let (a, b) = (x[self.p], x[self.p + 1]);
        x[self.p] = self.c * a + self.s * b;
        x[self.p + 1] = -self.s * a + self.c * b;
    }
}

fn rotate_block(rots: &[Givens], cols: &mut [Vec<f64>]) {
    if let [a, b, c, d] = cols {
        for g in rots {
            g.apply(a);
            g.apply(b);
            g.apply(c);
            g.apply(d);
        }
    } else {
        for col in cols {
            rots.iter().for_each(|g| g.apply(col));
        }
    }
}

#[derive(Debug, Clone)]
pub struct UpdatableQr {
    dim: usize,
    ids: Vec<RowId>,
    cols: Vec<Vec<f64>>,
    tracked: Vec<Vec<f64>>,
    detached: BTreeMap<RowId, Vec<f64>>,
    opts: QrOptions,
    /// `qt[i] = Qᵀ eᵢ` when `keep_q` is set.
    qt: Option<Vec<Vec<f64>>>,
    next_id: usize,
    flops: u64,
}

impl UpdatableQr {
    /// Factors `Aᵀ` where `A` has the given rows (each of length `dim`), and
    /// registers the vectors in `tracked` so that their images `Qᵀ v` are kept.
    pub fn new(
        dim: usize,
        rows: &[Vec<f64>],
        tracked: &[Vec<f64>],
        opts: QrOptions,
    ) -> Result<UpdatableQr> {
        if let Some(r) = rows.iter().chain(tracked).find(|r| r.len() != dim) {
            return Err(Error::dims(format!(
                "vector of length {} in a factorization of dimension {dim}",
                r.len()
            )));
        }
        let k = rows.len();
        let mut cols: Vec<Vec<f64>> = rows.to_vec();
        let mut tracked: Vec<Vec<f64>> = tracked.to_vec();
        let mut qt: Option<Vec<Vec<f64>>> = opts.keep_q.then(|| {
            (0..dim)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    e
                })
                .collect()
        });
        // Last nonzero row of each column; reflectors only touch rows up to
        // the extent of the column they are built from.
        let mut extent: Vec<Option<usize>> = cols
            .iter()
            .map(|c| c.iter().rposition(|&v| v != 0.0))
            .collect();
        let mut flops = 0u64;
        for j in 0..dim.min(k) {
            let end = extent[j].map_or(j, |e| e.max(j));
            let (h, beta) = Reflector::new(j, &cols[j][j..=end]);
            cols[j][j] = beta;
            for v in cols[j][j + 1..=end].iter_mut() {
                *v = 0.0;
            }
            extent[j] = Some(j);
            let len = end - j + 1;
            if len > 1 {
                for c in j + 1..k {
                    let touches = extent[c].is_some_and(|e| e >= j)
                        && cols[c][j..=end].iter().any(|&v| v != 0.0);
                    if touches {
                        h.apply(&mut cols[c]);
                        extent[c] = Some(extent[c].unwrap_or(0).max(end));
                        flops += 4 * len as u64;
                    } else {
                        flops += len as u64;
                    }
                }
                for t in tracked.iter_mut() {
                    h.apply(t);
                }
                if let Some(q) = qt.as_mut() {
                    for t in q.iter_mut() {
                        h.apply(t);
                    }
                }
                flops += 4 * len as u64 * (tracked.len() + qt.as_ref().map_or(0, Vec::len)) as u64;
            }
        }
        Ok(UpdatableQr {
            dim,
            ids: (0..k).map(RowId).collect(),
            cols,
            tracked,
            detached: BTreeMap::new(),
            opts,
            qt,
            next_id: k,
            flops,
        })
    }

    /// Length of each row of `A`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows currently in `A`.
    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    /// Row handles in factor column order.
    pub fn ids(&self) -> &[RowId] {
        &self.ids
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    pub fn tracked(&self, t: usize) -> &[f64] {
        &self.tracked[t]
    }

    pub fn tracked_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.tracked[t]
    }

    /// Registers a vector already expressed in the current rotated coordinates.
    pub fn track_image(&mut self, image: Vec<f64>) -> Result<usize> {
        if image.len() != self.dim {
            return Err(Error::dims("image length differs from factor dimension"));
        }
        self.tracked.push(image);
        Ok(self.tracked.len() - 1)
    }

    /// Registers a vector `v`, storing `Qᵀ v`. Needs an explicit `Q`.
    pub fn track(&mut self, v: &[f64]) -> Result<usize> {
        let image = self.rotate_in(v)?;
        self.track_image(image)
    }

    pub fn detached_image(&self, id: RowId) -> Option<&[f64]> {
        self.detached.get(&id).map(Vec::as_slice)
    }

    fn rotate_in(&self, v: &[f64]) -> Result<Vec<f64>> {
        let qt = self.qt.as_ref().ok_or(Error::Unsupported(
            "explicit Q was not kept for this factorization",
        ))?;
        if v.len() != self.dim {
            return Err(Error::dims("vector length differs from factor dimension"));
        }
        let mut out = vec![0.0; self.dim];
        for (vi, qi) in v.iter().zip(qt) {
            if *vi != 0.0 {
                axpy(*vi, qi, &mut out);
            }
        }
        Ok(out)
    }

    fn apply_to_images(&mut self, rots: &[Givens]) {
        if rots.is_empty() {
            return;
        }
        let mut count = self.tracked.len() + self.detached.len();
        for t in self.tracked.iter_mut() {
            rots.iter().for_each(|g| g.apply(t));
        }
        for t in self.detached.values_mut() {
            rots.iter().for_each(|g| g.apply(t));
        }
        if let Some(q) = self.qt.as_mut() {
            count += q.len();
            for t in q.iter_mut() {
                rots.iter().for_each(|g| g.apply(t));
            }
        }
        self.flops += 6 * (rots.len() * count) as u64;
    }

    /// Removes a row of `A`, returning its image `Qᵀ a` in the updated coordinates.
    pub fn delete_row(&mut self, id: RowId) -> Result<Vec<f64>> {
        let pos = self
            .ids
            .iter()
            .position(|&r| r == id)
            .ok_or(Error::InvalidHandle(id.0))?;
        self.ids.remove(pos);
        let mut image = self.cols.remove(pos);
        let mut rots: Vec<Givens> = Vec::new();
        let k = self.cols.len();
        // Each column sees a serial chain of rotations; blocks of four
        // columns are rotated together so the chains overlap.
        for start in (pos..k).step_by(4) {
            let end = (start + 4).min(k);
            let before = rots.len();
            rotate_block(&rots, &mut self.cols[start..end]);
            for c in start..end {
                let col = &mut self.cols[c];
                for g in &rots[before..] {
                    g.apply(col);
                }
                self.flops += 6 * rots.len() as u64;
                if c + 1 < self.dim {
                    if let Some(g) = Givens::zeroing(c, col[c], col[c + 1]) {
                        g.apply(col);
                        col[c + 1] = 0.0;
                        rots.push(g);
                    }
                }
            }
        }
        rots.iter().for_each(|g| g.apply(&mut image));
        self.apply_to_images(&rots);
        if self.opts.retain_detached {
            self.detached.insert(id, image.clone());
        }
        Ok(image)
    }

    fn push_image(&mut self, id: RowId, mut image: Vec<f64>) {
        let k = self.cols.len();
        let mut rots = Vec::new();
        for r in (k + 1..self.dim).rev() {
            if let Some(g) = Givens::zeroing(r - 1, image[r - 1], image[r]) {
                g.apply(&mut image);
                image[r] = 0.0;
                rots.push(g);
            }
        }
        self.apply_to_images(&rots);
        self.cols.push(image);
        self.ids.push(id);
    }

    /// Re-inserts a previously deleted row (requires `retain_detached`).
    pub fn reinsert(&mut self, id: RowId) -> Result<()> {
        let image = self
            .detached
            .remove(&id)
            .ok_or(Error::InvalidHandle(id.0))?;
        self.push_image(id, image);
        Ok(())
    }

    /// Appends a new row to `A`. Needs an explicit `Q`.
    pub fn insert_row(&mut self, row: &[f64]) -> Result<RowId> {
        let image = self.rotate_in(row)?;
        let id = RowId(self.next_id);
        self.next_id += 1;
        self.flops += (2 * self.dim * self.dim) as u64;
        self.push_image(id, image);
        Ok(id)
    }

    fn backsub_ok(&self) -> bool {
        let k = self.cols.len();
        if k > self.dim {
            return false;
        }
        let (lo, hi) = (0..k).fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
            let d = self.cols[c][c].abs();
            (lo.min(d), hi.max(d))
        });
        k == 0 || lo > BACKSUB_GUARD * hi
    }

    fn top_cod(&mut self) -> Cod {
        let rows = self.dim.min(self.cols.len());
        let mut cols: Vec<Vec<f64>> = self.cols.iter().map(|c| c[..rows].to_vec()).collect();
        let cod = Cod::from_columns(rows, &mut cols);
        self.flops += Cod::flop_estimate(rows, self.cols.len(), cod.rank());
        cod
    }

    /// Minimum-norm solutions `w = R⁺ g` for each image `g`, so that `Aᵀ w`
    /// is the projection of the corresponding vector onto the row space of `A`.
    /// Entries of `w` follow the factor column order. Also returns the
    /// numerical rank of `A`.
    pub fn min_norm_solve(&mut self, images: &[&[f64]]) -> (Vec<Vec<f64>>, usize) {
        let k = self.cols.len();
        if k == 0 {
            return (vec![Vec::new(); images.len()], 0);
        }
        if self.backsub_ok() {
            self.flops += (images.len() * k * k) as u64;
            let w = images
                .iter()
                .map(|g| {
                    let mut w = g[..k].to_vec();
                    for c in (0..k).rev() {
                        w[c] /= self.cols[c][c];
                        let wc = w[c];
                        axpy(-wc, &self.cols[c][..c], &mut w[..c]);
                    }
                    w
                })
                .collect();
            (w, k)
        } else {
            let cod = self.top_cod();
            let rows = cod.n_rows();
            self.flops += (images.len() * rows * k) as u64;
            let w = images.iter().map(|g| cod.solve(&g[..rows])).collect();
            (w, cod.rank())
        }
    }

    /// `g - R w`: the image of the component orthogonal to the row space of `A`
    /// when `w = R⁺ g`.
    pub fn residual_image(&self, g: &[f64], w: &[f64]) -> Vec<f64> {
        let mut r = g.to_vec();
        for (c, &wc) in w.iter().enumerate() {
            let top = (c + 1).min(self.dim);
            axpy(-wc, &self.cols[c][..top], &mut r[..top]);
        }
        r
    }

    /// Numerical rank of `A`.
    pub fn rank(&mut self) -> usize {
        if self.backsub_ok() {
            self.cols.len()
        } else {
            let cod = self.top_cod();
            cod.rank()
        }
    }

    /// Smallest and largest absolute diagonal entries of `R` (square part).
    pub fn diag_range(&self) -> (f64, f64) {
        let k = self.cols.len().min(self.dim);
        (0..k).fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
            let d = self.cols[c][c].abs();
            (lo.min(d), hi.max(d))
        })
    }

    /// Rebuilds `A` (rows in factor order) from `Q` and `R`. Needs an explicit `Q`.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        let qt = self.qt.as_ref().ok_or(Error::Unsupported(
            "explicit Q was not kept for this factorization",
        ))?;
        let mut a = DenseMatrix::zeros(self.cols.len(), self.dim);
        for (r, col) in self.cols.iter().enumerate() {
            for i in 0..self.dim {
                // (Q R)[i][r] = sum_j Q[i][j] R[j][r], with Q[i][j] = qt[i][j]
                a[(r, i)] = qt[i].iter().zip(col).map(|(q, v)| q * v).sum();
            }
        }
        Ok(a)
    }

    /// Rank tolerance of the current triangular factor.
    pub fn tolerance(&self) -> f64 {
        let (_, hi) = self.diag_range();
        rank_tolerance(self.dim, self.cols.len(), hi)
    }
}
