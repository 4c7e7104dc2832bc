//! The dual path algorithm and the pieces it is built from.
//!
//! The dual of the generalized lasso is `min ½‖y − Dᵀu‖²` over `‖u‖∞ ≤ λ`.
//! Its solution is piecewise linear in `λ`: on each segment the boundary
//! coordinates sit at `λ s` and the interior ones follow `a − λ b`.

mod kkt;
mod solver;

pub use kkt::{check_kkt, KktReport};
pub use solver::solve_dual_path;

use crate::error::{Error, Result};
use crate::numlin::{self, dot, DenseMatrix};
use crate::penalty::PenaltyMatrix;

/// Coordinates of `u` currently held at `±λ`, in the order they arrived.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundaryState {
    pub coords: Vec<usize>,
    pub signs: Vec<i8>,
}

impl BoundaryState {
    pub fn new(coords: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if coords.len() != signs.len() {
            return Err(Error::dims(
                "boundary coordinates and signs differ in length",
            ));
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::invalid("boundary signs must be +1 or -1"));
        }
        let mut seen = coords.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("boundary coordinates repeat"));
        }
        Ok(BoundaryState { coords, signs })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn contains(&self, coord: usize) -> bool {
        self.coords.contains(&coord)
    }

    pub fn sign_of(&self, coord: usize) -> Option<i8> {
        self.coords
            .iter()
            .position(|&c| c == coord)
            .map(|k| self.signs[k])
    }

    fn push(&mut self, coord: usize, sign: i8) {
        self.coords.push(coord);
        self.signs.push(sign);
    }

    fn remove(&mut self, coord: usize) -> Option<i8> {
        let k = self.coords.iter().position(|&c| c == coord)?;
        self.coords.remove(k);
        Some(self.signs.remove(k))
    }

    /// Complement of the boundary within `0..m`, ascending.
    pub fn interior(&self, m: usize) -> Vec<usize> {
        let mut on = vec![false; m];
        self.coords.iter().for_each(|&c| on[c] = true);
        (0..m).filter(|&i| !on[i]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Hit { coord: usize, sign: i8 },
    Leave { coord: usize, sign: i8 },
}

impl Event {
    pub fn coord(&self) -> usize {
        match *self {
            Event::Hit { coord, .. } | Event::Leave { coord, .. } => coord,
        }
    }

    pub fn sign(&self) -> i8 {
        match *self {
            Event::Hit { sign, .. } | Event::Leave { sign, .. } => sign,
        }
    }

    pub fn is_leave(&self) -> bool {
        matches!(self, Event::Leave { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Event::Hit { .. } => "hit",
            Event::Leave { .. } => "leave",
        }
    }
}

/// A change of the boundary set at `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub lambda: f64,
    pub event: Event,
    /// `nullity(D_{−B})` just above and just below the knot.
    pub nullity_above: usize,
    pub nullity_below: usize,
}

/// One linear piece of the dual path, valid on `[lambda_lo, lambda_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub lambda_hi: f64,
    pub lambda_lo: f64,
    pub boundary: BoundaryState,
    /// Interior coordinates (ascending) with `u = a − λ b` on them.
    pub interior: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub nullity: usize,
}

impl PathSegment {
    pub fn dual_at(&self, lambda: f64, m: usize) -> Vec<f64> {
        let mut u = vec![0.0; m];
        for (&c, &s) in self.boundary.coords.iter().zip(&self.boundary.signs) {
            u[c] = lambda * f64::from(s);
        }
        for ((&c, &a), &b) in self.interior.iter().zip(&self.a).zip(&self.b) {
            u[c] = a - lambda * b;
        }
        u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedZero,
    MaxSteps,
    LambdaFloor,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ReachedZero => "reached_zero",
            Termination::MaxSteps => "max_steps",
            Termination::LambdaFloor => "lambda_floor",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathStats {
    pub steps: usize,
    pub hits: usize,
    pub leaves: usize,
    /// Deterministic operation count of the factor updates and solves.
    pub flops: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPath {
    pub m: usize,
    pub n: usize,
    pub segments: Vec<PathSegment>,
    pub knots: Vec<Knot>,
    pub termination: Termination,
    pub stats: PathStats,
}

impl SolutionPath {
    /// Smallest `λ` covered by the path.
    pub fn lowest_lambda(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.lambda_lo)
    }

    /// The segment containing `lambda`; at a knot, the one above it.
    pub fn segment_at(&self, lambda: f64) -> Result<&PathSegment> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::invalid(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        let k = self.segments.partition_point(|s| s.lambda_lo > lambda);
        self.segments.get(k).ok_or(Error::OutOfRange {
            lambda,
            lowest: self.lowest_lambda(),
        })
    }

    pub fn eval_dual(&self, lambda: f64) -> Result<Vec<f64>> {
        if lambda.is_infinite() {
            return Err(Error::invalid("lambda must be finite"));
        }
        Ok(self.segment_at(lambda)?.dual_at(lambda, self.m))
    }

    /// `nullity(D_{−B})` on the segment containing `lambda`.
    pub fn nullity_at(&self, lambda: f64) -> Result<usize> {
        Ok(self.segment_at(lambda)?.nullity)
    }

    pub fn leave_count(&self) -> usize {
        self.knots.iter().filter(|k| k.event.is_leave()).count()
    }
}

/// Dual solution `u(λ)`.
pub fn eval_dual(path: &SolutionPath, lambda: f64) -> Result<Vec<f64>> {
    path.eval_dual(lambda)
}

/// Primal solution `β(λ) = y − Dᵀ u(λ)`.
pub fn eval_primal(
    path: &SolutionPath,
    lambda: f64,
    y: &[f64],
    d: &PenaltyMatrix,
) -> Result<Vec<f64>> {
    if y.len() != d.p() || d.m() != path.m {
        return Err(Error::dims("response or penalty does not match the path"));
    }
    let u = path.eval_dual(lambda)?;
    let dtu = d.apply_t(&u)?;
    Ok(y.iter().zip(&dtu).map(|(a, b)| a - b).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryLemma {
    /// Skip leaving times exactly when `DDᵀ` is diagonally dominant.
    #[default]
    Auto,
    /// Always skip leaving times.
    On,
    /// Always compute leaving times.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    /// Defaults to `10 m + 1000`.
    pub max_steps: Option<usize>,
    pub lambda_floor: f64,
    /// Relative threshold below which leaving-time numerators and
    /// denominators are treated as nonnegative.
    pub boundary_tol: f64,
    /// Relative slack for accepting events at the current knot.
    pub tie_tol: f64,
    /// Never let coordinates leave the boundary.
    pub approximate: bool,
    pub boundary_lemma: BoundaryLemma,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            max_steps: None,
            lambda_floor: 0.0,
            boundary_tol: 1e-11,
            tie_tol: 1e-10,
            approximate: false,
            boundary_lemma: BoundaryLemma::Auto,
        }
    }
}

impl PathOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.lambda_floor >= 0.0 && self.lambda_floor.is_finite()) {
            return Err(Error::invalid(
                "lambda floor must be finite and nonnegative",
            ));
        }
        if !(self.boundary_tol > 0.0 && self.tie_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Hitting time of one interior coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitTime {
    pub t: f64,
    /// Side of the box that is reached, if any.
    pub sign: Option<i8>,
}

/// The time `t = a / (b + σ)` at which `a − λ b` reaches `σ λ` while
/// decreasing `λ` from `lambda_k`. A candidate counts only when it lies in
/// `(0, λ_k]` (up to `tie_tol`) and the coordinate approaches the box from
/// inside, `1 + σ b > 0`. When both sides qualify the later one (larger `t`)
/// wins.
pub(crate) fn hit_time(a: f64, b: f64, lambda_k: f64, tie_tol: f64) -> Option<(f64, i8)> {
    let limit = lambda_k * (1.0 + tie_tol);
    let mut best: Option<(f64, i8)> = None;
    for sign in [1i8, -1] {
        let s = f64::from(sign);
        let den = b + s;
        if den == 0.0 || 1.0 + s * b <= 0.0 {
            continue;
        }
        let t = a / den;
        if t > 0.0 && t <= limit && best.is_none_or(|(bt, _)| t > bt) {
            best = Some((t.min(lambda_k), sign));
        }
    }
    best
}

/// `t = c / d` when both are negative beyond their guards, capped at `λ_k`.
pub(crate) fn leave_time(c: f64, d: f64, c_guard: f64, d_guard: f64, lambda_k: f64) -> Option<f64> {
    (c < -c_guard && d < -d_guard).then(|| (c / d).min(lambda_k))
}

/// Interior least-squares coefficients for a boundary state:
/// `a = (D₋B D₋Bᵀ)⁺ D₋B y` and `b = (D₋B D₋Bᵀ)⁺ D₋B D_Bᵀ s`, indexed by the
/// interior coordinates in ascending order.
pub fn interior_ls(
    y: &[f64],
    d: &PenaltyMatrix,
    state: &BoundaryState,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_state(y, d, state)?;
    let interior = state.interior(d.m());
    let at = d.select_rows(&interior).to_dense().transpose();
    let dbs = boundary_direction(d, state)?;
    Ok((
        numlin::min_norm_ls(&at, y)?,
        numlin::min_norm_ls(&at, &dbs)?,
    ))
}

fn check_state(y: &[f64], d: &PenaltyMatrix, state: &BoundaryState) -> Result<()> {
    if y.len() != d.p() {
        return Err(Error::dims(format!(
            "response of length {} for {} columns",
            y.len(),
            d.p()
        )));
    }
    if state.coords.iter().any(|&c| c >= d.m()) || state.coords.len() != state.signs.len() {
        return Err(Error::invalid(
            "boundary state does not fit the penalty matrix",
        ));
    }
    Ok(())
}

/// `D_Bᵀ s`
fn boundary_direction(d: &PenaltyMatrix, state: &BoundaryState) -> Result<Vec<f64>> {
    let mut s = vec![0.0; d.m()];
    for (&c, &sg) in state.coords.iter().zip(&state.signs) {
        s[c] = f64::from(sg);
    }
    d.apply_t(&s)
}

/// Hitting times for every interior coordinate; zero where no side is reached.
pub fn hitting_times(a: &[f64], b: &[f64], lambda_k: f64) -> Result<Vec<HitTime>> {
    if a.len() != b.len() {
        return Err(Error::dims("a and b differ in length"));
    }
    let tie = PathOptions::default().tie_tol;
    Ok(a.iter()
        .zip(b)
        .map(|(&a, &b)| match hit_time(a, b, lambda_k, tie) {
            Some((t, s)) => HitTime { t, sign: Some(s) },
            None => HitTime { t: 0.0, sign: None },
        })
        .collect())
}

/// Leaving times for the boundary coordinates (in boundary order).
pub fn leaving_times(
    y: &[f64],
    d: &PenaltyMatrix,
    state: &BoundaryState,
    lambda_k: f64,
) -> Result<Vec<f64>> {
    check_state(y, d, state)?;
    if state.is_empty() {
        return Ok(Vec::new());
    }
    let interior = d.select_rows(&state.interior(d.m())).to_dense();
    let dbs = boundary_direction(d, state)?;
    let ry = numlin::project_null_space(&interior, y)?;
    let rb = numlin::project_null_space(&interior, &dbs)?;
    let tol = PathOptions::default().boundary_tol;
    let (ny, nb) = (numlin::norm2(y), numlin::norm2(&dbs));
    Ok(state
        .coords
        .iter()
        .zip(&state.signs)
        .map(|(&c, &s)| {
            let row = d.row_dense(c);
            let (s, nr) = (f64::from(s), numlin::norm2(&row));
            let (ci, di) = (s * dot(&row, &ry), s * dot(&row, &rb));
            leave_time(ci, di, tol * nr * ny, tol * nr * nb, lambda_k).unwrap_or(0.0)
        })
        .collect())
}

/// A candidate event for [`step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub coord: usize,
    pub sign: i8,
    pub lambda: f64,
}

/// Applies the next event: the hit when it comes strictly first, otherwise
/// the leave. Returns `None` when there is no candidate at a positive `λ`.
pub fn step(
    state: &BoundaryState,
    hit: Option<Candidate>,
    leave: Option<Candidate>,
) -> Option<(BoundaryState, f64, Event)> {
    let h = hit.filter(|c| c.lambda > 0.0);
    let l = leave.filter(|c| c.lambda > 0.0);
    let take_hit = match (h, l) {
        (Some(h), Some(l)) => h.lambda > l.lambda,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => return None,
    };
    let mut next = state.clone();
    if take_hit {
        let h = h?;
        next.push(h.coord, h.sign);
        Some((
            next,
            h.lambda,
            Event::Hit {
                coord: h.coord,
                sign: h.sign,
            },
        ))
    } else {
        let l = l?;
        let sign = next.remove(l.coord)?;
        Some((
            next,
            l.lambda,
            Event::Leave {
                coord: l.coord,
                sign,
            },
        ))
    }
}

/// True when `DDᵀ` is (weakly) diagonally dominant in every row.
pub fn is_diagonally_dominant(d: &PenaltyMatrix) -> bool {
    let m = d.m();
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d.p()];
    for (i, row) in d.rows().iter().enumerate() {
        for &(j, v) in row {
            by_col[j].push((i, v));
        }
    }
    let mut acc = vec![0.0; m];
    let mut touched = Vec::new();
    for (i, row) in d.rows().iter().enumerate() {
        for &(j, v) in row {
            for &(k, w) in &by_col[j] {
                if acc[k] == 0.0 {
                    touched.push(k);
                }
                acc[k] += v * w;
            }
        }
        let diag = acc[i];
        let off: f64 = touched
            .iter()
            .filter(|&&k| k != i)
            .map(|&k| acc[k].abs())
            .sum();
        for &k in &touched {
            acc[k] = 0.0;
        }
        touched.clear();
        if diag < off {
            return false;
        }
    }
    true
}

/// `(DDᵀ)_ii` and `Σ_{j≠i} |(DDᵀ)_ij|` for one row.
pub fn dominance_sides(d: &PenaltyMatrix, i: usize) -> (f64, f64) {
    let gram = d
        .to_dense()
        .matmul(&d.to_dense().transpose())
        .expect("square product");
    let diag = gram[(i, i)];
    let off = (0..d.m())
        .filter(|&j| j != i)
        .map(|j| gram[(i, j)].abs())
        .sum();
    (diag, off)
}

/// `P_null(D₋B)(y − λ D_Bᵀ s)`, the primal solution written through the boundary state.
pub fn primal_from_state(
    y: &[f64],
    d: &PenaltyMatrix,
    state: &BoundaryState,
    lambda: f64,
) -> Result<Vec<f64>> {
    check_state(y, d, state)?;
    let dbs = boundary_direction(d, state)?;
    let v: Vec<f64> = y.iter().zip(&dbs).map(|(a, b)| a - lambda * b).collect();
    let interior: DenseMatrix = d.select_rows(&state.interior(d.m())).to_dense();
    numlin::project_null_space(&interior, &v)
}
