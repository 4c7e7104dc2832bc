//! Degrees of freedom along the path and Ĉp model selection.

use crate::design::TransformedProblem;
use crate::error::{Error, Result};
use crate::numlin::{self, max_abs};
use crate::path::{eval_primal, BoundaryState, Event, SolutionPath};
use crate::penalty::{connected_components, Graph, PenaltyMatrix};

/// Unbiased degrees-of-freedom estimate `nullity(D₋B)`.
pub fn df_estimate(d: &PenaltyMatrix, state: &BoundaryState) -> Result<usize> {
    if state.coords.iter().any(|&c| c >= d.m()) {
        return Err(Error::invalid(
            "boundary state does not fit the penalty matrix",
        ));
    }
    Ok(numlin::nullity(
        &d.select_rows(&state.interior(d.m())).to_dense(),
    ))
}

/// Default fusion tolerance `1e-8 · (1 + ‖β‖∞)`.
pub fn fusion_tol(beta: &[f64]) -> f64 {
    1e-8 * (1.0 + max_abs(beta))
}

fn fused_labels(beta: &[f64], g: &Graph, tol: f64) -> Result<(Vec<usize>, usize)> {
    if beta.len() != g.n_nodes() {
        return Err(Error::dims(format!(
            "{} coefficients for {} nodes",
            beta.len(),
            g.n_nodes()
        )));
    }
    let mask: Vec<bool> = g
        .edges()
        .iter()
        .map(|&(i, j)| (beta[i] - beta[j]).abs() <= tol)
        .collect();
    connected_components(g, &mask)
}

/// Number of fused groups: components joined by edges with `|β_i − β_j| ≤ tol`.
pub fn fused_group_count(beta: &[f64], g: &Graph, tol: f64) -> Result<usize> {
    Ok(fused_labels(beta, g, tol)?.1)
}

/// Fused groups whose common value is nonzero (beyond `tol`).
pub fn nonzero_fused_group_count(beta: &[f64], g: &Graph, tol: f64) -> Result<usize> {
    let (labels, count) = fused_labels(beta, g, tol)?;
    let mut nonzero = vec![false; count];
    for (&l, &b) in labels.iter().zip(beta) {
        if b.abs() > tol {
            nonzero[l] = true;
        }
    }
    Ok(nonzero.iter().filter(|&&z| z).count())
}

/// One line of the diagnostics table. Knot rows carry the degrees of
/// freedom of the segment just above the knot; the final row (no event)
/// covers the last segment at the lowest computed `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagRow {
    pub k: usize,
    pub lambda: f64,
    pub event: Option<Event>,
    pub df: usize,
    pub rss: f64,
    pub cp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathDiagnostics {
    pub rows: Vec<DiagRow>,
    pub sigma2: Option<f64>,
}

/// `Ĉp = rss − nσ² + 2σ² df`.
pub fn cp_hat(rss: f64, n: usize, sigma2: f64, df: usize) -> f64 {
    rss - n as f64 * sigma2 + 2.0 * sigma2 * df as f64
}

fn diagnostics(
    path: &SolutionPath,
    y: &[f64],
    sigma2: Option<f64>,
    offset: usize,
    fit: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<PathDiagnostics> {
    if let Some(s) = sigma2 {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid("sigma2 must be positive"));
        }
    }
    let rss = |lambda: f64| -> Result<f64> {
        let f = fit(lambda)?;
        Ok(y.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum())
    };
    let mut rows = Vec::with_capacity(path.knots.len() + 1);
    let mut push = |lambda: f64, event: Option<Event>, nullity: usize| -> Result<()> {
        let df = nullity - offset;
        let rss = rss(lambda)?;
        rows.push(DiagRow {
            k: rows.len() + 1,
            lambda,
            event,
            df,
            rss,
            cp: sigma2.map(|s| cp_hat(rss, y.len(), s, df)),
        });
        Ok(())
    };
    for knot in &path.knots {
        push(knot.lambda, Some(knot.event), knot.nullity_above)?;
    }
    if let Some(last) = path.segments.last() {
        push(last.lambda_lo, None, last.nullity)?;
    }
    Ok(PathDiagnostics { rows, sigma2 })
}

/// Diagnostics for the identity design.
pub fn cp_path(
    y: &[f64],
    d: &PenaltyMatrix,
    path: &SolutionPath,
    sigma2: Option<f64>,
) -> Result<PathDiagnostics> {
    diagnostics(path, y, sigma2, 0, |lam| eval_primal(path, lam, y, d))
}

/// Diagnostics for a general full-rank design.
pub fn cp_path_design(
    y: &[f64],
    tp: &TransformedProblem,
    path: &SolutionPath,
    sigma2: Option<f64>,
) -> Result<PathDiagnostics> {
    diagnostics(path, y, sigma2, tp.nullity_offset(), |lam| {
        Ok(tp.primal_from_dual_vector(&path.eval_dual(lam)?)?.1)
    })
}

/// The `λ` minimizing Ĉp over the rows, preferring the smallest `λ` on ties.
pub fn select_lambda(diag: &PathDiagnostics) -> Option<f64> {
    diag.rows
        .iter()
        .filter_map(|r| r.cp.map(|c| (r.lambda, c)))
        .fold(None, |best: Option<(f64, f64)>, (lam, c)| match best {
            Some((bl, bc)) if bc < c || (bc == c && bl < lam) => Some((bl, bc)),
            _ => Some((lam, c)),
        })
        .map(|(lam, _)| lam)
}
