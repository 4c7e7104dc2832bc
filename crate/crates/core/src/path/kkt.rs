use crate::error::{Error, Result};
use crate::numlin::max_abs;
use crate::penalty::PenaltyMatrix;

/// Violations of the optimality conditions of the dual at one `λ`.
///
/// With `r = D(y − Dᵀu)`, stationarity asks for `r = αγ` where `α ≥ 0` and
/// `γ` is a subgradient of `‖·‖∞` at `u`: supported on the coordinates where
/// `|u_i| = λ`, with the sign of `u_i` there.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KktReport {
    /// Largest `|r_i|` off the boundary.
    pub stationarity_residual: f64,
    /// `max(0, ‖u‖∞ − λ)`.
    pub box_violation: f64,
    /// `α · (λ − ‖u‖∞)` for the best admissible `α`.
    pub complementary_slackness_gap: f64,
    /// Largest `|r_i|` on the boundary whose sign disagrees with `u_i`.
    pub subgradient_norm_excess: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.stationarity_residual
            .max(self.box_violation)
            .max(self.complementary_slackness_gap)
            .max(self.subgradient_norm_excess)
    }
}

/// Certifies `u` as a dual solution at `lambda`. Coordinates with
/// `|u_i| ≥ λ − tol` count as boundary.
pub fn check_kkt(
    y: &[f64],
    d: &PenaltyMatrix,
    lambda: f64,
    u: &[f64],
    tol: f64,
) -> Result<KktReport> {
    if y.len() != d.p() || u.len() != d.m() {
        return Err(Error::dims(
            "response, penalty and dual vector do not agree",
        ));
    }
    let dtu = d.apply_t(u)?;
    let beta: Vec<f64> = y.iter().zip(&dtu).map(|(a, b)| a - b).collect();
    let r = d.apply(&beta)?;
    let umax = max_abs(u);
    let mut rep = KktReport {
        box_violation: (umax - lambda).max(0.0),
        ..Default::default()
    };
    let mut alpha = 0.0;
    for (&ui, &ri) in u.iter().zip(&r) {
        if ui != 0.0 && ui.abs() >= lambda - tol {
            if ri * ui >= 0.0 {
                alpha += ri.abs();
            } else {
                rep.subgradient_norm_excess = rep.subgradient_norm_excess.max(ri.abs());
            }
        } else {
            rep.stationarity_residual = rep.stationarity_residual.max(ri.abs());
        }
    }
    rep.complementary_slackness_gap = alpha * (lambda - umax).max(0.0);
    Ok(rep)
}
