//! General design matrices. For `min ½‖y − Xβ‖² + λ‖Dβ‖₁` with `rank(X) = p`
//! the dual is the identity-design dual for `ỹ = XX⁺y` and `D̃ = DX⁺`; the fit
//! is `ỹ − D̃ᵀu` and `β = X⁺ · fit`.

use crate::error::{Error, Result};
use crate::numlin::{self, Cod, DenseMatrix};
use crate::path::{solve_dual_path, PathOptions, SolutionPath};
use crate::penalty::PenaltyMatrix;

/// Condition estimates above this trigger a ridge recommendation.
const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct TransformedProblem {
    pub y_tilde: Vec<f64>,
    pub d_tilde: PenaltyMatrix,
    /// `X⁺`, `p x n`.
    pub x_pinv: DenseMatrix,
    pub rank: usize,
    pub rank_ok: bool,
    pub condition: f64,
    pub warnings: Vec<String>,
}

impl TransformedProblem {
    pub fn new(y: &[f64], x: &DenseMatrix, d: &PenaltyMatrix) -> Result<Self> {
        let (n, p) = (x.n_rows(), x.n_cols());
        if y.len() != n {
            return Err(Error::dims(format!(
                "response of length {} for a design with {n} rows",
                y.len()
            )));
        }
        if d.p() != p {
            return Err(Error::dims(format!(
                "penalty has {} columns, design has {p}",
                d.p()
            )));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("design matrix"));
        }
        let cod = Cod::new(x);
        let rank = cod.rank();
        let condition = cod.condition_estimate();
        let y_tilde = cod.project_range(y);
        let x_pinv = numlin::pinv(x);
        let mut dt = DenseMatrix::zeros(d.m(), n);
        for (i, row) in d.rows().iter().enumerate() {
            for &(j, v) in row {
                crate::numlin::axpy(v, x_pinv.row(j), dt.row_mut(i));
            }
        }
        let mut warnings = Vec::new();
        if rank == p && condition > CONDITION_WARNING {
            warnings.push(format!(
                "design is poorly conditioned (estimate {condition:.3e}); consider ridge augmentation"
            ));
        }
        Ok(TransformedProblem {
            y_tilde,
            d_tilde: PenaltyMatrix::from_dense(&dt)?,
            x_pinv,
            rank,
            rank_ok: rank == p,
            condition,
            warnings,
        })
    }

    pub fn n(&self) -> usize {
        self.x_pinv.n_cols()
    }

    pub fn p(&self) -> usize {
        self.x_pinv.n_rows()
    }

    /// `nullity(D̃₋B) − nullity(D₋B) = n − p` for a full-rank design.
    pub fn nullity_offset(&self) -> usize {
        self.n() - self.p()
    }

    /// `(β, fit)` for a dual vector of the transformed problem.
    pub fn primal_from_dual_vector(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let dtu = self.d_tilde.apply_t(u)?;
        let fit: Vec<f64> = self.y_tilde.iter().zip(&dtu).map(|(a, b)| a - b).collect();
        let beta = self.x_pinv.matvec(&fit)?;
        Ok((beta, fit))
    }
}

pub fn transform_problem(
    y: &[f64],
    x: &DenseMatrix,
    d: &PenaltyMatrix,
) -> Result<TransformedProblem> {
    TransformedProblem::new(y, x, d)
}

/// Dual path for a general full-rank design.
pub fn solve_path_design(
    y: &[f64],
    x: &DenseMatrix,
    d: &PenaltyMatrix,
    opts: &PathOptions,
) -> Result<(TransformedProblem, SolutionPath)> {
    let tp = TransformedProblem::new(y, x, d)?;
    if !tp.rank_ok {
        return Err(Error::RankDeficientDesign {
            rank: tp.rank,
            cols: x.n_cols(),
        });
    }
    let path = solve_dual_path(&tp.y_tilde, &tp.d_tilde, opts)?;
    Ok((tp, path))
}

/// `(β(λ), Xβ(λ))` along a path from [`solve_path_design`].
pub fn primal_from_dual(
    tp: &TransformedProblem,
    path: &SolutionPath,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !tp.rank_ok {
        return Err(Error::RankDeficientDesign {
            rank: tp.rank,
            cols: tp.p(),
        });
    }
    tp.primal_from_dual_vector(&path.eval_dual(lambda)?)
}

/// `y* = (y, 0)` and `X* = [X; εI]`, which always has full column rank.
pub fn ridge_augment(y: &[f64], x: &DenseMatrix, epsilon: f64) -> Result<(Vec<f64>, DenseMatrix)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("ridge epsilon must be positive"));
    }
    if y.len() != x.n_rows() {
        return Err(Error::dims("response and design row count differ"));
    }
    let p = x.n_cols();
    let mut eye = DenseMatrix::identity(p);
    eye.scale(epsilon);
    let mut ys = y.to_vec();
    ys.resize(y.len() + p, 0.0);
    Ok((ys, x.vstack(&eye)?))
}

/// `1e-4` times the largest column norm of `X` (or `1e-4` for a zero matrix).
pub fn default_ridge_epsilon(x: &DenseMatrix) -> f64 {
    let largest = (0..x.n_cols())
        .map(|j| numlin::norm2(&x.col(j)))
        .fold(0.0f64, f64::max);
    1e-4 * if largest > 0.0 { largest } else { 1.0 }
}
