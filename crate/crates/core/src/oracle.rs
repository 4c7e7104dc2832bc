//! Fixed-`λ` reference solvers for the dual box-constrained problem.
//!
//! These are deliberately simple and share nothing with the path solver
//! beyond the penalty representation, so they can serve as ground truth.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::design::TransformedProblem;
use crate::error::{Error, Result};
use crate::numlin::{max_abs, DenseMatrix};
use crate::penalty::PenaltyMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Stop once no coordinate moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Shuffle the sweep order with this seed; cyclic order when `None`.
    pub seed: Option<u64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            tol: 1e-10,
            max_sweeps: 100_000,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub u: Vec<f64>,
    pub sweeps: usize,
    /// `½‖y − Dᵀu‖²` at the returned point.
    pub objective: f64,
}

fn validate(y: &[f64], d: &PenaltyMatrix, lambda: f64, opts: &OracleOptions) -> Result<()> {
    if y.len() != d.p() {
        return Err(Error::dims(format!(
            "response of length {} for {} columns",
            y.len(),
            d.p()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be finite and nonnegative"));
    }
    if opts.tol <= 0.0 {
        return Err(Error::invalid("oracle tolerance must be positive"));
    }
    Ok(())
}

fn objective(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Coordinate descent on `min ½‖y − Dᵀu‖²` subject to `‖u‖∞ ≤ λ`.
pub fn solve_dual_fixed(
    y: &[f64],
    d: &PenaltyMatrix,
    lambda: f64,
    opts: &OracleOptions,
) -> Result<OracleSolution> {
    validate(y, d, lambda, opts)?;
    let m = d.m();
    let sq: Vec<f64> = d
        .rows()
        .iter()
        .map(|r| r.iter().map(|(_, v)| v * v).sum())
        .collect();
    let mut order: Vec<usize> = (0..m).filter(|&i| sq[i] > 0.0).collect();
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let mut u = vec![0.0; m];
    let mut r = y.to_vec();
    let mut last_change = f64::INFINITY;
    for sweep in 1..=opts.max_sweeps {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut change = 0.0f64;
        for &i in &order {
            let row = d.row(i);
            let grad: f64 = row.iter().map(|&(j, v)| v * r[j]).sum();
            let new = (u[i] + grad / sq[i]).clamp(-lambda, lambda);
            let delta = new - u[i];
            if delta != 0.0 {
                for &(j, v) in row {
                    r[j] -= delta * v;
                }
                u[i] = new;
                change = change.max(delta.abs());
            }
        }
        last_change = change;
        if change <= opts.tol {
            return Ok(OracleSolution {
                objective: objective(&r),
                u,
                sweeps: sweep,
            });
        }
    }
    Err(Error::NotConverged {
        sweeps: opts.max_sweeps,
        last_change,
    })
}

/// Accelerated projected gradient on the same problem; slower to reach high
/// accuracy but insensitive to coordinate coupling.
pub fn solve_dual_projected(
    y: &[f64],
    d: &PenaltyMatrix,
    lambda: f64,
    opts: &OracleOptions,
) -> Result<OracleSolution> {
    validate(y, d, lambda, opts)?;
    let m = d.m();
    // Gershgorin bound on the largest eigenvalue of DDᵀ
    let gram = d.to_dense().matmul(&d.to_dense().transpose())?;
    let lip = (0..m)
        .map(|i| gram.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    if lip == 0.0 {
        return Ok(OracleSolution {
            u: vec![0.0; m],
            sweeps: 0,
            objective: objective(y),
        });
    }
    let residual = |u: &[f64]| -> Result<Vec<f64>> {
        let dtu = d.apply_t(u)?;
        Ok(y.iter().zip(&dtu).map(|(a, b)| a - b).collect())
    };
    let mut u = vec![0.0; m];
    let mut z = u.clone();
    let mut t = 1.0f64;
    let mut last_change = f64::INFINITY;
    for it in 1..=opts.max_sweeps {
        let g = d.apply(&residual(&z)?)?;
        let next: Vec<f64> = z
            .iter()
            .zip(&g)
            .map(|(zi, gi)| (zi + gi / lip).clamp(-lambda, lambda))
            .collect();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = (t - 1.0) / t_next;
        let diff: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        z = next
            .iter()
            .zip(&diff)
            .map(|(a, dlt)| a + mom * dlt)
            .collect();
        u = next;
        t = t_next;
        last_change = max_abs(&diff);
        if last_change <= opts.tol {
            let r = residual(&u)?;
            return Ok(OracleSolution {
                objective: objective(&r),
                u,
                sweeps: it,
            });
        }
    }
    Err(Error::NotConverged {
        sweeps: opts.max_sweeps,
        last_change,
    })
}

/// Coordinate descent, falling back to projected gradient if it stalls.
pub fn solve_dual(
    y: &[f64],
    d: &PenaltyMatrix,
    lambda: f64,
    opts: &OracleOptions,
) -> Result<OracleSolution> {
    match solve_dual_fixed(y, d, lambda, opts) {
        Err(Error::NotConverged { .. }) => solve_dual_projected(y, d, lambda, opts),
        other => other,
    }
}

/// Primal solution `y − Dᵀu` from the oracle dual.
pub fn primal_fixed(
    y: &[f64],
    d: &PenaltyMatrix,
    lambda: f64,
    opts: &OracleOptions,
) -> Result<Vec<f64>> {
    let sol = solve_dual(y, d, lambda, opts)?;
    let dtu = d.apply_t(&sol.u)?;
    Ok(y.iter().zip(&dtu).map(|(a, b)| a - b).collect())
}

/// Coefficients and fit for a full-rank design, solved on the transformed problem.
pub fn primal_fixed_design(
    y: &[f64],
    x: &DenseMatrix,
    d: &PenaltyMatrix,
    lambda: f64,
    opts: &OracleOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let tp = TransformedProblem::new(y, x, d)?;
    if !tp.rank_ok {
        return Err(Error::RankDeficientDesign {
            rank: tp.rank,
            cols: x.n_cols(),
        });
    }
    let sol = solve_dual(&tp.y_tilde, &tp.d_tilde, lambda, opts)?;
    tp.primal_from_dual_vector(&sol.u)
}
