use super::{
    hit_time, is_diagonally_dominant, leave_time, BoundaryLemma, BoundaryState, Event, Knot,
    PathOptions, PathSegment, PathStats, SolutionPath, Termination,
};
use crate::error::{Error, Result};
use crate::numlin::{axpy, dot, norm2, QrOptions, RowId, UpdatableQr};
use crate::penalty::PenaltyMatrix;

const Y: usize = 0;
const DBS: usize = 1;

#[derive(Clone, Copy)]
struct Best {
    t: f64,
    coord: usize,
    sign: i8,
}

fn improve(best: &mut Option<Best>, cand: Best) {
    let better = match best {
        None => true,
        Some(b) => cand.t > b.t || (cand.t == b.t && cand.coord < b.coord),
    };
    if better {
        *best = Some(cand);
    }
}

/// Computes the full dual solution path for `min ½‖y − β‖² + λ‖Dβ‖₁`.
///
/// Starting from the unconstrained least-squares dual at `λ = ∞`, the
/// boundary set is grown (and, unless the boundary lemma applies, shrunk) one
/// coordinate at a time while `λ` decreases. Factor updates keep each step
/// at the cost of a rank-one change.
pub fn solve_dual_path(y: &[f64], d: &PenaltyMatrix, opts: &PathOptions) -> Result<SolutionPath> {
    opts.validate()?;
    let (n, m) = (d.p(), d.m());
    if y.len() != n {
        return Err(Error::dims(format!(
            "response of length {} for a penalty with {n} columns",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response"));
    }

    let need_leave = !opts.approximate
        && match opts.boundary_lemma {
            BoundaryLemma::Auto => !is_diagonally_dominant(d),
            BoundaryLemma::On => false,
            BoundaryLemma::Off => true,
        };

    // Zero rows of D never reach the boundary; their dual coordinate stays 0.
    let nz: Vec<usize> = (0..m).filter(|&i| !d.is_zero_row(i)).collect();
    let rows: Vec<Vec<f64>> = nz.iter().map(|&i| d.row_dense(i)).collect();
    let mut qr = UpdatableQr::new(
        n,
        &rows,
        &[y.to_vec(), vec![0.0; n]],
        QrOptions {
            keep_q: false,
            retain_detached: need_leave,
        },
    )?;
    let mut slot: Vec<Option<RowId>> = vec![None; m];
    for (&id, &i) in qr.ids().iter().zip(&nz) {
        slot[i] = Some(id);
    }
    let coord_of = |id: RowId| nz[id.index()];
    let row_norm: Vec<f64> = (0..m).map(|i| norm2(&d.row_dense(i))).collect();
    let y_norm = norm2(y);

    let max_steps = opts.max_steps.unwrap_or(10 * m + 1000);
    let mut boundary = BoundaryState::default();
    let mut segments: Vec<PathSegment> = Vec::new();
    let mut knots: Vec<Knot> = Vec::new();
    let mut stats = PathStats::default();
    let mut extra_flops = 0u64;
    let mut lambda_k = f64::INFINITY;
    // Coordinates that changed status at the current knot; they may not
    // immediately undo that change at the same lambda.
    let mut fresh: Vec<usize> = Vec::new();

    let termination = loop {
        let gy = qr.tracked(Y).to_vec();
        let gb = qr.tracked(DBS).to_vec();
        let (w, rank) = qr.min_norm_solve(&[&gy, &gb]);
        let (a, b) = (&w[0], &w[1]);
        let nullity = n - rank;
        if let Some(k) = knots.last_mut() {
            k.nullity_below = nullity;
        }
        let ids = qr.ids().to_vec();

        let mut best_hit: Option<Best> = None;
        for (j, &id) in ids.iter().enumerate() {
            let coord = coord_of(id);
            if let Some((t, sign)) = hit_time(a[j], b[j], lambda_k, opts.tie_tol) {
                if fresh.contains(&coord) && t >= lambda_k * (1.0 - opts.tie_tol) {
                    continue;
                }
                improve(&mut best_hit, Best { t, coord, sign });
            }
        }

        let mut best_leave: Option<Best> = None;
        if need_leave && !boundary.is_empty() {
            let hy = qr.residual_image(&gy, a);
            let hb = qr.residual_image(&gb, b);
            let gb_norm = norm2(&gb);
            for (&coord, &sign) in boundary.coords.iter().zip(&boundary.signs) {
                let id = slot[coord].expect("boundary rows are nonzero");
                let v = qr.detached_image(id).expect("boundary images are retained");
                let s = f64::from(sign);
                let (c, dd) = (s * dot(v, &hy), s * dot(v, &hb));
                let tol = opts.boundary_tol * row_norm[coord];
                if let Some(t) = leave_time(c, dd, tol * y_norm, tol * gb_norm, lambda_k) {
                    if fresh.contains(&coord) && t >= lambda_k * (1.0 - opts.tie_tol) {
                        continue;
                    }
                    improve(&mut best_leave, Best { t, coord, sign });
                }
            }
            extra_flops += (4 * n * (ids.len() + boundary.len())) as u64;
        }

        let h = best_hit.map_or(0.0, |c| c.t);
        let l = best_leave.map_or(0.0, |c| c.t);
        let next = h.max(l);

        let mut push_segment = |lo: f64| {
            if lambda_k > lo {
                let mut order: Vec<usize> = (0..ids.len()).collect();
                order.sort_by_key(|&j| coord_of(ids[j]));
                segments.push(PathSegment {
                    lambda_hi: lambda_k,
                    lambda_lo: lo,
                    boundary: boundary.clone(),
                    interior: order.iter().map(|&j| coord_of(ids[j])).collect(),
                    a: order.iter().map(|&j| a[j]).collect(),
                    b: order.iter().map(|&j| b[j]).collect(),
                    nullity,
                });
            }
        };

        if next <= opts.lambda_floor {
            push_segment(opts.lambda_floor);
            break if opts.lambda_floor > 0.0 {
                Termination::LambdaFloor
            } else {
                Termination::ReachedZero
            };
        }
        push_segment(next);
        if knots.len() >= max_steps {
            break Termination::MaxSteps;
        }

        let event = if h > l {
            let c = best_hit.expect("positive hitting time");
            let image = qr.delete_row(slot[c.coord].expect("interior rows are nonzero"))?;
            axpy(f64::from(c.sign), &image, qr.tracked_mut(DBS));
            boundary.push(c.coord, c.sign);
            stats.hits += 1;
            Event::Hit {
                coord: c.coord,
                sign: c.sign,
            }
        } else {
            let c = best_leave.expect("positive leaving time");
            let id = slot[c.coord].expect("boundary rows are nonzero");
            let v = qr
                .detached_image(id)
                .expect("boundary images are retained")
                .to_vec();
            axpy(-f64::from(c.sign), &v, qr.tracked_mut(DBS));
            qr.reinsert(id)?;
            boundary.remove(c.coord);
            stats.leaves += 1;
            Event::Leave {
                coord: c.coord,
                sign: c.sign,
            }
        };
        knots.push(Knot {
            lambda: next,
            event,
            nullity_above: nullity,
            nullity_below: nullity,
        });
        if next < lambda_k {
            fresh.clear();
        }
        fresh.push(event.coord());
        lambda_k = next;
    };

    stats.steps = knots.len();
    stats.flops = qr.flops() + extra_flops;
    Ok(SolutionPath {
        m,
        n,
        segments,
        knots,
        termination,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{eval_primal, Event};
    use crate::penalty::make_d1d;

    #[test]
    fn two_point_fused_lasso() {
        let d = make_d1d(2);
        let path = solve_dual_path(&[0.0, 2.0], &d, &PathOptions::default()).unwrap();
        assert_eq!(path.knots.len(), 1);
        assert!((path.knots[0].lambda - 1.0).abs() < 1e-12);
        assert_eq!(path.knots[0].event, Event::Hit { coord: 0, sign: 1 });
        for lam in [1.0, 1.5, 10.0] {
            let beta = eval_primal(&path, lam, &[0.0, 2.0], &d).unwrap();
            assert!((beta[0] - 1.0).abs() < 1e-12 && (beta[1] - 1.0).abs() < 1e-12);
        }
        let u = path.eval_dual(0.4).unwrap();
        assert!((u[0] - 0.4).abs() < 1e-15);
        assert_eq!(path.termination, Termination::ReachedZero);
    }

    #[test]
    fn identity_knots_are_absolute_values() {
        let y = [3.0, -1.0, 0.5];
        let path =
            solve_dual_path(&y, &PenaltyMatrix::identity(3), &PathOptions::default()).unwrap();
        let lams: Vec<f64> = path.knots.iter().map(|k| k.lambda).collect();
        assert_eq!(lams, vec![3.0, 1.0, 0.5]);
        let beta = eval_primal(&path, 2.0, &y, &PenaltyMatrix::identity(3)).unwrap();
        assert_eq!(beta, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_penalty_is_one_segment() {
        let d = make_d1d(1);
        let path = solve_dual_path(&[4.0], &d, &PathOptions::default()).unwrap();
        assert!(path.knots.is_empty());
        assert_eq!(path.segments.len(), 1);
        assert_eq!(path.segments[0].nullity, 1);
    }

    #[test]
    fn floor_and_step_limits() {
        let y = [3.0, -1.0, 0.5];
        let d = PenaltyMatrix::identity(3);
        let opts = PathOptions {
            lambda_floor: 0.75,
            ..Default::default()
        };
        let path = solve_dual_path(&y, &d, &opts).unwrap();
        assert_eq!(path.termination, Termination::LambdaFloor);
        assert_eq!(path.lowest_lambda(), 0.75);
        assert!(matches!(path.eval_dual(0.5), Err(Error::OutOfRange { .. })));

        let opts = PathOptions {
            max_steps: Some(1),
            ..Default::default()
        };
        let path = solve_dual_path(&y, &d, &opts).unwrap();
        assert_eq!(path.termination, Termination::MaxSteps);
        assert_eq!(path.knots.len(), 1);
        assert_eq!(path.lowest_lambda(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let d = make_d1d(3);
        assert!(solve_dual_path(&[1.0, 2.0], &d, &PathOptions::default()).is_err());
        assert!(solve_dual_path(&[1.0, f64::NAN, 0.0], &d, &PathOptions::default()).is_err());
    }
}
