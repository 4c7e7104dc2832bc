//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use common::{max_diff, normal_matrix, normal_vec, rng, small_instance, soft_threshold, Instance};
use genlasso::design::{primal_from_dual, solve_path_design};
use genlasso::modelsel::{cp_hat, cp_path, fused_group_count, fusion_tol, select_lambda};
use genlasso::oracle::{primal_fixed, OracleOptions};
use genlasso::path::{
    check_kkt, dominance_sides, eval_primal, is_diagonally_dominant, solve_dual_path,
    BoundaryLemma, Event, PathOptions, SolutionPath,
};
use genlasso::penalty::{make_d1d, make_graph_fused, PenaltyMatrix};
use genlasso::plot::{coordinate_paths, count_coordinate_polylines};
use rand::Rng;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solve(y: &[f64], d: &PenaltyMatrix) -> Result<SolutionPath, String> {
    solve_dual_path(y, d, &PathOptions::default()).map_err(|e| e.to_string())
}

fn first_knot(path: &SolutionPath) -> f64 {
    path.knots.first().map_or(1.0, |k| k.lambda)
}

/// The shared random instances for criteria 3 and 6.
fn instances() -> Vec<Instance> {
    let mut r = rng(3);
    (0..100).map(|k| small_instance(&mut r, k)).collect()
}

fn closed_form_pair() -> Outcome {
    let y = [0.0, 2.0];
    let d = make_d1d(2);
    let path = solve(&y, &d)?;
    ensure(path.knots.len() == 1, || {
        format!("{} knots", path.knots.len())
    })?;
    let k = path.knots[0];
    ensure((k.lambda - 1.0).abs() <= 1e-12, || {
        format!("knot at {}", k.lambda)
    })?;
    ensure(k.event == Event::Hit { coord: 0, sign: 1 }, || {
        format!("{:?}", k.event)
    })?;
    for lam in [1.0, 1.25, 3.0, 1e6] {
        let beta = eval_primal(&path, lam, &y, &d).map_err(|e| e.to_string())?;
        ensure(max_diff(&beta, &[1.0, 1.0]) <= 1e-12, || {
            format!("beta({lam}) = {beta:?}")
        })?;
    }
    Ok("single knot at 1, fused (1, 1) above it".into())
}

fn soft_threshold_equivalence() -> Outcome {
    let mut r = rng(2);
    let y = normal_vec(&mut r, 50);
    let d = PenaltyMatrix::identity(50);
    let path = solve(&y, &d)?;
    let mut abs: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let knots: Vec<f64> = path.knots.iter().map(|k| k.lambda).collect();
    ensure(knots.len() == 50, || format!("{} knots", knots.len()))?;
    let kerr = max_diff(&knots, &abs);
    ensure(kerr <= 1e-10, || format!("knot error {kerr:e}"))?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let lam = r.random_range(0.0..1.2 * abs[0]);
        let beta = eval_primal(&path, lam, &y, &d).map_err(|e| e.to_string())?;
        let st: Vec<f64> = y.iter().map(|&v| soft_threshold(v, lam)).collect();
        worst = worst.max(max_diff(&beta, &st));
    }
    ensure(worst <= 1e-10, || format!("primal error {worst:e}"))?;
    Ok(format!("knot error {kerr:.1e}, primal error {worst:.1e}"))
}

fn oracle_equivalence(inst: &[Instance]) -> Outcome {
    let mut r = rng(33);
    let opts = OracleOptions::default();
    let mut worst = (0.0f64, String::new());
    for (k, it) in inst.iter().enumerate() {
        let path = solve(&it.y, &it.d)?;
        let top = first_knot(&path);
        for _ in 0..5 {
            let lam = r.random_range(0.0..1.2 * top);
            let beta = eval_primal(&path, lam, &it.y, &it.d).map_err(|e| e.to_string())?;
            let want = primal_fixed(&it.y, &it.d, lam, &opts)
                .map_err(|e| format!("{} #{k}: {e}", it.label))?;
            let err = max_diff(&beta, &want);
            if err > worst.0 {
                worst = (err, format!("{} #{k} at {lam:.4}", it.label));
            }
        }
    }
    ensure(worst.0 <= 1e-6, || {
        format!("error {:.2e} on {}", worst.0, worst.1)
    })?;
    Ok(format!(
        "500 comparisons, worst {:.1e} ({})",
        worst.0, worst.1
    ))
}

fn boundary_lemma() -> Outcome {
    let mut r = rng(4);
    let d = make_d1d(100);
    let opts = PathOptions {
        boundary_lemma: BoundaryLemma::Off,
        ..Default::default()
    };
    let mut leaves = 0;
    for _ in 0..50 {
        let y = normal_vec(&mut r, 100);
        let path = solve_dual_path(&y, &d, &opts).map_err(|e| e.to_string())?;
        leaves += path.leave_count();
    }
    ensure(leaves == 0, || format!("{leaves} leave events"))?;
    ensure(is_diagonally_dominant(&d), || {
        "d1d not diagonally dominant".into()
    })?;
    for i in 1..98 {
        let sides = dominance_sides(&d, i);
        ensure(sides == (2.0, 2.0), || format!("row {i}: {sides:?}"))?;
    }
    Ok("50 paths with leaving times computed, no leaves; interior rows 2 = 2".into())
}

fn leave_events_exist() -> Outcome {
    let mut r = rng(5);
    let mut found = 0;
    let mut tried = 0;
    while tried < 500 && found < 3 {
        tried += 1;
        let n = r.random_range(5..=10);
        let extra = r.random_range(2..=6);
        let g = common::cyclic_graph(&mut r, n, extra);
        let d = make_graph_fused(&g);
        let y = normal_vec(&mut r, n);
        let path = solve(&y, &d)?;
        for k in path.knots.iter().filter(|k| k.event.is_leave()) {
            ensure(k.nullity_above == k.nullity_below + 1, || {
                format!(
                    "leave at {} changed nullity {} -> {}",
                    k.lambda, k.nullity_above, k.nullity_below
                )
            })?;
            found += 1;
        }
    }
    ensure(found > 0, || format!("no leave event in {tried} paths"))?;
    Ok(format!(
        "{found} leave events in {tried} paths, each dropping nullity by 1"
    ))
}

fn kkt_certification(inst: &[Instance]) -> Outcome {
    let mut r = rng(6);
    let mut worst = (0.0f64, String::new());
    for (k, it) in inst.iter().enumerate() {
        let path = solve(&it.y, &it.d)?;
        let top = first_knot(&path);
        for _ in 0..25 {
            let lam = r.random_range(0.0..1.2 * top);
            let u = path.eval_dual(lam).map_err(|e| e.to_string())?;
            let rep = check_kkt(&it.y, &it.d, lam, &u, 1e-9).map_err(|e| e.to_string())?;
            if rep.max() > worst.0 {
                worst = (rep.max(), format!("{} #{k} at {lam:.4}: {rep:?}", it.label));
            }
        }
    }
    ensure(worst.0 <= 1e-8, || {
        format!("violation {:.2e} on {}", worst.0, worst.1)
    })?;
    Ok(format!("2500 checks, worst {:.1e}", worst.0))
}

fn continuity_and_linearity(inst: &[Instance]) -> Outcome {
    let (mut jump, mut bend) = (0.0f64, 0.0f64);
    let mut knots = 0;
    for it in inst {
        let path = solve(&it.y, &it.d)?;
        for w in path.segments.windows(2) {
            let lam = w[0].lambda_lo;
            jump = jump.max(max_diff(
                &w[0].dual_at(lam, path.m),
                &w[1].dual_at(lam, path.m),
            ));
            knots += 1;
        }
        for s in &path.segments {
            let hi = if s.lambda_hi.is_finite() {
                s.lambda_hi
            } else {
                2.0 * s.lambda_lo + 1.0
            };
            let mid = 0.5 * (hi + s.lambda_lo);
            let at_mid = path.eval_dual(mid).map_err(|e| e.to_string())?;
            let avg: Vec<f64> = s
                .dual_at(hi, path.m)
                .iter()
                .zip(s.dual_at(s.lambda_lo, path.m))
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            bend = bend.max(max_diff(&at_mid, &avg));
        }
    }
    ensure(jump <= 1e-8, || format!("jump {jump:e} at a knot"))?;
    ensure(bend <= 1e-12, || format!("midpoint deviation {bend:e}"))?;
    Ok(format!(
        "{knots} knots, jump {jump:.1e}, midpoint deviation {bend:.1e}"
    ))
}

fn fused_groups_match_nullity() -> Outcome {
    let mut r = rng(8);
    let mut checked = 0;
    for k in 0..40 {
        let n = r.random_range(4..=14);
        let g = match k % 3 {
            0 => genlasso::penalty::Graph::chain(n),
            1 => {
                let extra = r.random_range(1..=5);
                common::cyclic_graph(&mut r, n, extra)
            }
            _ => genlasso::penalty::grid_graph(3, 4),
        };
        let d = make_graph_fused(&g);
        let y = normal_vec(&mut r, g.n_nodes());
        let path = solve(&y, &d)?;
        for s in path.segments.iter().filter(|s| s.lambda_hi.is_finite()) {
            let mid = 0.5 * (s.lambda_hi + s.lambda_lo);
            let beta = eval_primal(&path, mid, &y, &d).map_err(|e| e.to_string())?;
            let groups =
                fused_group_count(&beta, &g, fusion_tol(&beta)).map_err(|e| e.to_string())?;
            ensure(groups == s.nullity, || {
                format!("graph {k} at {mid}: {groups} groups, nullity {}", s.nullity)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} segment midpoints on 40 graphs"))
}

fn df_unbiased() -> Outcome {
    let mut r = rng(9);
    let d = make_d1d(20);
    let mu: Vec<f64> = (0..20).map(|i| [0.0, 2.0, -1.0][i * 3 / 20]).collect();
    let lam = 1.0;
    let opts = PathOptions {
        lambda_floor: lam,
        ..Default::default()
    };
    let reps = 2000;
    let mut z = Vec::with_capacity(reps);
    let mut df_sum = 0.0;
    for _ in 0..reps {
        let eps = normal_vec(&mut r, 20);
        let y: Vec<f64> = mu.iter().zip(&eps).map(|(m, e)| m + e).collect();
        let path = solve_dual_path(&y, &d, &opts).map_err(|e| e.to_string())?;
        let df = path.nullity_at(lam).map_err(|e| e.to_string())? as f64;
        let fit = eval_primal(&path, lam, &y, &d).map_err(|e| e.to_string())?;
        let cov: f64 = fit.iter().zip(&eps).map(|(f, e)| f * e).sum();
        df_sum += df;
        z.push(df - cov);
    }
    let n = reps as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    ensure(mean.abs() <= 3.0 * se, || {
        format!("mean difference {mean:.4} with se {se:.4}")
    })?;
    Ok(format!(
        "mean df {:.3}, covariance df {:.3}, difference {mean:.4} (se {se:.4})",
        df_sum / n,
        df_sum / n - mean
    ))
}

fn cp_knot_minimality() -> Outcome {
    let mut r = rng(10);
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let (y, d) = if k % 2 == 0 {
            let n = r.random_range(10..=40);
            let mu: Vec<f64> = (0..n).map(|i| if i < n / 2 { 0.0 } else { 1.5 }).collect();
            let y: Vec<f64> = mu
                .iter()
                .zip(normal_vec(&mut r, n))
                .map(|(m, e)| m + e)
                .collect();
            (y, make_d1d(n))
        } else {
            let g = common::cyclic_graph(&mut r, 12, 4);
            (normal_vec(&mut r, 12), make_graph_fused(&g))
        };
        let path = solve(&y, &d)?;
        let sigma2 = 1.0;
        let diag = cp_path(&y, &d, &path, Some(sigma2)).map_err(|e| e.to_string())?;
        let knot_min = diag
            .rows
            .iter()
            .filter_map(|row| row.cp)
            .fold(f64::INFINITY, f64::min);
        let star = select_lambda(&diag).ok_or("no selection")?;
        ensure(
            diag.rows
                .iter()
                .any(|row| row.lambda == star && row.cp == Some(knot_min)),
            || "selected lambda is not the minimizer".into(),
        )?;
        let top = 1.2 * first_knot(&path);
        let mut grid_min = f64::INFINITY;
        for i in 0..1000 {
            let lam = top * i as f64 / 999.0;
            let beta = eval_primal(&path, lam, &y, &d).map_err(|e| e.to_string())?;
            let rss: f64 = y.iter().zip(&beta).map(|(a, b)| (a - b).powi(2)).sum();
            let df = path.nullity_at(lam).map_err(|e| e.to_string())?;
            grid_min = grid_min.min(cp_hat(rss, y.len(), sigma2, df));
        }
        ensure(grid_min >= knot_min - 1e-8, || {
            format!("instance {k}: grid {grid_min} < knots {knot_min}")
        })?;
        worst = worst.min(grid_min - knot_min);
    }
    Ok(format!("smallest grid-minus-knot margin {worst:.2e}"))
}

fn lars_equivalence() -> Outcome {
    let mut r = rng(11);
    let (n, p) = (40, 8);
    let x = normal_matrix(&mut r, n, p);
    let y = normal_vec(&mut r, n);
    let d = PenaltyMatrix::identity(p);
    let opts = PathOptions {
        approximate: true,
        ..Default::default()
    };
    let (tp, path) = solve_path_design(&y, &x, &d, &opts).map_err(|e| e.to_string())?;
    ensure(path.knots.iter().all(|k| !k.event.is_leave()), || {
        "boundary shrank".into()
    })?;
    ensure(path.knots.len() == p, || {
        format!("{} knots for {p} coefficients", path.knots.len())
    })?;
    let corr = |lam: f64| -> Result<Vec<f64>, String> {
        let (_, fit) = primal_from_dual(&tp, &path, lam).map_err(|e| e.to_string())?;
        let res: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
        Ok(x.matvec_t(&res).unwrap().iter().map(|v| v.abs()).collect())
    };
    let mut active: Vec<usize> = Vec::new();
    let mut gap = f64::INFINITY;
    for (k, knot) in path.knots.iter().enumerate() {
        active.push(knot.event.coord());
        let c = corr(knot.lambda)?;
        for &j in &active {
            ensure((c[j] - knot.lambda).abs() <= 1e-8, || {
                format!("knot {k}: |X_{j}'r| = {} vs {}", c[j], knot.lambda)
            })?;
        }
        let off = (0..p)
            .filter(|j| !active.contains(j))
            .map(|j| c[j])
            .fold(0.0, f64::max);
        ensure(active.len() == p || off < knot.lambda - 1e-8, || {
            format!("knot {k}: inactive correlation {off}")
        })?;
        let lo = path.knots.get(k + 1).map_or(0.0, |n| n.lambda);
        if knot.lambda > lo && active.len() < p {
            let mid = 0.5 * (knot.lambda + lo);
            let c = corr(mid)?;
            let on = active.iter().map(|&j| c[j]).fold(f64::INFINITY, f64::min);
            let off = (0..p)
                .filter(|j| !active.contains(j))
                .map(|j| c[j])
                .fold(0.0, f64::max);
            ensure((on - mid).abs() <= 1e-8, || {
                format!("segment {k}: active correlation {on} vs {mid}")
            })?;
            ensure(on > off + 1e-8, || {
                format!("segment {k}: active {on} not above inactive {off}")
            })?;
            gap = gap.min(on - off);
        }
    }
    Ok(format!(
        "{} knots, all hits; smallest active-inactive gap {gap:.2e}",
        path.knots.len()
    ))
}

fn complexity() -> Outcome {
    let mut r = rng(12);
    let sizes = [250usize, 500, 1000, 2000];
    let mut work = Vec::new();
    let mut secs = 0.0;
    for &n in &sizes {
        let y = normal_vec(&mut r, n);
        let start = Instant::now();
        let path = solve(&y, &make_d1d(n))?;
        secs = start.elapsed().as_secs_f64();
        ensure(path.leave_count() == 0 && path.knots.len() == n - 1, || {
            format!("n={n}: {} knots", path.knots.len())
        })?;
        work.push(path.stats.flops as f64);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = work.iter().map(|w| w.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    ensure(secs < 10.0, || format!("n=2000 took {secs:.2}s"))?;
    ensure((slope - 3.0).abs() <= 0.5, || {
        format!("log-log slope {slope:.3}")
    })?;
    Ok(format!("n=2000 in {secs:.2}s, work slope {slope:.2}"))
}

fn figure_outputs() -> Outcome {
    let mut r = rng(13);
    let y: Vec<f64> = (0..8)
        .map(|i| if i < 4 { 0.0 } else { 2.0 })
        .zip(normal_vec(&mut r, 8))
        .map(|(m, e)| m + e)
        .collect();
    let dir = std::env::temp_dir().join(format!("genlasso-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let y_file = dir.join("y.txt");
    let text: Vec<String> = y.iter().map(|v| format!("{v:e}")).collect();
    std::fs::write(&y_file, text.join("\n")).map_err(|e| e.to_string())?;
    let render = |dual: bool| -> Result<String, String> {
        let out = dir.join(if dual { "dual.svg" } else { "primal.svg" });
        let mut args = vec![
            "genlasso".into(),
            "plot".into(),
            "--y".into(),
            y_file.clone().into_os_string(),
        ];
        args.extend(["--out".into(), out.clone().into_os_string()]);
        if dual {
            args.push("--dual".into());
        }
        let code = genlasso::cli::run::<_, std::ffi::OsString>(args);
        ensure(code == 0, || format!("plot exited with {code}"))?;
        std::fs::read_to_string(&out).map_err(|e| e.to_string())
    };
    let (ps, qs) = (render(false)?, render(true)?);
    let (np, nd) = (
        count_coordinate_polylines(&ps),
        count_coordinate_polylines(&qs),
    );
    ensure(np == 8 && nd == 7, || {
        format!("{np} primal and {nd} dual polylines")
    })?;
    ensure(qs.matches(r#"class="envelope""#).count() == 2, || {
        "missing envelope".into()
    })?;
    ensure(ps == render(false)?, || "nondeterministic SVG".into())?;
    let _ = std::fs::remove_dir_all(&dir);

    let d = make_d1d(8);
    let path = solve(&y, &d)?;
    let q = coordinate_paths(&path, true, |l| eval_primal(&path, l, &y, &d))
        .map_err(|e| e.to_string())?;
    for s in &q.series {
        for (v, l) in s.iter().zip(&q.lambdas) {
            ensure(v.abs() <= l + 1e-9, || {
                format!("dual value {v} outside envelope {l}")
            })?;
        }
    }
    Ok("8 primal and 7 dual polylines, dual inside the envelope".into())
}

fn main() {
    let inst = instances();
    let criteria: Vec<(&str, Check)> = vec![
        (
            "closed-form two-point fused lasso",
            Box::new(closed_form_pair),
        ),
        (
            "soft-threshold equivalence",
            Box::new(soft_threshold_equivalence),
        ),
        ("oracle equivalence", Box::new(|| oracle_equivalence(&inst))),
        ("boundary lemma", Box::new(boundary_lemma)),
        ("leave events exist", Box::new(leave_events_exist)),
        ("KKT certification", Box::new(|| kkt_certification(&inst))),
        (
            "continuity and piecewise linearity",
            Box::new(|| continuity_and_linearity(&inst)),
        ),
        (
            "fused groups equal nullity",
            Box::new(fused_groups_match_nullity),
        ),
        ("df unbiasedness", Box::new(df_unbiased)),
        ("Cp knot minimality", Box::new(cp_knot_minimality)),
        ("LARS equivalence properties", Box::new(lars_equivalence)),
        ("complexity smoke test", Box::new(complexity)),
        ("figure-style outputs", Box::new(figure_outputs)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let dt = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:2} {name}: {detail} [{dt:.2}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:2} {name}: {why} [{dt:.2}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
