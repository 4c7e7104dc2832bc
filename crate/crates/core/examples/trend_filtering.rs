//! Linear trend filtering: piecewise-linear fits whose kinks are chosen by
//! the path.

use genlasso::path::eval_primal;
use genlasso::penalty::make_trend_filter;
use genlasso::{solve_dual_path, PathOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let n = 50;
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let tent = if t < 0.5 { 4.0 * t } else { 4.0 * (1.0 - t) };
            tent + noise.sample(&mut rng)
        })
        .collect();

    let d = make_trend_filter(n, 1)?;
    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    println!("{} knots ({} leaves)", path.knots.len(), path.leave_count());

    for lambda in [50.0, 5.0, 0.5] {
        let beta = eval_primal(&path, lambda, &y, &d)?;
        let kinks = d.apply(&beta)?.iter().filter(|v| v.abs() > 1e-8).count();
        println!(
            "lambda {lambda:>5}: {kinks} kinks, df {}",
            path.nullity_at(lambda)?
        );
    }
    Ok(())
}
