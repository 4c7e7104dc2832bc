//! Piecewise-constant denoising with the 1d fused lasso.
//!
//! Run with `cargo run --example fused_1d`.

use genlasso::path::eval_primal;
use genlasso::penalty::make_d1d;
use genlasso::{solve_dual_path, PathOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.4).unwrap();
    let truth: Vec<f64> = (0..60)
        .map(|i| match i {
            0..=19 => 0.0,
            20..=39 => 2.0,
            _ => -1.0,
        })
        .collect();
    let y: Vec<f64> = truth.iter().map(|m| m + noise.sample(&mut rng)).collect();

    let d = make_d1d(y.len());
    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    println!(
        "{} knots, {} hits, {} leaves",
        path.knots.len(),
        path.stats.hits,
        path.stats.leaves
    );

    for lambda in [8.0, 2.0, 0.5] {
        let beta = eval_primal(&path, lambda, &y, &d)?;
        let jumps = beta
            .windows(2)
            .filter(|w| (w[1] - w[0]).abs() > 1e-8)
            .count();
        let err = beta
            .iter()
            .zip(&truth)
            .map(|(b, t)| (b - t).powi(2))
            .sum::<f64>()
            / y.len() as f64;
        println!("lambda {lambda:>4}: {jumps:>2} jumps, mse {err:.4}");
    }
    Ok(())
}
