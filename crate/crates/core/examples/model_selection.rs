//! Choosing `λ` by the Cp criterion with the unbiased degrees-of-freedom
//! estimate (the dimension of the fitted null space).

use genlasso::modelsel::{cp_path, select_lambda};
use genlasso::path::eval_primal;
use genlasso::penalty::make_d1d;
use genlasso::{solve_dual_path, PathOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 80;
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let mean = if (20..50).contains(&i) { 2.5 } else { 0.0 };
            let e: f64 = StandardNormal.sample(&mut rng);
            mean + e
        })
        .collect();
    let d = make_d1d(n);
    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    let diag = cp_path(&y, &d, &path, Some(1.0))?;

    let lambda = select_lambda(&diag).expect("path has at least one row");
    let best = diag.rows.iter().find(|r| r.lambda == lambda).unwrap();
    println!(
        "selected lambda {lambda:.4} with df {} and Cp {:.3}",
        best.df,
        best.cp.unwrap()
    );

    let beta = eval_primal(&path, lambda, &y, &d)?;
    let mut start = 0;
    for i in 1..=n {
        if i == n || (beta[i] - beta[i - 1]).abs() > 1e-8 {
            println!("  [{start:>2}, {:>2}] level {:.3}", i - 1, beta[start]);
            start = i;
        }
    }
    Ok(())
}
