//! Robust regression: each observation gets its own shift coefficient,
//! penalized so that only gross outliers receive one.

use genlasso::design::{primal_from_dual, solve_path_design};
use genlasso::numlin::DenseMatrix;
use genlasso::penalty::outlier_design;
use genlasso::PathOptions;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let noise = Normal::new(0.0, 0.2).unwrap();
    let n = 30;
    let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![1.0, i as f64 / n as f64]).collect();
    let x = DenseMatrix::from_rows(&rows, 2)?;
    let mut y: Vec<f64> = rows
        .iter()
        .map(|r| 1.0 + 2.0 * r[1] + noise.sample(&mut rng))
        .collect();
    for &i in &[7, 19, 26] {
        y[i] += 4.0;
    }

    // pinning two shifts keeps the augmented design full column rank
    let pinned = x.n_cols();
    let (design, d) = outlier_design(&x, pinned)?;
    let (tp, path) = solve_path_design(&y, &design, &d, &PathOptions::default())?;
    let lambda = 1.0;
    let (coef, _) = primal_from_dual(&tp, &path, lambda)?;
    let free = n - pinned;
    let flagged: Vec<usize> = (0..free)
        .filter(|&c| coef[c].abs() > 1e-8)
        .map(|c| c + pinned)
        .collect();
    println!(
        "lambda {lambda}: intercept {:.3}, slope {:.3}",
        coef[free],
        coef[free + 1]
    );
    println!("flagged observations {flagged:?}");
    Ok(())
}
