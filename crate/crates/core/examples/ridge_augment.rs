//! A design with more columns than rows has no unique least-squares fit;
//! a small ridge term makes it full rank so the path can be computed.

use genlasso::design::{default_ridge_epsilon, primal_from_dual, ridge_augment, solve_path_design};
use genlasso::numlin::DenseMatrix;
use genlasso::penalty::make_d1d;
use genlasso::{Error, PathOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let (n, p) = (12, 20);
    let data: Vec<f64> = (0..n * p)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let x = DenseMatrix::from_vec(n, p, data)?;
    let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let d = make_d1d(p);
    let opts = PathOptions::default();

    match solve_path_design(&y, &x, &d, &opts) {
        Err(Error::RankDeficientDesign { rank, cols }) => {
            println!("plain design: rank {rank} of {cols}")
        }
        other => println!("unexpected: {:?}", other.map(|_| ())),
    }

    let eps = default_ridge_epsilon(&x);
    let (ya, xa) = ridge_augment(&y, &x, eps)?;
    let (tp, path) = solve_path_design(&ya, &xa, &d, &opts)?;
    println!("epsilon {eps:.2e}: {} knots", path.knots.len());
    let (beta, _) = primal_from_dual(&tp, &path, 0.5)?;
    let pieces = 1 + beta
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > 1e-8)
        .count();
    println!("lambda 0.5: {pieces} constant pieces");
    Ok(())
}
