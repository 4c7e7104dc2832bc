//! The ordinary lasso (`D = I`) with a general design. In approximate mode
//! coefficients only ever enter the model, which reproduces LARS.

use genlasso::design::{primal_from_dual, solve_path_design};
use genlasso::numlin::DenseMatrix;
use genlasso::{PathOptions, PenaltyMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> genlasso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, p) = (40, 8);
    let data: Vec<f64> = (0..n * p)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let x = DenseMatrix::from_vec(n, p, data)?;
    let truth = [3.0, 0.0, -2.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let mut y = x.matvec(&truth)?;
    for v in &mut y {
        let e: f64 = StandardNormal.sample(&mut rng);
        *v += 0.5 * e;
    }

    let opts = PathOptions {
        approximate: true,
        ..Default::default()
    };
    let (tp, path) = solve_path_design(&y, &x, &PenaltyMatrix::identity(p), &opts)?;
    for knot in &path.knots {
        let (beta, fit) = primal_from_dual(&tp, &path, knot.lambda)?;
        let r: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
        let corr = x.matvec_t(&r)?;
        let active = beta.iter().filter(|b| b.abs() > 1e-10).count();
        println!(
            "lambda {:8.4}: x{} enters ({active} already active), max |X'r| {:.4}",
            knot.lambda,
            knot.event.coord(),
            corr.iter().fold(0.0f64, |m, c| m.max(c.abs()))
        );
    }
    Ok(())
}
