//! Cross-checks the path against an independent fixed-`λ` solver
//! (coordinate descent on the dual box-constrained problem).

use genlasso::oracle::{primal_fixed, OracleOptions};
use genlasso::path::{check_kkt, eval_primal};
use genlasso::penalty::{make_graph_fused, Graph};
use genlasso::{solve_dual_path, PathOptions};

fn main() -> genlasso::Result<()> {
    // a wheel: hub 0 joined to a 6-cycle, plus one duplicated spoke
    let mut edges: Vec<(usize, usize)> = (1..=6).map(|i| (0, i)).collect();
    edges.extend((1..=6).map(|i| (i, i % 6 + 1)));
    edges.push((0, 3));
    let g = Graph::new(7, edges)?;
    let d = make_graph_fused(&g);
    let y = [0.2, 1.5, -0.7, 2.1, 0.4, -1.1, 0.9];

    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    println!("duplicate edges at {:?}", g.duplicate_edges());
    let opts = OracleOptions::default();
    for lambda in [0.05, 0.3, 0.8, 2.0] {
        let beta = eval_primal(&path, lambda, &y, &d)?;
        let other = primal_fixed(&y, &d, lambda, &opts)?;
        let gap = beta
            .iter()
            .zip(&other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let kkt = check_kkt(&y, &d, lambda, &path.eval_dual(lambda)?, 1e-9)?;
        println!(
            "lambda {lambda:4}: oracle gap {gap:.2e}, worst KKT residual {:.2e}",
            kkt.max()
        );
    }
    Ok(())
}
