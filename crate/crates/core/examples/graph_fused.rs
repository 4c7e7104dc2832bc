//! Fused lasso over a 2d grid. The fitted image is constant on connected
//! pieces of the grid with the boundary edges removed.

use genlasso::modelsel::{fused_group_count, fusion_tol};
use genlasso::path::eval_primal;
use genlasso::penalty::{grid_graph, make_graph_fused};
use genlasso::{solve_dual_path, PathOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> genlasso::Result<()> {
    let (rows, cols) = (6, 6);
    let g = grid_graph(rows, cols);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.5).unwrap();
    // a bright square in one corner
    let y: Vec<f64> = (0..rows * cols)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            let base = if r < 3 && c < 3 { 3.0 } else { 0.0 };
            base + noise.sample(&mut rng)
        })
        .collect();

    let d = make_graph_fused(&g);
    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    println!(
        "{} edges, {} knots, {} of them leaves",
        d.m(),
        path.knots.len(),
        path.leave_count()
    );

    let lambda = 1.0;
    let beta = eval_primal(&path, lambda, &y, &d)?;
    let groups = fused_group_count(&beta, &g, fusion_tol(&beta))?;
    println!(
        "lambda {lambda}: {groups} fused groups (nullity {})",
        path.nullity_at(lambda)?
    );
    for r in 0..rows {
        let line: Vec<String> = (0..cols)
            .map(|c| format!("{:5.2}", beta[r * cols + c]))
            .collect();
        println!("  {}", line.join(" "));
    }
    Ok(())
}
