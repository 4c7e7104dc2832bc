//! Writes primal and dual coordinate-path plots for a small 1d fused lasso
//! to `primal.svg` and `dual.svg` in the system temp directory.

use genlasso::path::eval_primal;
use genlasso::penalty::make_d1d;
use genlasso::plot::{coordinate_paths, render_svg, PlotOptions};
use genlasso::{solve_dual_path, PathOptions};

fn main() -> genlasso::Result<()> {
    let y = [0.1, -0.4, 0.3, 0.0, 2.2, 1.7, 2.5, 1.9];
    let d = make_d1d(y.len());
    let path = solve_dual_path(&y, &d, &PathOptions::default())?;
    let dir = std::env::temp_dir();
    for dual in [false, true] {
        let data = coordinate_paths(&path, dual, |l| eval_primal(&path, l, &y, &d))?;
        let svg = render_svg(
            &data,
            &PlotOptions {
                dual,
                ..Default::default()
            },
        );
        let file = dir.join(if dual { "dual.svg" } else { "primal.svg" });
        std::fs::write(&file, svg)?;
        println!("{} coordinates -> {}", data.series.len(), file.display());
    }
    Ok(())
}
