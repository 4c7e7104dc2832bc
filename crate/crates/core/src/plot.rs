//! Static SVG renderings of primal and dual coordinate paths.
//!
//! Paths are piecewise linear, so each coordinate is drawn exactly by
//! evaluating it at the knots and at the ends of the plotted range.

use std::fmt::Write as _;

use crate::error::Result;
use crate::path::SolutionPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub width: u32,
    pub height: u32,
    /// Plot the dual coordinates (with the `±λ` envelope) instead of the primal.
    pub dual: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            width: 640,
            height: 400,
            dual: false,
        }
    }
}

/// Sampled coordinate paths ready for drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub dual: bool,
    /// Breakpoints in increasing `λ`.
    pub lambdas: Vec<f64>,
    /// `series[i][k]` is coordinate `i` at `lambdas[k]`.
    pub series: Vec<Vec<f64>>,
    /// Distinct knot locations.
    pub knots: Vec<f64>,
}

/// Evaluates the coordinate paths at every knot plus both ends of the range.
/// The range runs from the lowest computed `λ` to 10% past the first knot.
pub fn coordinate_paths(
    path: &SolutionPath,
    dual: bool,
    primal: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<PlotData> {
    let lo = path.lowest_lambda();
    let mut knots: Vec<f64> = path
        .knots
        .iter()
        .map(|k| k.lambda)
        .filter(|&l| l >= lo)
        .collect();
    knots.dedup();
    knots.reverse();
    let first = knots.last().copied().unwrap_or(0.0);
    let hi = if first > lo {
        lo + 1.1 * (first - lo)
    } else {
        lo + 1.0
    };
    let mut lambdas = vec![lo];
    lambdas.extend(knots.iter().copied().filter(|&l| l > lo));
    lambdas.push(hi);
    let mut columns = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        columns.push(if dual { path.eval_dual(l)? } else { primal(l)? });
    }
    let dim = columns.first().map_or(0, Vec::len);
    let series = (0..dim)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    Ok(PlotData {
        dual,
        lambdas,
        series,
        knots,
    })
}

/// Renders the paths as SVG. Primal plots read left to right in increasing
/// `λ`; dual plots in decreasing `λ`.
pub fn render_svg(data: &PlotData, opts: &PlotOptions) -> String {
    let (w, h) = (f64::from(opts.width), f64::from(opts.height));
    let margin = 40.0;
    let (lo, hi) = (data.lambdas[0], *data.lambdas.last().unwrap_or(&1.0));
    let mut vmin = data
        .series
        .iter()
        .flatten()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let mut vmax = data
        .series
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if data.dual {
        vmin = vmin.min(-hi);
        vmax = vmax.max(hi);
    }
    if !vmin.is_finite() {
        (vmin, vmax) = (-1.0, 1.0);
    }
    if vmax - vmin < 1e-12 {
        (vmin, vmax) = (vmin - 1.0, vmax + 1.0);
    }
    let px = |l: f64| {
        let f = (l - lo) / (hi - lo);
        let f = if data.dual { 1.0 - f } else { f };
        margin + f * (w - 2.0 * margin)
    };
    let py = |v: f64| h - margin - (v - vmin) / (vmax - vmin) * (h - 2.0 * margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        margin,
        h - margin,
        w - margin,
        h - margin
    );
    for &k in &data.knots {
        let x = px(k);
        let _ = writeln!(
            out,
            r##"<line class="knot" x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="#bbbbbb" stroke-dasharray="4 3"/>"##,
            margin,
            h - margin
        );
    }
    if data.dual {
        for sign in [1.0, -1.0] {
            let _ = writeln!(
                out,
                r#"<polyline class="envelope" fill="none" stroke="black" stroke-dasharray="2 2" points="{:.3},{:.3} {:.3},{:.3}"/>"#,
                px(lo),
                py(sign * lo),
                px(hi),
                py(sign * hi)
            );
        }
    }
    const PALETTE: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    ];
    for (i, s) in data.series.iter().enumerate() {
        let pts: Vec<String> = data
            .lambdas
            .iter()
            .zip(s)
            .map(|(&l, &v)| format!("{:.3},{:.3}", px(l), py(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="coord" data-index="{i}" fill="none" stroke="{}" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    let label = if data.dual {
        "lambda (decreasing)"
    } else {
        "lambda"
    };
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{label}</text>"#,
        w / 2.0,
        h - 10.0
    );
    out.push_str("</svg>\n");
    out
}

/// Number of coordinate polylines in an SVG produced by [`render_svg`].
pub fn count_coordinate_polylines(svg: &str) -> usize {
    svg.matches(r#"<polyline class="coord""#).count()
}
