//! Command-line front end: `solve`, `eval` and `plot`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::design::{default_ridge_epsilon, ridge_augment, TransformedProblem};
use crate::error::{Error, Result};
use crate::io;
use crate::modelsel::{cp_path, cp_path_design, PathDiagnostics};
use crate::numlin::{max_abs, DenseMatrix};
use crate::oracle::{self, OracleOptions};
use crate::path::{eval_primal, solve_dual_path, PathOptions, SolutionPath};
use crate::penalty::{self, PenaltyMatrix};
use crate::plot::{self, PlotOptions};

/// Environment variable seeding the oracle's randomized sweep order.
pub const SEED_VAR: &str = "GENLASSO_SEED";

/// A named penalty constructor.
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltySpec {
    D1d,
    TrendFilter(usize),
    Graph(PathBuf),
    Grid(usize, usize),
    SparseFused(PathBuf, f64, f64),
    /// Outlier formulation; needs a design, whose column count of outlier
    /// coefficients is pinned to zero.
    Outlier,
    Matrix(PathBuf),
    Identity,
}

impl FromStr for PenaltySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unrecognized penalty {s:?}"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        Ok(match s.split_once(':') {
            None => match s {
                "d1d" => PenaltySpec::D1d,
                "outlier" => PenaltySpec::Outlier,
                "identity" => PenaltySpec::Identity,
                _ => return Err(bad()),
            },
            Some(("tf", k)) => PenaltySpec::TrendFilter(k.parse().map_err(|_| bad())?),
            Some(("graph", f)) => PenaltySpec::Graph(f.into()),
            Some(("grid", rc)) => {
                let (r, c) = rc.split_once(['x', 'X']).ok_or_else(bad)?;
                PenaltySpec::Grid(r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?)
            }
            Some(("sparse-fused", rest)) => {
                let mut parts = rest.rsplitn(3, ':');
                let l2 = num(parts.next().ok_or_else(bad)?)?;
                let l1 = num(parts.next().ok_or_else(bad)?)?;
                let file = parts.next().ok_or_else(bad)?;
                PenaltySpec::SparseFused(file.into(), l1, l2)
            }
            Some(("matrix", "identity")) => PenaltySpec::Identity,
            Some(("matrix", f)) => PenaltySpec::Matrix(f.into()),
            _ => return Err(bad()),
        })
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Response, optional design and penalty, ready to solve.
#[derive(Debug, Clone)]
pub struct Problem {
    pub y: Vec<f64>,
    pub x: Option<DenseMatrix>,
    pub d: PenaltyMatrix,
    pub warnings: Vec<String>,
}

impl Problem {
    pub fn build(
        y: Vec<f64>,
        x: Option<DenseMatrix>,
        spec: &PenaltySpec,
        ridge_epsilon: Option<RidgeEpsilon>,
    ) -> Result<Problem> {
        let mut warnings = Vec::new();
        if let Some(x) = &x {
            if x.n_rows() != y.len() {
                return Err(Error::dims(format!(
                    "design has {} rows, response has {}",
                    x.n_rows(),
                    y.len()
                )));
            }
        }
        let p = x.as_ref().map_or(y.len(), DenseMatrix::n_cols);
        let graph_penalty = |g: &penalty::Graph, warnings: &mut Vec<String>| {
            let dups = g.duplicate_edges();
            if !dups.is_empty() {
                warnings.push(format!(
                    "{} duplicate edge(s) kept as repeated penalty rows",
                    dups.len()
                ));
            }
        };
        let (x, d) = match spec {
            PenaltySpec::D1d => (x, penalty::make_d1d(p)),
            PenaltySpec::TrendFilter(k) => (x, penalty::make_trend_filter(p, *k)?),
            PenaltySpec::Identity => (x, PenaltyMatrix::identity(p)),
            PenaltySpec::Grid(r, c) => {
                if r * c != p {
                    return Err(Error::dims(format!(
                        "grid {r}x{c} has {} nodes for {p} coefficients",
                        r * c
                    )));
                }
                (x, penalty::make_graph_fused(&penalty::grid_graph(*r, *c)))
            }
            PenaltySpec::Graph(f) => {
                let g = io::parse_edges(&read(f)?, p)?;
                graph_penalty(&g, &mut warnings);
                (x, penalty::make_graph_fused(&g))
            }
            PenaltySpec::SparseFused(f, l1, l2) => {
                let g = io::parse_edges(&read(f)?, p)?;
                graph_penalty(&g, &mut warnings);
                (x, penalty::make_sparse_fused(&g, *l1, *l2)?)
            }
            PenaltySpec::Matrix(f) => {
                let d = io::parse_penalty(&read(f)?)?;
                if d.p() != p {
                    return Err(Error::dims(format!(
                        "penalty has {} columns for {p} coefficients",
                        d.p()
                    )));
                }
                (x, d)
            }
            PenaltySpec::Outlier => {
                let x = x.ok_or(Error::invalid("the outlier penalty needs a design (--X)"))?;
                let (design, d) = penalty::outlier_design(&x, x.n_cols())?;
                (Some(design), d)
            }
        };
        let (y, x) = match ridge_epsilon {
            None => (y, x),
            Some(eps) => {
                let x = x.unwrap_or_else(|| DenseMatrix::identity(y.len()));
                let eps = match eps {
                    RidgeEpsilon::Auto => default_ridge_epsilon(&x),
                    RidgeEpsilon::Value(v) => v,
                };
                let (ys, xs) = ridge_augment(&y, &x, eps)?;
                (ys, Some(xs))
            }
        };
        Ok(Problem { y, x, d, warnings })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RidgeEpsilon {
    /// `1e-4` times the largest column norm of the design.
    Auto,
    Value(f64),
}

impl FromStr for RidgeEpsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(RidgeEpsilon::Auto);
        }
        s.parse::<f64>()
            .map(RidgeEpsilon::Value)
            .map_err(|_| Error::invalid(format!("bad ridge epsilon {s:?}")))
    }
}

/// A problem together with its computed (or loaded) path.
#[derive(Debug, Clone)]
pub struct Fitted {
    pub problem: Problem,
    pub tp: Option<TransformedProblem>,
    pub path: SolutionPath,
}

impl Fitted {
    pub fn solve(problem: Problem, opts: &PathOptions) -> Result<Fitted> {
        let tp = Self::transform(&problem)?;
        let path = match &tp {
            Some(tp) => solve_dual_path(&tp.y_tilde, &tp.d_tilde, opts)?,
            None => solve_dual_path(&problem.y, &problem.d, opts)?,
        };
        Ok(Fitted { problem, tp, path })
    }

    /// Attaches a previously serialized path.
    pub fn with_path(problem: Problem, path: SolutionPath) -> Result<Fitted> {
        let tp = Self::transform(&problem)?;
        if path.m != problem.d.m() || path.n != problem.y.len() {
            return Err(Error::dims(format!(
                "segment file is for m={}, n={} but the problem has m={}, n={}",
                path.m,
                path.n,
                problem.d.m(),
                problem.y.len()
            )));
        }
        Ok(Fitted { problem, tp, path })
    }

    fn transform(problem: &Problem) -> Result<Option<TransformedProblem>> {
        let Some(x) = &problem.x else { return Ok(None) };
        let tp = TransformedProblem::new(&problem.y, x, &problem.d)?;
        if !tp.rank_ok {
            return Err(Error::RankDeficientDesign {
                rank: tp.rank,
                cols: x.n_cols(),
            });
        }
        Ok(Some(tp))
    }

    /// Coefficients, and the fit when a design is present.
    pub fn primal(&self, lambda: f64) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        match &self.tp {
            Some(tp) => {
                let (beta, fit) = tp.primal_from_dual_vector(&self.path.eval_dual(lambda)?)?;
                Ok((beta, Some(fit)))
            }
            None => Ok((
                eval_primal(&self.path, lambda, &self.problem.y, &self.problem.d)?,
                None,
            )),
        }
    }

    pub fn diagnostics(&self, sigma2: Option<f64>) -> Result<PathDiagnostics> {
        match &self.tp {
            Some(tp) => cp_path_design(&self.problem.y, tp, &self.path, sigma2),
            None => cp_path(&self.problem.y, &self.problem.d, &self.path, sigma2),
        }
    }

    /// Oracle coefficients at `lambda`.
    pub fn oracle_primal(&self, lambda: f64, opts: &OracleOptions) -> Result<Vec<f64>> {
        match &self.problem.x {
            Some(x) => {
                Ok(
                    oracle::primal_fixed_design(&self.problem.y, x, &self.problem.d, lambda, opts)?
                        .0,
                )
            }
            None => oracle::primal_fixed(&self.problem.y, &self.problem.d, lambda, opts),
        }
    }

    /// Largest coefficient discrepancy between path and oracle over `lambdas`.
    pub fn oracle_discrepancy(&self, lambdas: &[f64], opts: &OracleOptions) -> Result<f64> {
        let mut worst = 0.0f64;
        for &l in lambdas {
            let (beta, _) = self.primal(l)?;
            let other = self.oracle_primal(l, opts)?;
            let diff: Vec<f64> = beta.iter().zip(&other).map(|(a, b)| a - b).collect();
            worst = worst.max(max_abs(&diff));
        }
        Ok(worst)
    }

    /// Midpoints of every segment (the first one is sampled just above its knot).
    pub fn segment_midpoints(&self) -> Vec<f64> {
        self.path
            .segments
            .iter()
            .map(|s| {
                if s.lambda_hi.is_finite() {
                    0.5 * (s.lambda_hi + s.lambda_lo)
                } else {
                    1.5 * s.lambda_lo + 1.0
                }
            })
            .collect()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "genlasso",
    version,
    about = "Generalized lasso solution paths via the dual"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the path; write knot diagnostics and optionally segments.
    Solve(SolveArgs),
    /// Evaluate coefficients (and fit) at given lambdas.
    Eval(EvalArgs),
    /// Draw coordinate paths as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Response vector, one value per line.
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    /// Design matrix in Matrix Market format.
    #[arg(long = "X", value_name = "FILE")]
    pub x: Option<PathBuf>,
    /// d1d | tf:K | graph:FILE | grid:RxC | sparse-fused:FILE:L1:L2 | outlier | matrix:FILE | identity
    #[arg(long, default_value = "d1d")]
    pub penalty: String,
    /// Augment the design with EPS times the identity (a number or `auto`).
    #[arg(long = "ridge-epsilon", value_name = "EPS")]
    pub ridge_epsilon: Option<String>,
    /// Never let dual coordinates leave the boundary.
    #[arg(long)]
    pub approximate: bool,
    /// Stop the path once lambda falls to this value.
    #[arg(long = "lambda-floor", default_value_t = 0.0)]
    pub lambda_floor: f64,
    /// Stop after this many knots.
    #[arg(long = "max-steps")]
    pub max_steps: Option<usize>,
    /// Cross-check against the coordinate-descent oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Noise variance for the Cp column.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Knot CSV destination (stdout by default).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the segment file here.
    #[arg(long)]
    pub segments: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// One or more lambdas; output columns follow this order.
    #[arg(long = "lambda", required = true, num_args = 1.., allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    /// Read the path from a segment file instead of solving.
    #[arg(long)]
    pub segments: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Plot dual instead of primal coordinates.
    #[arg(long)]
    pub dual: bool,
    #[arg(long, default_value_t = 640)]
    pub width: u32,
    #[arg(long, default_value_t = 400)]
    pub height: u32,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem> {
        let y = io::parse_response(&read(&self.y)?)?;
        let x = self
            .x
            .as_deref()
            .map(|f| io::parse_dense_matrix(&read(f)?))
            .transpose()?;
        let spec: PenaltySpec = self.penalty.parse()?;
        let ridge = self.ridge_epsilon.as_deref().map(str::parse).transpose()?;
        let problem = Problem::build(y, x, &spec, ridge)?;
        for w in &problem.warnings {
            eprintln!("warning: {w}");
        }
        Ok(problem)
    }

    fn options(&self) -> PathOptions {
        PathOptions {
            max_steps: self.max_steps,
            lambda_floor: self.lambda_floor,
            approximate: self.approximate,
            ..Default::default()
        }
    }

    fn fit(&self) -> Result<Fitted> {
        let fitted = Fitted::solve(self.load()?, &self.options())?;
        if let Some(tp) = &fitted.tp {
            tp.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
        }
        Ok(fitted)
    }
}

fn oracle_options() -> Result<OracleOptions> {
    let seed = match std::env::var(SEED_VAR) {
        Ok(v) => Some(
            v.parse::<u64>()
                .map_err(|_| Error::invalid(format!("{SEED_VAR} must be an unsigned integer")))?,
        ),
        Err(_) => None,
    };
    Ok(OracleOptions {
        seed,
        ..Default::default()
    })
}

fn report_oracle(fitted: &Fitted, lambdas: &[f64]) -> Result<()> {
    let worst = fitted.oracle_discrepancy(lambdas, &oracle_options()?)?;
    eprintln!(
        "oracle: max coefficient discrepancy {worst:.3e} over {} lambda values",
        lambdas.len()
    );
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let fitted = args.problem.fit()?;
    if args.problem.oracle {
        report_oracle(&fitted, &fitted.segment_midpoints())?;
    }
    let diag = fitted.diagnostics(args.sigma2)?;
    if let Some(seg) = &args.segments {
        write(Some(seg), &io::write_segments(&fitted.path))?;
    }
    write(args.out.as_deref(), &io::write_diagnostics_csv(&diag))
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let fitted = match &args.segments {
        Some(f) => Fitted::with_path(args.problem.load()?, io::parse_segments(&read(f)?)?)?,
        None => args.problem.fit()?,
    };
    if args.problem.oracle {
        report_oracle(&fitted, &args.lambda)?;
    }
    let mut betas = Vec::new();
    let mut fits = Vec::new();
    for &l in &args.lambda {
        let (beta, fit) = fitted.primal(l)?;
        betas.push(beta);
        fits.extend(fit);
    }
    let fit = (!fits.is_empty()).then_some(fits.as_slice());
    write(
        args.out.as_deref(),
        &io::write_eval_csv(&args.lambda, &betas, fit),
    )
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let fitted = args.problem.fit()?;
    let data = plot::coordinate_paths(&fitted.path, args.dual, |l| Ok(fitted.primal(l)?.0))?;
    let opts = PlotOptions {
        width: args.width,
        height: args.height,
        dual: args.dual,
    };
    write(Some(&args.out), &plot::render_svg(&data, &opts))
}

/// Process exit code for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } | Error::RankDeficientDesign { .. } | Error::Unsupported(_) => 3,
        _ => 2,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_specs() {
        assert_eq!("d1d".parse::<PenaltySpec>().unwrap(), PenaltySpec::D1d);
        assert_eq!(
            "tf:2".parse::<PenaltySpec>().unwrap(),
            PenaltySpec::TrendFilter(2)
        );
        assert_eq!(
            "grid:3x4".parse::<PenaltySpec>().unwrap(),
            PenaltySpec::Grid(3, 4)
        );
        assert_eq!(
            "matrix:identity".parse::<PenaltySpec>().unwrap(),
            PenaltySpec::Identity
        );
        assert_eq!(
            "sparse-fused:dir/e.csv:0.5:2"
                .parse::<PenaltySpec>()
                .unwrap(),
            PenaltySpec::SparseFused("dir/e.csv".into(), 0.5, 2.0)
        );
        assert!("tf:x".parse::<PenaltySpec>().is_err());
        assert!("wavelet".parse::<PenaltySpec>().is_err());
    }

    #[test]
    fn outlier_problem_pins_design_columns() {
        let x = DenseMatrix::from_vec(4, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = Problem::build(
            vec![1.0, 2.0, 3.0, 10.0],
            Some(x),
            &PenaltySpec::Outlier,
            None,
        )
        .unwrap();
        let design = p.x.unwrap();
        assert_eq!((design.n_rows(), design.n_cols()), (4, 4));
        assert_eq!(p.d.m(), 3);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invalid("x")), 2);
        assert_eq!(
            exit_code(&Error::RankDeficientDesign { rank: 1, cols: 2 }),
            3
        );
    }
}
