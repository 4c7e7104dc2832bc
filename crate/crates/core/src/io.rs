//! Text formats: response vectors, edge lists, Matrix Market matrices,
//! knot diagnostics and segment files.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::modelsel::PathDiagnostics;
use crate::numlin::DenseMatrix;
use crate::path::{BoundaryState, PathSegment, PathStats, SolutionPath, Termination};
use crate::penalty::{Graph, PenaltyMatrix};

/// Formats a number with 17 significant digits (`inf` for infinity).
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok
            .parse::<f64>()
            .map_err(|_| Error::parse(line, format!("not a number: {tok:?}"))),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("not an index: {tok:?}")))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

/// Parses numbers separated by newlines, commas or spaces; `#` starts a comment.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        for tok in tokens(l) {
            let v = parse_num(tok, line)?;
            if !v.is_finite() {
                return Err(Error::parse(line, "non-finite value"));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Parses a response vector, rejecting an empty one.
pub fn parse_response(text: &str) -> Result<Vec<f64>> {
    let y = parse_vector(text)?;
    if y.is_empty() {
        return Err(Error::invalid("empty response"));
    }
    Ok(y)
}

/// Parses a two-column edge list `i,j` of 0-based node indices. A first
/// line that is not numeric is taken as a header.
pub fn parse_edges(text: &str, n_nodes: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for (k, (line, l)) in content_lines(text).enumerate() {
        let toks: Vec<&str> = tokens(l).collect();
        if k == 0 && toks.iter().any(|t| t.parse::<usize>().is_err()) {
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected two node indices, found {}", toks.len()),
            ));
        }
        edges.push((parse_index(toks[0], line)?, parse_index(toks[1], line)?));
    }
    Graph::new(n_nodes, edges)
}

/// Sparse entries `(i, j, value)` with 0-based indices.
pub type Triplets = Vec<(usize, usize, f64)>;

/// Entries of a Matrix Market file, as `(rows, cols, entries)`.
pub fn parse_matrix_market(text: &str) -> Result<(usize, usize, Triplets)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or(Error::parse(1, "empty matrix file"))?;
    let head: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if head.len() < 4 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(Error::parse(1, "missing %%MatrixMarket matrix header"));
    }
    let array = match head[2].as_str() {
        "coordinate" => false,
        "array" => true,
        other => return Err(Error::parse(1, format!("unsupported layout {other:?}"))),
    };
    if !matches!(head[3].as_str(), "real" | "integer" | "double") {
        return Err(Error::parse(1, format!("unsupported field {:?}", head[3])));
    }
    if head.get(4).is_some_and(|s| s != "general") {
        return Err(Error::parse(1, "only general matrices are supported"));
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = body.next().ok_or(Error::parse(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| parse_index(t, sline))
        .collect::<Result<_>>()?;
    let mut entries = Vec::new();
    if array {
        let [rows, cols] = dims[..] else {
            return Err(Error::parse(sline, "array size line needs rows and cols"));
        };
        let mut k = 0;
        for (line, l) in body {
            for tok in l.split_whitespace() {
                if k >= rows * cols {
                    return Err(Error::parse(line, "more values than the declared size"));
                }
                let v = parse_num(tok, line)?;
                // column-major order
                entries.push((k % rows.max(1), k / rows.max(1), v));
                k += 1;
            }
        }
        if k != rows * cols {
            return Err(Error::parse(
                sline,
                format!("expected {} values, found {k}", rows * cols),
            ));
        }
        Ok((rows, cols, entries))
    } else {
        let [rows, cols, nnz] = dims[..] else {
            return Err(Error::parse(
                sline,
                "coordinate size line needs rows, cols and entries",
            ));
        };
        for (line, l) in body {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(line, "expected `row col value`"));
            }
            let (i, j) = (parse_index(toks[0], line)?, parse_index(toks[1], line)?);
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(Error::parse(
                    line,
                    format!("entry ({i}, {j}) outside {rows}x{cols}"),
                ));
            }
            entries.push((i - 1, j - 1, parse_num(toks[2], line)?));
        }
        if entries.len() != nnz {
            return Err(Error::parse(
                sline,
                format!("declared {nnz} entries, found {}", entries.len()),
            ));
        }
        Ok((rows, cols, entries))
    }
}

pub fn parse_dense_matrix(text: &str) -> Result<DenseMatrix> {
    let (rows, cols, entries) = parse_matrix_market(text)?;
    let mut m = DenseMatrix::zeros(rows, cols);
    for (i, j, v) in entries {
        m[(i, j)] += v;
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix file"));
    }
    Ok(m)
}

pub fn parse_penalty(text: &str) -> Result<PenaltyMatrix> {
    PenaltyMatrix::from_dense(&parse_dense_matrix(text)?)
}

/// Matrix Market coordinate format, 1-based indices.
pub fn write_matrix_market(d: &PenaltyMatrix) -> String {
    let nnz: usize = d.rows().iter().map(Vec::len).sum();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", d.m(), d.p(), nnz);
    for (i, row) in d.rows().iter().enumerate() {
        for &(j, v) in row {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, fmt_num(v));
        }
    }
    out
}

pub const KNOTS_HEADER: &str = "k,lambda,event,coord,sign,df,rss,cp";

/// Knot diagnostics as CSV; the final row has event `end`.
pub fn write_diagnostics_csv(diag: &PathDiagnostics) -> String {
    let mut out = format!("{KNOTS_HEADER}\n");
    for r in &diag.rows {
        let (event, coord, sign) = match r.event {
            Some(e) => (e.name(), e.coord().to_string(), format!("{:+}", e.sign())),
            None => ("end", String::new(), String::new()),
        };
        let cp = r.cp.map(fmt_num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{event},{coord},{sign},{},{},{cp}",
            r.k,
            fmt_num(r.lambda),
            r.df,
            fmt_num(r.rss)
        );
    }
    out
}

pub const SEGMENTS_HEADER: &str = "segment,lambda_hi,lambda_lo,B,s,interior,a,b,nullity";

fn join<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(" ")
}

/// Segment file: a metadata comment line, a header, then one row per
/// segment with space-separated lists.
pub fn write_segments(path: &SolutionPath) -> String {
    let mut out = format!(
        "# m={} n={} termination={}\n{SEGMENTS_HEADER}\n",
        path.m,
        path.n,
        path.termination.name()
    );
    for (k, s) in path.segments.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            k + 1,
            fmt_num(s.lambda_hi),
            fmt_num(s.lambda_lo),
            join(&s.boundary.coords, |c| c.to_string()),
            join(&s.boundary.signs, |v| format!("{v:+}")),
            join(&s.interior, |c| c.to_string()),
            join(&s.a, |v| fmt_num(*v)),
            join(&s.b, |v| fmt_num(*v)),
            s.nullity
        );
    }
    out
}

fn parse_list<T>(field: &str, line: usize, f: impl Fn(&str, usize) -> Result<T>) -> Result<Vec<T>> {
    field.split_whitespace().map(|t| f(t, line)).collect()
}

/// Reads a segment file back into a path (without knot records).
pub fn parse_segments(text: &str) -> Result<SolutionPath> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, meta) = lines.next().ok_or(Error::parse(1, "empty segment file"))?;
    let mut m = None;
    let mut n = None;
    let mut termination = None;
    for kv in meta.trim_start_matches('#').split_whitespace() {
        match kv.split_once('=') {
            Some(("m", v)) => m = Some(parse_index(v, 1)?),
            Some(("n", v)) => n = Some(parse_index(v, 1)?),
            Some(("termination", v)) => {
                termination = Some(match v {
                    "reached_zero" => Termination::ReachedZero,
                    "max_steps" => Termination::MaxSteps,
                    "lambda_floor" => Termination::LambdaFloor,
                    _ => return Err(Error::parse(1, format!("unknown termination {v:?}"))),
                })
            }
            _ => {}
        }
    }
    let (Some(m), Some(n), Some(termination)) = (m, n, termination) else {
        return Err(Error::parse(1, "metadata line needs m, n and termination"));
    };
    match lines.next() {
        Some((_, h)) if h.trim() == SEGMENTS_HEADER => {}
        _ => {
            return Err(Error::parse(
                2,
                format!("expected header {SEGMENTS_HEADER:?}"),
            ))
        }
    }
    let mut segments = Vec::new();
    for (line, l) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 9 {
            return Err(Error::parse(
                line,
                format!("expected 9 fields, found {}", f.len()),
            ));
        }
        let coords = parse_list(f[3], line, parse_index)?;
        let signs = parse_list(f[4], line, |t, line| match t {
            "+1" | "1" => Ok(1i8),
            "-1" => Ok(-1),
            _ => Err(Error::parse(line, format!("bad sign {t:?}"))),
        })?;
        let boundary =
            BoundaryState::new(coords, signs).map_err(|e| Error::parse(line, e.to_string()))?;
        let seg = PathSegment {
            lambda_hi: parse_num(f[1], line)?,
            lambda_lo: parse_num(f[2], line)?,
            boundary,
            interior: parse_list(f[5], line, parse_index)?,
            a: parse_list(f[6], line, parse_num)?,
            b: parse_list(f[7], line, parse_num)?,
            nullity: parse_index(f[8].trim(), line)?,
        };
        if seg.a.len() != seg.interior.len() || seg.b.len() != seg.interior.len() {
            return Err(Error::parse(line, "a and b must match the interior list"));
        }
        if seg
            .interior
            .iter()
            .chain(&seg.boundary.coords)
            .any(|&c| c >= m)
        {
            return Err(Error::parse(line, format!("coordinate outside 0..{m}")));
        }
        segments.push(seg);
    }
    if segments.is_empty() {
        return Err(Error::parse(2, "no segments"));
    }
    Ok(SolutionPath {
        m,
        n,
        segments,
        knots: Vec::new(),
        termination,
        stats: PathStats::default(),
    })
}

pub const EVAL_QUANTITIES: [&str; 2] = ["beta", "fit"];

/// Evaluation table: one row per coordinate, one column per `λ` in the given order.
pub fn write_eval_csv(lambdas: &[f64], beta: &[Vec<f64>], fit: Option<&[Vec<f64>]>) -> String {
    let mut out = String::from("quantity,index");
    for &l in lambdas {
        let _ = write!(out, ",{}", fmt_num(l));
    }
    out.push('\n');
    let mut block = |name: &str, cols: &[Vec<f64>]| {
        let len = cols.first().map_or(0, Vec::len);
        for i in 0..len {
            let _ = write!(out, "{name},{i}");
            for c in cols {
                let _ = write!(out, ",{}", fmt_num(c[i]));
            }
            out.push('\n');
        }
    };
    block(EVAL_QUANTITIES[0], beta);
    if let Some(fit) = fit {
        block(EVAL_QUANTITIES[1], fit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{solve_dual_path, PathOptions};
    use crate::penalty::make_d1d;

    #[test]
    fn vectors() {
        assert_eq!(
            parse_vector("1\n# note\n2.5 # tail\n\n-3e-1\n").unwrap(),
            vec![1.0, 2.5, -0.3]
        );
        assert_eq!(
            parse_response("# nothing\n"),
            Err(Error::invalid("empty response"))
        );
        assert_eq!(
            parse_vector("1\nx\n"),
            Err(Error::parse(2, "not a number: \"x\""))
        );
    }

    #[test]
    fn edges_with_header() {
        let g = parse_edges("i,j\n0,1\n1,2\n", 3).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(parse_edges("0,1\n1\n", 3).is_err());
        assert!(parse_edges("0,5\n", 3).is_err());
    }

    #[test]
    fn matrix_market_round_trip() {
        let d = make_d1d(4);
        let text = write_matrix_market(&d);
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n3 4 6\n"));
        assert_eq!(parse_penalty(&text).unwrap(), d);
        let arr = "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n2\n3\n4\n";
        let m = parse_dense_matrix(arr).unwrap();
        assert_eq!(m.row(0), &[1.0, 3.0]);
        assert!(parse_dense_matrix(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"
        )
        .is_err());
    }

    #[test]
    fn segments_round_trip_bitwise() {
        let y = [0.31, -1.7, 2.25, 0.7, 0.123456789];
        let path = solve_dual_path(&y, &make_d1d(5), &PathOptions::default()).unwrap();
        let back = parse_segments(&write_segments(&path)).unwrap();
        assert_eq!(back.segments, path.segments);
        assert_eq!(back.termination, path.termination);
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
