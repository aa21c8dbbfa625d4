//! File formats written by a run.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use homotopy_bvp::{
    third_derivative_score, BvpProblem, Complex64, FilterKind, FilterSpec, Origin, SolutionVector,
    StageReport, StageSet,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

const SUMMARY_COLUMNS: [&str; 8] = ["N", "SOLS", "REAL", "paths", "diverged", "failures", "kept", "kept_real"];
const SUMMARY_WIDTHS: [usize; 8] = [4, 10, 8, 10, 10, 10, 10, 10];

pub fn describe_filter(filter: &FilterSpec) -> String {
    match filter.kind {
        FilterKind::None => "none".to_string(),
        FilterKind::Symmetry => format!("sym(eps_sym={:.6e}) from N={}", filter.eps_sym, filter.start_at_n),
        FilterKind::ThirdDerivative => format!("yppp(eps2={:.6e}) from N={}", filter.eps2, filter.start_at_n),
        FilterKind::Conjunction => format!(
            "sym(eps_sym={:.6e}) and yppp(eps2={:.6e}) from N={}",
            filter.eps_sym, filter.eps2, filter.start_at_n
        ),
    }
}

/// Comment lines and column header of `summary.txt`.
pub fn summary_header(prob: &BvpProblem, seed: u64, filter: &FilterSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# problem: {}", prob.name);
    let _ = writeln!(
        out,
        "# interval: [{:.6e}, {:.6e}]  alpha: {:.6e}  beta: {:.6e}",
        prob.a, prob.b, prob.alpha, prob.beta
    );
    let _ = writeln!(out, "# rhs: {}", prob.rhs());
    let _ = writeln!(out, "# seed: {seed}");
    let _ = writeln!(out, "# filter: {}", describe_filter(filter));
    let cells: Vec<String> = SUMMARY_COLUMNS
        .iter()
        .zip(SUMMARY_WIDTHS)
        .map(|(c, w)| format!("{c:>w$}"))
        .collect();
    out.push_str(&cells.join(" "));
    out.push('\n');
    out
}

pub fn summary_row(r: &StageReport) -> String {
    let values = [r.n, r.sols, r.reals, r.paths_tracked, r.diverged, r.failures, r.kept, r.kept_reals];
    let cells: Vec<String> = values
        .iter()
        .zip(SUMMARY_WIDTHS)
        .map(|(v, w)| format!("{v:>w$}"))
        .collect();
    cells.join(" ") + "\n"
}

/// Parses the table rows of a summary back into `(N, SOLS, REAL, paths,
/// diverged, failures, kept, kept_real)` tuples.
pub fn parse_summary_rows(text: &str) -> Vec<[usize; 8]> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|s| s.parse().ok()).collect::<Option<_>>()?;
            v.try_into().ok()
        })
        .collect()
}

/// One row of `stage_<N>_solutions.csv`: one mesh point of one solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub solution: usize,
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub is_real: bool,
    /// Whether the solution was carried into the next stage.
    pub kept: bool,
    /// Discrete `y''' - p'(y) y'` mismatch.
    pub filter_score: f64,
}

#[derive(Serialize)]
struct SolutionRecord<'a> {
    solution: usize,
    x: &'a str,
    re: &'a str,
    im: &'a str,
    is_real: bool,
    kept: bool,
    filter_score: &'a str,
}

/// 17 significant digits.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_solutions_csv(path: &Path, prob: &BvpProblem, set: &StageSet) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    let mesh = prob.mesh(set.n);
    let all = set
        .solutions
        .iter()
        .map(|y| (y, true))
        .chain(set.discarded.iter().map(|y| (y, false)));
    for (k, (y, kept)) in all.enumerate() {
        let score = full(third_derivative_score(prob, y));
        for (i, v) in y.values.iter().enumerate() {
            w.serialize(SolutionRecord {
                solution: k,
                x: &full(mesh.node(i + 1)),
                re: &full(v.re),
                im: &full(v.im),
                is_real: y.is_real,
                kept,
                filter_score: &score,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a solutions CSV back, grouping rows by the `solution` column.
pub fn read_solutions_csv(path: &Path) -> Result<Vec<(SolutionVector, bool)>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out: Vec<(usize, SolutionVector, bool)> = Vec::new();
    for row in r.deserialize() {
        let row: SolutionRow = row?;
        let z = Complex64::new(row.re, row.im);
        match out.last_mut() {
            Some((k, y, _)) if *k == row.solution => y.values.push(z),
            _ => {
                let mut y = SolutionVector::new(vec![z], Origin::default());
                y.is_real = row.is_real;
                out.push((row.solution, y, row.kept));
            }
        }
    }
    Ok(out.into_iter().map(|(_, y, kept)| (y, kept)).collect())
}

/// One row of `errors.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub max_error: f64,
    pub h2: f64,
    pub ratio: f64,
}

/// Smallest max-norm error against the exact solution over the real
/// solutions of a stage. `None` without an exact solution or real solutions.
pub fn error_row(prob: &BvpProblem, set: &StageSet) -> Option<ErrorRow> {
    let max_error = set
        .real_solutions()
        .filter_map(|y| prob.max_error_vs_exact(&y.values).ok())
        .min_by(f64::total_cmp)?;
    let h = prob.mesh(set.n).h();
    Some(ErrorRow {
        n: set.n,
        max_error,
        h2: h * h,
        ratio: max_error / (h * h),
    })
}

pub fn error_csv_header() -> &'static str {
    "N,max_error,h2,ratio\n"
}

pub fn error_csv_line(row: &ErrorRow) -> String {
    format!("{},{:.6e},{:.6e},{:.6e}\n", row.n, row.max_error, row.h2, row.ratio)
}

/// Two columns `x y`, boundary points included.
pub fn write_plot_data(path: &Path, prob: &BvpProblem, y: &SolutionVector) -> Result<(), CliError> {
    let mesh = prob.mesh(y.n());
    let mut out = String::new();
    let ys = std::iter::once(prob.alpha)
        .chain(y.values.iter().map(|v| v.re))
        .chain(std::iter::once(prob.beta));
    for (x, v) in mesh.nodes().into_iter().zip(ys) {
        let _ = writeln!(out, "{} {}", full(x), full(v));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
