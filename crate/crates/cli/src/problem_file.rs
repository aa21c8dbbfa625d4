//! Problem files: a TOML document with six keys.
//!
//! ```toml
//! name = "bvp2"
//! a = 0.0
//! b = 1.0
//! alpha = 0.5
//! beta = 0.333333333333333
//! coeffs = [0, 0, 0, 2]   # c_0, c_1, ..., c_d of p(y)
//! ```

use std::path::Path;

use homotopy_bvp::{BvpProblem, Polynomial};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid problem: {0}")]
    Validation(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: String,
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    coeffs: Vec<f64>,
}

pub fn parse_problem_file(path: impl AsRef<Path>) -> Result<BvpProblem, ProblemFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text)
}

pub fn parse_problem_str(text: &str) -> Result<BvpProblem, ProblemFileError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| ProblemFileError::Parse {
        line: e.span().map(|s| text[..s.start].lines().count().max(1)),
        message: e.message().to_string(),
    })?;

    for (field, v) in [("a", raw.a), ("b", raw.b), ("alpha", raw.alpha), ("beta", raw.beta)] {
        if !v.is_finite() {
            return Err(ProblemFileError::Validation(format!("{field} is not finite")));
        }
    }
    if let Some(i) = raw.coeffs.iter().position(|c| !c.is_finite()) {
        return Err(ProblemFileError::Validation(format!("coeffs[{i}] is not finite")));
    }
    match raw.coeffs.last() {
        None => return Err(ProblemFileError::Validation("coeffs is empty".into())),
        Some(&0.0) => {
            return Err(ProblemFileError::Validation(
                "leading coefficient c_d is zero".into(),
            ))
        }
        _ => {}
    }
    if raw.coeffs.len() < 2 {
        return Err(ProblemFileError::Validation(
            "p must have degree at least 1".into(),
        ));
    }
    BvpProblem::new(
        raw.name,
        raw.a,
        raw.b,
        raw.alpha,
        raw.beta,
        Polynomial::new(raw.coeffs),
    )
    .map_err(|e| ProblemFileError::Validation(e.to_string()))
}
