//! Named benchmark problems. All live on `[0, 1]`.

use crate::error::ProblemError;
use crate::poly::Polynomial;

use super::BvpProblem;

/// Names accepted by [`preset`], with whether they take `lambda`.
pub const PRESETS: &[(&str, bool)] = &[
    ("bvp2", false),
    ("bvp3", true),
    ("bvp4", true),
    ("duffing3", true),
    ("duffing5", true),
    ("bratu2", true),
];

/// `y'' = 2 y^3`, `y(0) = 1/2`, `y(1) = 1/3`; unique solution `1 / (x + 2)`.
pub fn bvp2() -> BvpProblem {
    BvpProblem::new(
        "bvp2",
        0.0,
        1.0,
        0.5,
        1.0 / 3.0,
        Polynomial::new(vec![0.0, 0.0, 0.0, 2.0]),
    )
    .expect("valid preset")
    .with_exact_solution(|x| 1.0 / (x + 2.0))
}

/// `y'' = -lambda (1 + y^2)` with zero boundary values.
pub fn bvp3(lambda: f64) -> Result<BvpProblem, ProblemError> {
    let lambda = positive("bvp3", lambda)?;
    zero_bc(format!("bvp3(lambda={lambda})"), vec![-lambda, 0.0, -lambda])
}

/// `y'' = -lambda y^3` with zero boundary values.
pub fn bvp4(lambda: f64) -> Result<BvpProblem, ProblemError> {
    let lambda = positive("bvp4", lambda)?;
    zero_bc(format!("bvp4(lambda={lambda})"), vec![0.0, 0.0, 0.0, -lambda])
}

/// Two-term sine truncation: `y'' = -lambda (y - y^3 / 6)`.
pub fn duffing3(lambda: f64) -> Result<BvpProblem, ProblemError> {
    let lambda = positive("duffing3", lambda)?;
    zero_bc(
        format!("duffing3(lambda={lambda})"),
        vec![0.0, -lambda, 0.0, lambda / 6.0],
    )
}

/// Three-term sine truncation: `y'' = -lambda (y - y^3 / 6 + y^5 / 120)`.
pub fn duffing5(lambda: f64) -> Result<BvpProblem, ProblemError> {
    let lambda = positive("duffing5", lambda)?;
    zero_bc(
        format!("duffing5(lambda={lambda})"),
        vec![0.0, -lambda, 0.0, lambda / 6.0, 0.0, -lambda / 120.0],
    )
}

/// Quadratic exponential truncation: `y'' = -lambda (1 + y + y^2 / 2)`.
pub fn bratu2(lambda: f64) -> Result<BvpProblem, ProblemError> {
    let lambda = positive("bratu2", lambda)?;
    zero_bc(
        format!("bratu2(lambda={lambda})"),
        vec![-lambda, -lambda, -lambda / 2.0],
    )
}

/// Looks up a preset by name.
pub fn preset(name: &str, lambda: Option<f64>) -> Result<BvpProblem, ProblemError> {
    let need = |name: &str| {
        lambda.ok_or_else(|| ProblemError::BadParameter {
            name: name.to_string(),
            reason: "lambda is required".into(),
        })
    };
    match name {
        "bvp2" => Ok(bvp2()),
        "bvp3" => bvp3(need(name)?),
        "bvp4" => bvp4(need(name)?),
        "duffing3" => duffing3(need(name)?),
        "duffing5" => duffing5(need(name)?),
        "bratu2" => bratu2(need(name)?),
        other => Err(ProblemError::UnknownPreset(other.to_string())),
    }
}

fn positive(name: &str, lambda: f64) -> Result<f64, ProblemError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(ProblemError::BadParameter {
            name: name.to_string(),
            reason: format!("lambda must be positive and finite, got {lambda}"),
        })
    }
}

fn zero_bc(name: String, coeffs: Vec<f64>) -> Result<BvpProblem, ProblemError> {
    BvpProblem::new(name, 0.0, 1.0, 0.0, 0.0, Polynomial::new(coeffs))
}
