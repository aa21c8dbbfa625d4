//! Univariate polynomials evaluated over the complex numbers.
//!
//! [`Polynomial`] carries real coefficients (the right-hand sides `p(y)`),
//! [`ComplexPolynomial`] carries complex ones (start polynomials built from a
//! complex coordinate). Both expose all-roots computation through a shared
//! Aberth–Ehrlich iteration.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::PolyError;

/// Relative residual tolerance required of every computed root.
pub const ROOT_TOL: f64 = 1e-12;
/// Sweep cap for the simultaneous iteration.
pub const MAX_SWEEPS: usize = 200;

/// Real-coefficient polynomial `c_0 + c_1 y + ... + c_d y^d`.
///
/// Trailing zero coefficients are trimmed on construction, so `degree()` is
/// always the index of the last nonzero coefficient (or 0 for the zero
/// polynomial, stored as `[0.0]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// Ascending coefficients `c_0..c_d`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect::<Vec<_>>(),
        )
    }

    /// Scales every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect::<Vec<_>>())
    }

    pub fn to_complex(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(
            self.coeffs
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// All `d` complex roots, sorted by real part then imaginary part.
    pub fn all_roots(&self) -> Result<Vec<Complex64>, PolyError> {
        self.to_complex().all_roots()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*y")?,
                _ => write!(f, "{c}*y^{k}")?,
            }
        }
        Ok(())
    }
}

/// Complex-coefficient polynomial, used for start-point generation.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: impl Into<Vec<Complex64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm_sqr() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Rounding-level bound on `|p(z)|`: `sum |c_k| |z|^k`.
    fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All `d` complex roots via Aberth–Ehrlich iteration.
    ///
    /// Each returned root satisfies `|p(root)| <= ROOT_TOL * (1 + max |c_k|)`.
    /// Multiple roots come back as numerically clustered values.
    pub fn all_roots(&self) -> Result<Vec<Complex64>, PolyError> {
        let d = self.degree();
        if d == 0 {
            return Err(PolyError::DegreeTooLow);
        }
        let lead = self.leading();
        if !lead.is_finite() || lead.norm() < f64::MIN_POSITIVE {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        if d == 1 {
            return Ok(vec![-self.coeffs[0] / lead]);
        }

        let mut roots = initial_guesses(&self.coeffs);
        let mut done = vec![false; d];
        let mut sweeps = 0;
        while sweeps < MAX_SWEEPS && done.iter().any(|c| !c) {
            sweeps += 1;
            for k in 0..d {
                if done[k] {
                    continue;
                }
                let z = roots[k];
                let (p, dp) = self.eval_with_derivative(z);
                // Stop once the residual is at rounding level.
                if p.norm() <= 4.0 * f64::EPSILON * self.abs_eval(z.norm()) {
                    done[k] = true;
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &w)| (z - w).inv())
                    .sum();
                let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if !step.is_finite() {
                    step = ratio;
                }
                if !step.is_finite() {
                    return Err(PolyError::NonConvergence { sweeps });
                }
                roots[k] = z - step;
                if step.norm() <= 1e-15 * (1.0 + roots[k].norm()) {
                    done[k] = true;
                }
            }
        }

        let bound = ROOT_TOL * (1.0 + self.max_coeff());
        for r in &roots {
            let res = self.eval(*r).norm();
            // Large roots can only be resolved to rounding level.
            let rounding = 8.0 * f64::EPSILON * self.abs_eval(r.norm());
            if !r.is_finite() || (res > bound && res > rounding) {
                return Err(PolyError::NonConvergence { sweeps });
            }
        }
        sort_roots(&mut roots);
        Ok(roots)
    }
}

/// Points on a circle around the root centroid, with radius from the
/// Fujiwara-style bound `2 max |c_{d-k}/c_d|^{1/k}`.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let center = -coeffs[d - 1] / (lead * d as f64);
    let radius = (1..=d)
        .map(|k| (coeffs[d - k] / lead).norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    // Offset angle keeps the initial configuration off the real axis and
    // away from any symmetry of the coefficients.
    let offset = 0.4;
    (0..d)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / d as f64 + offset;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Deterministic order: ascending real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}
