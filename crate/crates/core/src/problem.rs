//! Polynomial two-point boundary value problems `y'' = p(y)` and their
//! central-difference discretizations.

use std::fmt;

use num_complex::Complex64;

use crate::error::ProblemError;
use crate::linalg::Tridiagonal;
use crate::poly::Polynomial;

pub mod presets;

/// Closed-form solution `x -> y(x)`, used only for error tables.
pub type ExactSolution = fn(f64) -> f64;

/// `y'' = p(y)` on `[a, b]` with `y(a) = alpha`, `y(b) = beta`.
#[derive(Clone)]
pub struct BvpProblem {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    rhs: Polynomial,
    rhs_prime: Polynomial,
    pub exact_solution: Option<ExactSolution>,
}

impl fmt::Debug for BvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpProblem")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("rhs", &self.rhs)
            .field("exact_solution", &self.exact_solution.is_some())
            .finish()
    }
}

impl BvpProblem {
    pub fn new(
        name: impl Into<String>,
        a: f64,
        b: f64,
        alpha: f64,
        beta: f64,
        rhs: Polynomial,
    ) -> Result<Self, ProblemError> {
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(ProblemError::BadInterval { a, b });
        }
        if rhs.degree() < 1 {
            return Err(ProblemError::DegreeTooLow(rhs.degree()));
        }
        let rhs_prime = rhs.derivative();
        Ok(Self {
            name: name.into(),
            a,
            b,
            alpha,
            beta,
            rhs,
            rhs_prime,
            exact_solution: None,
        })
    }

    pub fn with_exact_solution(mut self, exact: ExactSolution) -> Self {
        self.exact_solution = Some(exact);
        self
    }

    pub fn rhs(&self) -> &Polynomial {
        &self.rhs
    }

    pub fn rhs_prime(&self) -> &Polynomial {
        &self.rhs_prime
    }

    /// Degree `d` of the right-hand side; every stage multiplies the
    /// Bézout count by `d`.
    pub fn degree(&self) -> usize {
        self.rhs.degree()
    }

    pub fn mesh(&self, n: usize) -> Mesh {
        Mesh::new(self.a, self.b, n)
    }

    /// Rows `y_{i-1} - 2 y_i + y_{i+1} - h^2 p(y_i)` of `D_N`, with the
    /// boundary values substituted for `y_0` and `y_{N+1}`.
    pub fn residual(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = y.len();
        let h = self.mesh(n).h();
        let h2 = h * h;
        let alpha = Complex64::new(self.alpha, 0.0);
        let beta = Complex64::new(self.beta, 0.0);
        (0..n)
            .map(|i| {
                let left = if i == 0 { alpha } else { y[i - 1] };
                let right = if i + 1 == n { beta } else { y[i + 1] };
                left - 2.0 * y[i] + right - h2 * self.rhs.eval(y[i])
            })
            .collect()
    }

    /// Jacobian of [`residual`](Self::residual): unit off-diagonals and
    /// `-2 - h^2 p'(y_i)` on the diagonal.
    pub fn jacobian(&self, y: &[Complex64]) -> Tridiagonal {
        let n = y.len();
        let h = self.mesh(n).h();
        let h2 = h * h;
        let one = Complex64::new(1.0, 0.0);
        Tridiagonal::new(
            vec![one; n.saturating_sub(1)],
            y.iter()
                .map(|&v| -2.0 - h2 * self.rhs_prime.eval(v))
                .collect(),
            vec![one; n.saturating_sub(1)],
        )
    }

    /// `max_i |Re(y_i) - y_exact(x_i)|` over the interior nodes.
    pub fn max_error_vs_exact(&self, y: &[Complex64]) -> Result<f64, ProblemError> {
        let exact = self
            .exact_solution
            .ok_or_else(|| ProblemError::MissingExactSolution(self.name.clone()))?;
        let mesh = self.mesh(y.len());
        Ok(y.iter()
            .enumerate()
            .map(|(i, v)| (v.re - exact(mesh.node(i + 1))).abs())
            .fold(0.0, f64::max))
    }
}

/// Uniform mesh with `n` interior points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Mesh {
    pub fn new(a: f64, b: f64, n: usize) -> Self {
        Self { a, b, n }
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n + 1) as f64
    }

    /// Node `x_i`, `i = 0..=n+1`. The right endpoint is returned exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    /// All `n + 2` nodes including both endpoints.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n + 1).map(|i| self.node(i)).collect()
    }
}

/// Which stage and path produced a solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Origin {
    pub stage: usize,
    pub path: usize,
}

/// One point of `V_N`: values at the interior nodes plus bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionVector {
    pub values: Vec<Complex64>,
    pub is_real: bool,
    pub origin: Origin,
}

impl SolutionVector {
    pub fn new(values: Vec<Complex64>, origin: Origin) -> Self {
        Self {
            values,
            is_real: false,
            origin,
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Origin::default(),
        )
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    /// Max-norm distance; vectors of different length are infinitely apart.
    pub fn distance(&self, other: &SolutionVector) -> f64 {
        max_norm_distance(&self.values, &other.values)
    }
}

pub fn max_norm_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
