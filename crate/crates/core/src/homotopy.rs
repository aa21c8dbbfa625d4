//! The gamma-deformed mesh-refinement homotopy linking `D_N` (at `t = 1`,
//! with one extra free coordinate) to `D_{N+1}` (at `t = 0`).
//!
//! With `h0 = (b-a)/(N+1)`, `h1 = (b-a)/(N+2)` and a unit complex `gamma`:
//!
//! ```text
//! G(t)  = gamma^2 t + (1 - t)
//! h(t)  = gamma t h0 + (1 - t) h1
//! Y(t)  = (1 - t) y_{N+1} + gamma^2 beta t
//!
//! row i < N : G(t) (y_{i-1} - 2 y_i + y_{i+1})     - h(t)^2 p(y_i)
//! row N     : G(t) (y_{N-1} - 2 y_N) + Y(t)        - h(t)^2 p(y_N)
//! row N+1   : G(t) (y_N - 2 y_{N+1} + beta)        - h(t)^2 p(y_{N+1})
//! ```
//!
//! The tail value beyond the new node is held at `beta` for all `t`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::HomotopyError;
use crate::linalg::Tridiagonal;
use crate::poly::ComplexPolynomial;
use crate::problem::BvpProblem;

/// Frozen homotopy for one refinement `N -> N + 1`.
#[derive(Clone, Debug)]
pub struct HomotopyStage<'a> {
    prob: &'a BvpProblem,
    /// Interior count of the coarse mesh; the homotopy has `n + 1` unknowns.
    n: usize,
    gamma: Complex64,
    gamma2: Complex64,
    h0: f64,
    h1: f64,
}

impl<'a> HomotopyStage<'a> {
    pub fn new(prob: &'a BvpProblem, n: usize, gamma: Complex64) -> Result<Self, HomotopyError> {
        let bad = || HomotopyError::BadGamma {
            re: gamma.re,
            im: gamma.im,
        };
        if !gamma.is_finite() || (gamma.norm() - 1.0).abs() > 1e-12 {
            return Err(bad());
        }
        if gamma.im.abs() < 1e-12 {
            return Err(bad());
        }
        assert!(n >= 1, "the coarse mesh needs at least one interior node");
        let width = prob.b - prob.a;
        Ok(Self {
            prob,
            n,
            gamma,
            gamma2: gamma * gamma,
            h0: width / (n + 1) as f64,
            h1: width / (n + 2) as f64,
        })
    }

    /// Same as [`new`](Self::new) without the genericity checks on `gamma`.
    /// Only meant for exercising degenerate limits in tests.
    #[doc(hidden)]
    pub fn new_unchecked(prob: &'a BvpProblem, n: usize, gamma: Complex64) -> Self {
        let width = prob.b - prob.a;
        Self {
            prob,
            n,
            gamma,
            gamma2: gamma * gamma,
            h0: width / (n + 1) as f64,
            h1: width / (n + 2) as f64,
        }
    }

    pub fn problem(&self) -> &'a BvpProblem {
        self.prob
    }

    /// Coarse interior count `N`.
    pub fn coarse_n(&self) -> usize {
        self.n
    }

    /// Number of unknowns, `N + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn big_gamma(&self, t: f64) -> Complex64 {
        self.gamma2 * t + (1.0 - t)
    }

    pub fn h(&self, t: f64) -> Complex64 {
        self.gamma * (t * self.h0) + (1.0 - t) * self.h1
    }

    /// Moving boundary value `Y_{N+1}(t)`.
    pub fn tail(&self, y_last: Complex64, t: f64) -> Complex64 {
        (1.0 - t) * y_last + self.gamma2 * (self.prob.beta * t)
    }

    /// Node positions `x_i(t) = a + i h(t)`. Unused by `p(y)`-only
    /// right-hand sides.
    pub fn node(&self, i: usize, t: f64) -> Complex64 {
        self.prob.a + self.h(t) * i as f64
    }

    fn check_len(&self, y: &[Complex64]) {
        assert_eq!(y.len(), self.dim(), "homotopy expects N + 1 unknowns");
    }

    pub fn eval(&self, y: &[Complex64], t: f64) -> Vec<Complex64> {
        self.check_len(y);
        let n = self.n;
        let g = self.big_gamma(t);
        let h = self.h(t);
        let h2 = h * h;
        let alpha = Complex64::new(self.prob.alpha, 0.0);
        let beta = Complex64::new(self.prob.beta, 0.0);
        let p = self.prob.rhs();
        (0..=n)
            .map(|i| {
                let left = if i == 0 { alpha } else { y[i - 1] };
                let source = h2 * p.eval(y[i]);
                if i + 1 < n {
                    g * (left - 2.0 * y[i] + y[i + 1]) - source
                } else if i + 1 == n {
                    g * (left - 2.0 * y[i]) + self.tail(y[n], t) - source
                } else {
                    g * (left - 2.0 * y[i] + beta) - source
                }
            })
            .collect()
    }

    /// `dH/dy`, tridiagonal of size `N + 1`.
    pub fn jacobian_y(&self, y: &[Complex64], t: f64) -> Tridiagonal {
        self.check_len(y);
        let n = self.n;
        let g = self.big_gamma(t);
        let h = self.h(t);
        let h2 = h * h;
        let dp = self.prob.rhs_prime();
        let diag = y.iter().map(|&v| -2.0 * g - h2 * dp.eval(v)).collect();
        let sub = vec![g; n];
        let mut sup = vec![g; n];
        // Row N couples to y_{N+1} only through Y_{N+1}(t).
        sup[n - 1] = Complex64::new(1.0 - t, 0.0);
        Tridiagonal::new(sub, diag, sup)
    }

    /// `dH/dt` at fixed `y`.
    pub fn dh_dt(&self, y: &[Complex64], t: f64) -> Vec<Complex64> {
        self.check_len(y);
        let n = self.n;
        let dg = self.gamma2 - 1.0;
        let h = self.h(t);
        let dh = self.gamma * self.h0 - self.h1;
        let dh2 = 2.0 * h * dh;
        let alpha = Complex64::new(self.prob.alpha, 0.0);
        let beta = Complex64::new(self.prob.beta, 0.0);
        let p = self.prob.rhs();
        let dtail = -y[n] + self.gamma2 * beta;
        (0..=n)
            .map(|i| {
                let left = if i == 0 { alpha } else { y[i - 1] };
                let source = dh2 * p.eval(y[i]);
                if i + 1 < n {
                    dg * (left - 2.0 * y[i] + y[i + 1]) - source
                } else if i + 1 == n {
                    dg * (left - 2.0 * y[i]) + dtail - source
                } else {
                    dg * (left - 2.0 * y[i] + beta) - source
                }
            })
            .collect()
    }

    /// `(y_N + beta) - 2 z - h0^2 p(z)`: the last row at `t = 1` divided by
    /// `gamma^2`, as a polynomial in the new coordinate `z = y_{N+1}`.
    pub fn start_polynomial(&self, y_n: Complex64) -> Result<ComplexPolynomial, HomotopyError> {
        let h02 = self.h0 * self.h0;
        let mut coeffs: Vec<Complex64> = self
            .prob
            .rhs()
            .coeffs()
            .iter()
            .map(|&c| Complex64::new(-h02 * c, 0.0))
            .collect();
        coeffs[0] += y_n + self.prob.beta;
        coeffs[1] -= 2.0;
        let poly = ComplexPolynomial::new(coeffs);
        if poly.degree() != self.prob.degree() || poly.leading().norm() < f64::MIN_POSITIVE {
            return Err(HomotopyError::DegenerateStart(
                crate::error::PolyError::ZeroLeadingCoefficient,
            ));
        }
        Ok(poly)
    }

    /// The `d` start points of `H(., 1) = 0` above one coarse solution.
    pub fn start_points(&self, coarse: &[Complex64]) -> Result<Vec<Vec<Complex64>>, HomotopyError> {
        assert_eq!(coarse.len(), self.n);
        let roots = self.start_polynomial(coarse[self.n - 1])?.all_roots()?;
        Ok(roots
            .into_iter()
            .map(|z| {
                let mut v = coarse.to_vec();
                v.push(z);
                v
            })
            .collect())
    }
}

/// Smallest and largest admissible `|arg gamma|`.
pub const GAMMA_ARG_MIN: f64 = std::f64::consts::PI / 32.0;
pub const GAMMA_ARG_MAX: f64 = std::f64::consts::FRAC_PI_4;

/// Draws `gamma` on the unit circle with `|arg gamma|` uniform in
/// `[GAMMA_ARG_MIN, GAMMA_ARG_MAX]` and a random sign.
///
/// `Re(gamma^2) >= 0` keeps `|G(t)| >= 1/sqrt(2)` along the whole path, and
/// `Re(gamma) > 0` keeps `h(t)` away from zero. Near `arg gamma^2 = pi` the
/// stencil coefficient almost vanishes mid-path and real starts stop landing
/// on real endpoints.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let magnitude = GAMMA_ARG_MIN + rng.random::<f64>() * (GAMMA_ARG_MAX - GAMMA_ARG_MIN);
    let theta = if rng.random::<bool>() { magnitude } else { -magnitude };
    Complex64::from_polar(1.0, theta)
}
