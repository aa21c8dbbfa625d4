//! Predictor-corrector continuation of a single homotopy path from `t = 1`
//! to `t = 0`, plus Newton refinement on the discretized system.

use num_complex::Complex64;

use crate::error::TrackError;
use crate::homotopy::HomotopyStage;
use crate::problem::{max_norm, BvpProblem, Origin, SolutionVector};

/// Step control and tolerances for [`track_path`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrackerConfig {
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// Relative Newton update size accepted by the corrector.
    pub newton_tol: f64,
    /// Iteration cap for the endpoint polish and the start correction.
    pub newton_max_iters: usize,
    /// Iteration cap for the corrector inside a step.
    pub corrector_max_iters: usize,
    pub max_steps: usize,
    /// A path is declared divergent once any coordinate exceeds this modulus.
    pub divergence_bound: f64,
    /// Residual (max norm) required of the polished endpoint.
    pub endpoint_tol: f64,
    /// Endpoints whose Jacobian condition number exceeds this are singular.
    pub singular_cond: f64,
    /// Consecutive accepted steps before the step grows.
    pub growth_after: usize,
    pub growth_factor: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            step_init: 1e-2,
            step_min: 1e-7,
            step_max: 0.1,
            newton_tol: 1e-10,
            newton_max_iters: 10,
            corrector_max_iters: 3,
            max_steps: 10_000,
            divergence_bound: 1e8,
            endpoint_tol: 1e-10,
            singular_cond: 1e8,
            growth_after: 4,
            growth_factor: 1.5,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackError> {
        let bad = |msg: &str| Err(TrackError::BadConfig(msg.to_string()));
        if !(0.0 < self.step_min && self.step_min <= self.step_init) {
            return bad("need 0 < step_min <= step_init");
        }
        if !(self.step_init <= self.step_max && self.step_max < 1.0) {
            return bad("need step_init <= step_max < 1");
        }
        if !(self.newton_tol > 0.0 && self.endpoint_tol > 0.0 && self.divergence_bound > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.singular_cond <= 1.0 {
            return bad("singular_cond must exceed 1");
        }
        if self.newton_max_iters == 0 || self.corrector_max_iters == 0 || self.max_steps == 0 {
            return bad("iteration caps must be positive");
        }
        if self.growth_factor < 1.0 {
            return bad("growth_factor must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathStatus {
    Converged,
    /// Coordinates exceeded the divergence bound: a path to infinity.
    Diverged,
    /// The step size collapsed below `step_min`.
    StepFailure,
    MaxSteps,
    /// Reached `t = 0` at a point where the Jacobian is numerically singular.
    Singular,
}

impl PathStatus {
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            PathStatus::StepFailure | PathStatus::MaxSteps | PathStatus::Singular
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub status: PathStatus,
    /// Last point reached; a solution of `D_{N+1}` when converged.
    pub endpoint: Vec<Complex64>,
    pub t_final: f64,
    pub steps_taken: usize,
    pub rejected_steps: usize,
    pub start_index: usize,
    /// Max-norm residual at the final point.
    pub residual: f64,
    /// Jacobian condition number at the endpoint (only computed at `t = 0`).
    pub condition: f64,
}

impl PathResult {
    pub fn solution(&self, stage: usize) -> Option<SolutionVector> {
        (self.status == PathStatus::Converged).then(|| {
            SolutionVector::new(
                self.endpoint.clone(),
                Origin {
                    stage,
                    path: self.start_index,
                },
            )
        })
    }
}

enum Correction {
    Converged(Vec<Complex64>),
    Failed,
}

/// Newton at frozen `t` with the in-step iteration cap. Fails on
/// non-contraction, a singular solve or a non-finite iterate.
fn correct(
    stage: &HomotopyStage<'_>,
    mut y: Vec<Complex64>,
    t: f64,
    tol: f64,
    max_iters: usize,
) -> Correction {
    let mut prev = f64::INFINITY;
    for _ in 0..max_iters {
        let r = stage.eval(&y, t);
        let Some(delta) = stage.jacobian_y(&y, t).solve(&r) else {
            return Correction::Failed;
        };
        let size = max_norm(&delta);
        if !size.is_finite() || size > prev {
            return Correction::Failed;
        }
        for (v, d) in y.iter_mut().zip(&delta) {
            *v -= d;
        }
        if size <= tol * (1.0 + max_norm(&y)) {
            return Correction::Converged(y);
        }
        prev = size;
    }
    Correction::Failed
}

/// Tangent `dy/dt = -(dH/dy)^{-1} dH/dt`.
fn tangent(stage: &HomotopyStage<'_>, y: &[Complex64], t: f64) -> Option<Vec<Complex64>> {
    let ht = stage.dh_dt(y, t);
    let v = stage.jacobian_y(y, t).solve(&ht)?;
    Some(v.into_iter().map(|z| -z).collect())
}

/// Tracks the path through `start` (a solution at `t = 1`) down to `t = 0`.
///
/// Euler predictor along the tangent, Newton corrector at the new `t`.
/// Failed corrections halve the step; `growth_after` consecutive
/// successes grow it by `growth_factor`, capped at `step_max`. At `t = 0`
/// the endpoint is polished to `endpoint_tol` and its conditioning checked.
pub fn track_path(
    stage: &HomotopyStage<'_>,
    start: &[Complex64],
    start_index: usize,
    cfg: &TrackerConfig,
) -> PathResult {
    let finish = |status, endpoint: Vec<Complex64>, t: f64, steps, rejected, condition| {
        let residual = max_norm(&stage.eval(&endpoint, t));
        PathResult {
            status,
            endpoint,
            t_final: t,
            steps_taken: steps,
            rejected_steps: rejected,
            start_index,
            residual,
            condition,
        }
    };

    let mut t = 1.0;
    let mut y = match correct(stage, start.to_vec(), t, cfg.newton_tol, cfg.newton_max_iters) {
        Correction::Converged(y) => y,
        Correction::Failed => {
            return finish(PathStatus::StepFailure, start.to_vec(), t, 0, 0, f64::NAN);
        }
    };
    let mut dt = cfg.step_init;
    let mut streak = 0;
    let mut steps = 0;
    let mut rejected = 0;

    while t > 0.0 {
        if steps + rejected >= cfg.max_steps {
            return finish(PathStatus::MaxSteps, y, t, steps, rejected, f64::NAN);
        }
        let step = dt.min(t);
        // Land exactly on t = 0 when the remaining interval is taken whole.
        let t_next = if step >= t { 0.0 } else { t - step };
        let accepted = tangent(stage, &y, t).and_then(|dydt| {
            let predicted: Vec<Complex64> =
                y.iter().zip(&dydt).map(|(v, d)| v - step * d).collect();
            match correct(stage, predicted, t_next, cfg.newton_tol, cfg.corrector_max_iters) {
                Correction::Converged(v) => Some(v),
                Correction::Failed => None,
            }
        });
        match accepted {
            Some(next) => {
                y = next;
                t = t_next;
                steps += 1;
                if max_norm(&y) > cfg.divergence_bound {
                    return finish(PathStatus::Diverged, y, t, steps, rejected, f64::NAN);
                }
                streak += 1;
                if streak >= cfg.growth_after {
                    dt = (dt * cfg.growth_factor).min(cfg.step_max);
                    streak = 0;
                }
            }
            None => {
                rejected += 1;
                streak = 0;
                dt *= 0.5;
                if dt < cfg.step_min {
                    return finish(PathStatus::StepFailure, y, t, steps, rejected, f64::NAN);
                }
            }
        }
    }

    let polished = polish_endpoint(stage, y.clone(), cfg);
    let condition = stage.jacobian_y(&polished.0, 0.0).condition_inf();
    let status = if condition > cfg.singular_cond {
        PathStatus::Singular
    } else if polished.1 {
        PathStatus::Converged
    } else {
        PathStatus::StepFailure
    };
    finish(status, polished.0, 0.0, steps, rejected, condition)
}

/// Newton on `H(., 0)` until the residual drops below `endpoint_tol`.
fn polish_endpoint(
    stage: &HomotopyStage<'_>,
    mut y: Vec<Complex64>,
    cfg: &TrackerConfig,
) -> (Vec<Complex64>, bool) {
    for _ in 0..cfg.newton_max_iters {
        let r = stage.eval(&y, 0.0);
        if max_norm(&r) < cfg.endpoint_tol {
            return (y, true);
        }
        let Some(delta) = stage.jacobian_y(&y, 0.0).solve(&r) else {
            return (y, false);
        };
        for (v, d) in y.iter_mut().zip(&delta) {
            *v -= d;
        }
    }
    let ok = max_norm(&stage.eval(&y, 0.0)) < cfg.endpoint_tol;
    (y, ok)
}

/// Newton's method on `D_N` until `|r|_inf < tol`.
pub fn newton_refine(
    prob: &BvpProblem,
    y: &SolutionVector,
    tol: f64,
    max_iters: usize,
) -> Result<SolutionVector, TrackError> {
    newton_refine_counted(prob, y, tol, max_iters).map(|(v, _)| v)
}

/// Same as [`newton_refine`], also returning the number of iterations used.
pub fn newton_refine_counted(
    prob: &BvpProblem,
    y: &SolutionVector,
    tol: f64,
    max_iters: usize,
) -> Result<(SolutionVector, usize), TrackError> {
    let mut values = y.values.clone();
    let mut residual = max_norm(&prob.residual(&values));
    let mut iters = 0;
    while residual >= tol && iters < max_iters {
        let r = prob.residual(&values);
        let delta = prob
            .jacobian(&values)
            .solve(&r)
            .ok_or(TrackError::NoConvergence { iters, residual })?;
        for (v, d) in values.iter_mut().zip(&delta) {
            *v -= d;
        }
        iters += 1;
        residual = max_norm(&prob.residual(&values));
        if !residual.is_finite() {
            break;
        }
    }
    if residual < tol {
        let refined = SolutionVector {
            values,
            ..y.clone()
        };
        Ok((refined, iters))
    } else {
        Err(TrackError::NoConvergence { iters, residual })
    }
}
