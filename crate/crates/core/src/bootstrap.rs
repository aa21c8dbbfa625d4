//! Stage-by-stage mesh refinement: solve `D_1` directly, then repeatedly
//! lift every retained solution of `D_N` to start points of the homotopy
//! towards `D_{N+1}`, track them, and filter what comes out.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homotopy::{sample_gamma, HomotopyStage};
use crate::poly::Polynomial;
use crate::problem::{BvpProblem, Mesh, Origin, SolutionVector};
use crate::tracker::{newton_refine, track_path, PathStatus, TrackerConfig};

pub const DEFAULT_EPS_REAL: f64 = 1e-8;
pub const DEFAULT_DEDUP_TOL: f64 = 1e-8;
pub const DEFAULT_EPS_SYM: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterKind {
    None,
    /// Keep `||y_1| - |y_N|| < eps_sym`.
    Symmetry,
    /// Keep solutions whose discrete `y''' - p'(y) y'` mismatch is at most `eps2`.
    ThirdDerivative,
    /// Both of the above.
    Conjunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub eps_sym: f64,
    pub eps2: f64,
    /// First stage `N` at which the filter is applied.
    pub start_at_n: usize,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl FilterSpec {
    pub fn none() -> Self {
        Self {
            kind: FilterKind::None,
            eps_sym: DEFAULT_EPS_SYM,
            eps2: f64::INFINITY,
            start_at_n: 1,
        }
    }

    pub fn symmetry(start_at_n: usize) -> Self {
        Self {
            kind: FilterKind::Symmetry,
            start_at_n,
            ..Self::none()
        }
    }

    pub fn third_derivative(eps2: f64, start_at_n: usize) -> Self {
        Self {
            kind: FilterKind::ThirdDerivative,
            eps2,
            start_at_n,
            ..Self::none()
        }
    }

    pub fn active_at(&self, n: usize) -> bool {
        self.kind != FilterKind::None && n >= self.start_at_n
    }

    /// Whether `y` survives the filter (ignoring `start_at_n`).
    pub fn keeps(&self, prob: &BvpProblem, y: &SolutionVector) -> bool {
        let sym = || y.n() < 2 || filter_symmetry(y, self.eps_sym);
        let ypp = || filter_third_derivative(prob, y, self.eps2);
        match self.kind {
            FilterKind::None => true,
            FilterKind::Symmetry => sym(),
            FilterKind::ThirdDerivative => ypp(),
            FilterKind::Conjunction => sym() && ypp(),
        }
    }
}

/// When to stop refining.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Run until `N_max`.
    MaxN,
    /// Stop early once `REAL(N)` has been unchanged for `k` consecutive stages.
    Stabilized { k: usize },
}

/// Everything that steers a run besides the problem itself.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub tracker: TrackerConfig,
    pub filter: FilterSpec,
    pub seed: u64,
    pub eps_real: f64,
    pub dedup_tol: f64,
    pub stop_rule: StopRule,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            tracker: TrackerConfig::default(),
            filter: FilterSpec::none(),
            seed: 1,
            eps_real: DEFAULT_EPS_REAL,
            dedup_tol: DEFAULT_DEDUP_TOL,
            stop_rule: StopRule::MaxN,
        }
    }
}

/// Per-stage statistics.
///
/// `sols + duplicates + diverged + failures == paths_tracked`, where
/// `failures` includes step failures, exhausted step budgets and singular
/// endpoints.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StageReport {
    pub n: usize,
    pub paths_tracked: usize,
    /// Distinct solutions found, `SOLS(N)`, before filtering.
    pub sols: usize,
    /// Real solutions among them, `REAL(N)`, before filtering.
    pub reals: usize,
    pub diverged: usize,
    pub failures: usize,
    pub step_failures: usize,
    pub max_steps: usize,
    pub singular: usize,
    pub duplicates: usize,
    pub filtered_out: usize,
    /// Size of `V_N` after filtering.
    pub kept: usize,
    pub kept_reals: usize,
    pub filter_applied: bool,
    pub gamma: Option<Complex64>,
    pub seed: u64,
    pub total_steps: usize,
    pub wall_time: Duration,
}

impl StageReport {
    pub fn accounting_holds(&self) -> bool {
        self.sols + self.duplicates + self.diverged + self.failures == self.paths_tracked
            && self.step_failures + self.max_steps + self.singular == self.failures
            && self.kept + self.filtered_out == self.sols
    }
}

/// Solutions retained at stage `N` (this is `V_N`) plus the ones the filter
/// removed, kept for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSet {
    pub n: usize,
    pub solutions: Vec<SolutionVector>,
    pub discarded: Vec<SolutionVector>,
    pub report: StageReport,
}

impl StageSet {
    pub fn real_solutions(&self) -> impl Iterator<Item = &SolutionVector> {
        self.solutions.iter().filter(|s| s.is_real)
    }
}

/// Sets `is_real` and returns it: every imaginary part below `eps_real`.
pub fn classify_real(y: &mut SolutionVector, eps_real: f64) -> bool {
    y.is_real = y.max_imag() < eps_real;
    y.is_real
}

/// Keep iff `||y_1| - |y_N|| < eps_sym` (complex moduli).
pub fn filter_symmetry(y: &SolutionVector, eps_sym: f64) -> bool {
    let n = y.n();
    (y.values[0].norm() - y.values[n - 1].norm()).abs() < eps_sym
}

/// Sum over `i = 2..N-1` of
/// `|(y_{i+2} - 2 y_{i+1} + 2 y_{i-1} - y_{i-2}) / (2h^3) - p'(y_i) (y_{i+1} - y_{i-1}) / (2h)|`.
///
/// Indices that fall outside `1..=N` take the boundary values: `y_0 = alpha`
/// and `y_{N+1} = beta` (and likewise `y_{-1}`, `y_{N+2}` never occur since
/// the sum stops one node short of each end).
pub fn third_derivative_score(prob: &BvpProblem, y: &SolutionVector) -> f64 {
    let n = y.n();
    if n < 3 {
        return 0.0;
    }
    let h = prob.mesh(n).h();
    let at = |i: usize| -> Complex64 {
        if i == 0 {
            Complex64::new(prob.alpha, 0.0)
        } else if i == n + 1 {
            Complex64::new(prob.beta, 0.0)
        } else {
            y.values[i - 1]
        }
    };
    let dp = prob.rhs_prime();
    (2..n)
        .map(|i| {
            let yppp = (at(i + 2) - 2.0 * at(i + 1) + 2.0 * at(i - 1) - at(i - 2)) / (2.0 * h * h * h);
            let yp = (at(i + 1) - at(i - 1)) / (2.0 * h);
            (yppp - dp.eval(at(i)) * yp).norm()
        })
        .sum()
}

pub fn filter_third_derivative(prob: &BvpProblem, y: &SolutionVector, eps2: f64) -> bool {
    third_derivative_score(prob, y) <= eps2
}

/// Greedy max-norm clustering: a vector is dropped when it lies within
/// `tol` of an earlier survivor. Survivors keep input order.
pub fn dedup(endpoints: Vec<SolutionVector>, tol: f64) -> Vec<SolutionVector> {
    // Bucket on Re(y_1): max-norm neighbours differ by at most one bucket.
    let key = |y: &SolutionVector| (y.values[0].re / tol).floor() as i64;
    let mut buckets: HashMap<i64, Vec<usize>> = HashMap::new();
    let mut kept: Vec<SolutionVector> = Vec::with_capacity(endpoints.len());
    for y in endpoints {
        let k = key(&y);
        let duplicate = (k - 1..=k + 1).any(|b| {
            buckets
                .get(&b)
                .is_some_and(|idx| idx.iter().any(|&j| kept[j].distance(&y) <= tol))
        });
        if !duplicate {
            buckets.entry(k).or_default().push(kept.len());
            kept.push(y);
        }
    }
    kept
}

/// Piecewise-linear interpolation of `y` (with its boundary values) onto the
/// uniform mesh with `n_target` interior points. Uses real parts only.
pub fn interpolate_to_mesh(prob: &BvpProblem, y: &SolutionVector, n_target: usize) -> SolutionVector {
    let coarse = prob.mesh(y.n());
    let xs = coarse.nodes();
    let mut ys = Vec::with_capacity(xs.len());
    ys.push(prob.alpha);
    ys.extend(y.values.iter().map(|v| v.re));
    ys.push(prob.beta);

    let fine = Mesh::new(prob.a, prob.b, n_target);
    let h = coarse.h();
    let values = (1..=n_target)
        .map(|i| {
            let x = fine.node(i);
            let seg = (((x - prob.a) / h).floor() as usize).min(coarse.n);
            let (x0, x1) = (xs[seg], xs[seg + 1]);
            let w = (x - x0) / (x1 - x0);
            Complex64::new((1.0 - w) * ys[seg] + w * ys[seg + 1], 0.0)
        })
        .collect();
    SolutionVector {
        values,
        is_real: true,
        origin: y.origin,
    }
}

/// `D_1` is the single polynomial `alpha - 2 y + beta - h^2 p(y)` with
/// `h = (b - a) / 2`; its roots form `V_1`.
pub fn solve_stage_one(prob: &BvpProblem, cfg: &BootstrapConfig) -> Result<StageSet> {
    let started = Instant::now();
    let h = prob.mesh(1).h();
    let mut coeffs: Vec<f64> = prob.rhs().coeffs().iter().map(|c| -h * h * c).collect();
    coeffs[0] += prob.alpha + prob.beta;
    coeffs[1] -= 2.0;
    let roots = Polynomial::new(coeffs).all_roots()?;

    let mut report = StageReport {
        n: 1,
        paths_tracked: roots.len(),
        seed: cfg.seed,
        ..StageReport::default()
    };
    let mut found = Vec::new();
    for (i, r) in roots.into_iter().enumerate() {
        let y = SolutionVector::new(vec![r], Origin { stage: 1, path: i });
        let y = newton_refine(prob, &y, cfg.tracker.endpoint_tol, cfg.tracker.newton_max_iters)
            .unwrap_or(y);
        if prob.jacobian(&y.values).condition_inf() > cfg.tracker.singular_cond {
            report.singular += 1;
            report.failures += 1;
        } else {
            found.push(y);
        }
    }
    let set = finish_stage(prob, 1, found, report, cfg, started);
    Ok(set)
}

/// One refinement `N - 1 -> N`: lift, track, deduplicate, classify, filter.
pub fn advance_stage(prob: &BvpProblem, prev: &StageSet, cfg: &BootstrapConfig) -> Result<StageSet> {
    let started = Instant::now();
    let n = prev.n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(n as u64);
    let gamma = sample_gamma(&mut rng);
    let stage = HomotopyStage::new(prob, prev.n, gamma)?;
    let d = prob.degree();

    let mut report = StageReport {
        n,
        paths_tracked: d * prev.solutions.len(),
        gamma: Some(gamma),
        seed: cfg.seed,
        ..StageReport::default()
    };

    // Start index k*d + j: j-th root above the k-th coarse solution.
    let mut starts: Vec<(usize, Vec<Complex64>)> = Vec::with_capacity(report.paths_tracked);
    for (k, coarse) in prev.solutions.iter().enumerate() {
        match stage.start_points(&coarse.values) {
            Ok(points) => starts.extend(points.into_iter().enumerate().map(|(j, p)| (k * d + j, p))),
            Err(e) => {
                log::warn!("stage {n}: no start points above solution {k}: {e}");
                report.step_failures += d;
                report.failures += d;
            }
        }
    }

    let results: Vec<_> = starts
        .par_iter()
        .map(|(idx, start)| track_path(&stage, start, *idx, &cfg.tracker))
        .collect();

    let mut converged = Vec::with_capacity(results.len());
    for res in &results {
        report.total_steps += res.steps_taken;
        match res.status {
            PathStatus::Converged => converged.extend(res.solution(n)),
            PathStatus::Diverged => report.diverged += 1,
            PathStatus::StepFailure => report.step_failures += 1,
            PathStatus::MaxSteps => report.max_steps += 1,
            PathStatus::Singular => report.singular += 1,
        }
        if res.status.is_failure() {
            report.failures += 1;
        }
    }
    if converged.is_empty() && report.paths_tracked > 0 {
        return Err(Error::EmptyStage { stage: n });
    }
    Ok(finish_stage(prob, n, converged, report, cfg, started))
}

fn finish_stage(
    prob: &BvpProblem,
    n: usize,
    converged: Vec<SolutionVector>,
    mut report: StageReport,
    cfg: &BootstrapConfig,
    started: Instant,
) -> StageSet {
    let total = converged.len();
    let mut distinct = dedup(converged, cfg.dedup_tol);
    report.duplicates = total - distinct.len();
    report.sols = distinct.len();

    for y in distinct.iter_mut() {
        if classify_real(y, cfg.eps_real) {
            // Polish on the real restriction.
            let real = SolutionVector {
                values: y.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
                ..y.clone()
            };
            if let Ok(refined) = newton_refine(prob, &real, cfg.tracker.endpoint_tol * 1e-2, 10) {
                *y = refined;
            }
            report.reals += 1;
        }
    }

    let filter_on = cfg.filter.active_at(n);
    report.filter_applied = filter_on;
    let (kept, discarded): (Vec<_>, Vec<_>) = distinct
        .into_iter()
        .partition(|y| !filter_on || cfg.filter.keeps(prob, y));
    report.kept = kept.len();
    report.kept_reals = kept.iter().filter(|y| y.is_real).count();
    report.filtered_out = discarded.len();
    report.wall_time = started.elapsed();

    StageSet {
        n,
        solutions: kept,
        discarded,
        report,
    }
}

/// Result of [`run_bootstrap`]: reports for every completed stage, the last
/// solution set, and the error that cut the run short, if any.
#[derive(Clone, Debug)]
pub struct BootstrapRun {
    pub reports: Vec<StageReport>,
    pub final_set: StageSet,
    pub aborted: Option<Error>,
}

/// Runs stages `1..=n_max` (or until the stop rule fires).
pub fn run_bootstrap(prob: &BvpProblem, n_max: usize, cfg: &BootstrapConfig) -> Result<BootstrapRun> {
    run_bootstrap_with(prob, n_max, cfg, |_| {})
}

/// As [`run_bootstrap`], calling `on_stage` after each completed stage.
pub fn run_bootstrap_with(
    prob: &BvpProblem,
    n_max: usize,
    cfg: &BootstrapConfig,
    mut on_stage: impl FnMut(&StageSet),
) -> Result<BootstrapRun> {
    assert!(n_max >= 1, "n_max must be at least 1");
    cfg.tracker.validate()?;
    let mut current = solve_stage_one(prob, cfg)?;
    on_stage(&current);
    let mut reports = vec![current.report.clone()];
    let mut aborted = None;
    let mut stable_run = 1;

    while current.n < n_max {
        if let StopRule::Stabilized { k } = cfg.stop_rule {
            if stable_run >= k {
                break;
            }
        }
        let next = match advance_stage(prob, &current, cfg) {
            Ok(next) => next,
            Err(e) => {
                log::warn!("stopping at N = {}: {e}", current.n);
                aborted = Some(e);
                break;
            }
        };
        on_stage(&next);
        if next.report.kept_reals == current.report.kept_reals {
            stable_run += 1;
        } else {
            stable_run = 1;
        }
        reports.push(next.report.clone());
        current = next;
    }
    Ok(BootstrapRun {
        reports,
        final_set: current,
        aborted,
    })
}
