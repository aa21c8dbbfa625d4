use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use homotopy_bvp::{FilterKind, StopRule};
use hbvp_cli::{run_experiment, Emit, ProblemSource, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    None,
    Sym,
    Yppp,
    Both,
}

/// Finds all solutions of finite-difference discretizations of
/// y'' = p(y) by mesh-refinement homotopy continuation.
#[derive(Debug, Parser)]
#[command(name = "hbvp", version, about)]
struct Args {
    /// Preset name (bvp2, bvp3, bvp4, duffing3, duffing5, bratu2) or a problem file.
    #[arg(long)]
    problem: String,
    /// Parameter for the lambda presets.
    #[arg(long)]
    lambda: Option<f64>,
    /// Last mesh size N.
    #[arg(long)]
    max_n: usize,
    #[arg(long, value_enum, default_value = "none")]
    filter: FilterArg,
    #[arg(long, default_value_t = homotopy_bvp::bootstrap::DEFAULT_EPS_SYM)]
    eps_sym: f64,
    /// Threshold for the y''' filter; required by --filter yppp and both.
    #[arg(long)]
    eps2: Option<f64>,
    /// First stage at which the filter applies.
    #[arg(long, default_value_t = 1)]
    filter_start_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "hbvp-out")]
    out: PathBuf,
    /// Comma-separated subset of summary,solutions,plotdata,errors.
    #[arg(long, value_delimiter = ',', default_value = "summary,solutions,plotdata,errors")]
    emit: Vec<String>,
    /// Stop once the retained real count is unchanged for this many stages.
    #[arg(long)]
    stop_stable: Option<usize>,
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    endpoint_tol: Option<f64>,
    #[arg(long)]
    step_init: Option<f64>,
    #[arg(long)]
    step_min: Option<f64>,
    #[arg(long)]
    step_max: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    divergence_bound: Option<f64>,
    #[arg(long)]
    singular_cond: Option<f64>,
}

impl Args {
    fn into_config(self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::new(ProblemSource::from_arg(&self.problem), self.max_n, self.out);
        cfg.lambda = self.lambda;
        cfg.seed = self.seed;
        cfg.filter.kind = match self.filter {
            FilterArg::None => FilterKind::None,
            FilterArg::Sym => FilterKind::Symmetry,
            FilterArg::Yppp => FilterKind::ThirdDerivative,
            FilterArg::Both => FilterKind::Conjunction,
        };
        cfg.filter.eps_sym = self.eps_sym;
        cfg.filter.start_at_n = self.filter_start_n;
        match (self.filter, self.eps2) {
            (FilterArg::Yppp | FilterArg::Both, None) => {
                return Err("--eps2 is required with --filter yppp or both".into())
            }
            (_, Some(eps2)) => cfg.filter.eps2 = eps2,
            _ => {}
        }
        cfg.emit = self
            .emit
            .iter()
            .map(|s| Emit::parse(s.trim()).ok_or_else(|| format!("unknown --emit value {s:?}")))
            .collect::<Result<_, _>>()?;
        if let Some(k) = self.stop_stable {
            cfg.stop_rule = StopRule::Stabilized { k };
        }
        let t = &mut cfg.tracker;
        if let Some(v) = self.newton_tol {
            t.newton_tol = v;
        }
        if let Some(v) = self.endpoint_tol {
            t.endpoint_tol = v;
        }
        if let Some(v) = self.step_init {
            t.step_init = v;
        }
        if let Some(v) = self.step_min {
            t.step_min = v;
        }
        if let Some(v) = self.step_max {
            t.step_max = v;
        }
        if let Some(v) = self.max_steps {
            t.max_steps = v;
        }
        if let Some(v) = self.divergence_bound {
            t.divergence_bound = v;
        }
        if let Some(v) = self.singular_cond {
            t.singular_cond = v;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cfg = match Args::parse().into_config() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run_experiment(&cfg) {
        Ok(outcome) => {
            let summary = cfg.output_dir.join("summary.txt");
            if let Ok(text) = std::fs::read_to_string(&summary) {
                print!("{text}");
            }
            if let Some(e) = &outcome.run.aborted {
                eprintln!("error: run stopped early: {e}");
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
