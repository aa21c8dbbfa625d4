//! Experiment runner behind the `hbvp` binary: load a problem, run the
//! mesh-refinement bootstrap, write summary tables, solution CSVs, error
//! tables and plot data.

pub mod config;
pub mod output;
pub mod problem_file;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use homotopy_bvp::{run_bootstrap_with, BootstrapRun, StageSet};
use thiserror::Error;

pub use config::{Emit, ProblemSource, RunConfig};
pub use output::{ErrorRow, SolutionRow};
pub use problem_file::{parse_problem_file, parse_problem_str, ProblemFileError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    ProblemFile(#[from] ProblemFileError),
    #[error(transparent)]
    Problem(#[from] homotopy_bvp::ProblemError),
    #[error(transparent)]
    Solver(#[from] homotopy_bvp::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// What a finished (or aborted) run produced.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub run: BootstrapRun,
    pub error_rows: Vec<ErrorRow>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn aborted(&self) -> bool {
        self.run.aborted.is_some()
    }
}

struct Sinks {
    summary: Option<BufWriter<File>>,
    errors: Option<BufWriter<File>>,
    files: Vec<PathBuf>,
    error_rows: Vec<ErrorRow>,
}

/// Runs the configured experiment, writing every requested artifact into
/// `cfg.output_dir` as stages complete.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutcome, CliError> {
    cfg.validate()?;
    let prob = cfg.problem.load(cfg.lambda)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let dir = &cfg.output_dir;

    let mut sinks = Sinks {
        summary: None,
        errors: None,
        files: Vec::new(),
        error_rows: Vec::new(),
    };
    if cfg.emit.contains(&Emit::Summary) {
        let path = dir.join("summary.txt");
        let mut w = BufWriter::new(File::create(&path)?);
        w.write_all(output::summary_header(&prob, cfg.seed, &cfg.filter).as_bytes())?;
        w.flush()?;
        sinks.summary = Some(w);
        sinks.files.push(path);
    }
    if cfg.emit.contains(&Emit::ErrorsTable) && prob.exact_solution.is_some() {
        let path = dir.join("errors.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        w.write_all(output::error_csv_header().as_bytes())?;
        sinks.errors = Some(w);
        sinks.files.push(path);
    }

    let mut first_error: Option<CliError> = None;
    let mut on_stage = |set: &StageSet| {
        if first_error.is_some() {
            return;
        }
        if let Err(e) = record_stage(cfg, &prob, set, &mut sinks) {
            first_error = Some(e);
        }
    };
    let run = run_bootstrap_with(&prob, cfg.n_max, &cfg.bootstrap_config(), &mut on_stage)?;
    if let Some(e) = first_error {
        return Err(e);
    }

    if cfg.emit.contains(&Emit::Plotdata) {
        for (k, y) in run.final_set.real_solutions().enumerate() {
            let path = dir.join(format!("plot_{}.dat", k + 1));
            output::write_plot_data(&path, &prob, y)?;
            sinks.files.push(path);
        }
    }
    if let Some(w) = sinks.summary.as_mut() {
        w.flush()?;
    }
    if let Some(w) = sinks.errors.as_mut() {
        w.flush()?;
    }
    Ok(ExperimentOutcome {
        run,
        error_rows: sinks.error_rows,
        files: sinks.files,
    })
}

fn record_stage(
    cfg: &RunConfig,
    prob: &homotopy_bvp::BvpProblem,
    set: &StageSet,
    sinks: &mut Sinks,
) -> Result<(), CliError> {
    let r = &set.report;
    log::info!(
        "N={} sols={} real={} kept={} diverged={} failures={} ({:.2?})",
        r.n, r.sols, r.reals, r.kept, r.diverged, r.failures, r.wall_time
    );
    if let Some(w) = sinks.summary.as_mut() {
        w.write_all(output::summary_row(r).as_bytes())?;
        w.flush()?;
    }
    if let Some(row) = output::error_row(prob, set) {
        if let Some(w) = sinks.errors.as_mut() {
            w.write_all(output::error_csv_line(&row).as_bytes())?;
            w.flush()?;
        }
        sinks.error_rows.push(row);
    }
    if cfg.emit.contains(&Emit::Solutions) {
        let path = cfg.output_dir.join(format!("stage_{}_solutions.csv", set.n));
        output::write_solutions_csv(&path, prob, set)?;
        sinks.files.push(path);
    }
    Ok(())
}
