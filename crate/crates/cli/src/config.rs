use std::collections::BTreeSet;
use std::path::PathBuf;

use homotopy_bvp::{presets, BootstrapConfig, BvpProblem, FilterSpec, StopRule, TrackerConfig};

use crate::problem_file::{parse_problem_file, ProblemFileError};
use crate::CliError;

/// Output artifacts a run can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emit {
    /// `summary.txt`
    Summary,
    /// `stage_<N>_solutions.csv`
    Solutions,
    /// `plot_<k>.dat`
    Plotdata,
    /// `errors.csv`
    ErrorsTable,
}

impl Emit {
    pub const ALL: [Emit; 4] = [Emit::Summary, Emit::Solutions, Emit::Plotdata, Emit::ErrorsTable];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "summary" => Some(Emit::Summary),
            "solutions" => Some(Emit::Solutions),
            "plotdata" => Some(Emit::Plotdata),
            "errors" | "errors_table" => Some(Emit::ErrorsTable),
            _ => None,
        }
    }
}

/// A preset name, or a path to a problem file.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Preset(String),
    File(PathBuf),
}

impl ProblemSource {
    /// Preset names win over files of the same name.
    pub fn from_arg(arg: &str) -> Self {
        if presets::PRESETS.iter().any(|(name, _)| *name == arg) {
            ProblemSource::Preset(arg.to_string())
        } else {
            ProblemSource::File(PathBuf::from(arg))
        }
    }

    pub fn load(&self, lambda: Option<f64>) -> Result<BvpProblem, CliError> {
        match self {
            ProblemSource::Preset(name) => Ok(presets::preset(name, lambda)?),
            ProblemSource::File(path) => {
                if lambda.is_some() {
                    log::warn!("--lambda is ignored for problem files");
                }
                parse_problem_file(path).map_err(|e| match e {
                    ProblemFileError::Io { .. } if !path.exists() => CliError::Config(format!(
                        "{} is neither a preset ({}) nor an existing file",
                        path.display(),
                        presets::PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
                    )),
                    other => other.into(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub lambda: Option<f64>,
    pub n_max: usize,
    pub filter: FilterSpec,
    pub seed: u64,
    pub tracker: TrackerConfig,
    pub stop_rule: StopRule,
    pub output_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
}

impl RunConfig {
    pub fn new(problem: ProblemSource, n_max: usize, output_dir: impl Into<PathBuf>) -> Self {
        let defaults = BootstrapConfig::default();
        Self {
            problem,
            lambda: None,
            n_max,
            filter: defaults.filter,
            seed: defaults.seed,
            tracker: defaults.tracker,
            stop_rule: defaults.stop_rule,
            output_dir: output_dir.into(),
            emit: Emit::ALL.into_iter().collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_max < 1 {
            return Err(CliError::Config("--max-n must be at least 1".into()));
        }
        if let StopRule::Stabilized { k } = self.stop_rule {
            if k < 1 {
                return Err(CliError::Config("stabilization window must be at least 1".into()));
            }
        }
        if self.filter.eps_sym.is_nan() || self.filter.eps_sym <= 0.0 {
            return Err(CliError::Config("--eps-sym must be positive".into()));
        }
        if self.filter.eps2.is_nan() || self.filter.eps2 <= 0.0 {
            return Err(CliError::Config("--eps2 must be positive".into()));
        }
        self.tracker
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            tracker: self.tracker.clone(),
            filter: self.filter.clone(),
            seed: self.seed,
            stop_rule: self.stop_rule,
            ..BootstrapConfig::default()
        }
    }
}
