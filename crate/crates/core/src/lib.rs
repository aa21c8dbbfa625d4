//! Finds (ideally all) solutions of central-difference discretizations of
//! `y'' = p(y)`, `y(a) = alpha`, `y(b) = beta`, for a real polynomial `p`.
//!
//! The discretization with `N` interior nodes is a square polynomial system
//! with at most `deg(p)^N` complex solutions. Solutions are built up one mesh
//! node at a time: the solutions of the `N`-node system seed a homotopy whose
//! endpoints are the solutions of the `(N + 1)`-node system. Optional filters
//! prune the solution set between stages, and a Newton polish carries real
//! solutions to finer meshes.
//!
//! ```no_run
//! use homotopy_bvp::{presets, run_bootstrap, BootstrapConfig};
//!
//! let prob = presets::bvp4(1.0).unwrap();
//! let run = run_bootstrap(&prob, 6, &BootstrapConfig::default()).unwrap();
//! for r in &run.reports {
//!     println!("N={} SOLS={} REAL={}", r.n, r.sols, r.reals);
//! }
//! ```

pub mod bootstrap;
pub mod error;
pub mod homotopy;
pub mod linalg;
pub mod poly;
pub mod problem;
pub mod tracker;

pub use num_complex::Complex64;

pub use bootstrap::{
    advance_stage, classify_real, dedup, filter_symmetry, filter_third_derivative,
    interpolate_to_mesh, run_bootstrap, run_bootstrap_with, solve_stage_one,
    third_derivative_score, BootstrapConfig, BootstrapRun, FilterKind, FilterSpec, StageReport,
    StageSet, StopRule,
};
pub use error::{Error, HomotopyError, PolyError, ProblemError, Result, TrackError};
pub use homotopy::{sample_gamma, HomotopyStage};
pub use linalg::Tridiagonal;
pub use poly::{ComplexPolynomial, Polynomial};
pub use problem::{max_norm, max_norm_distance, presets, BvpProblem, Mesh, Origin, SolutionVector};
pub use tracker::{newton_refine, newton_refine_counted, track_path, PathResult, PathStatus, TrackerConfig};
