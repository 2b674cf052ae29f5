//! Harnesses reproducing the relaxation tables, the deviation-onset search
//! and the λ scatter experiments, plus CSV/SVG emission.

use std::path::PathBuf;

use thiserror::Error;

use crate::bell::BellError;
use crate::moments::{lambda_problem, value_problem, Level, MomentStructure};
use crate::sdp::{solve, SdpError, SdpSolution, SolverOptions};
use crate::{BellFunctional, CorrelationPoint};

pub mod maximize;
pub mod oracle;
pub mod output;
pub mod sampler;
pub mod scatter;
pub mod table;

pub use maximize::{extremal_by_maximization, maximize_functional, MaximizeOutcome, DEFAULT_RESTARTS};
pub use oracle::{qb_functional, quantum_value, quantum_value_qb2, quantum_value_qb3, Family};
pub use output::{emit_scatter_csv, emit_svg_scatter, emit_table_csv, scatter_csv, table_csv};
pub use sampler::{sample_random_point, sample_realization, RealizationFilter, SampleStream};
pub use scatter::{is_deviated, run_scatter, RecordError, SampleMode, ScatterConfig, ScatterRecord};
pub use table::{deviation_onset, run_table, TableRow};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("x = {0} is outside the oracle domain [0, 2]")]
    Domain(f64),
    #[error("no sign change of the deviation in [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },
    #[error("sampler exhausted after {attempts} attempts")]
    SamplerExhausted { attempts: usize },
    #[error("nothing to write")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Solver(#[from] SdpError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Looser options for a second attempt after a non-optimal solve.
pub fn fallback_options() -> SolverOptions {
    SolverOptions {
        gap_tol: 1e-8,
        feas_tol: 1e-8,
        ..SolverOptions::default()
    }
}

/// Solves with the default options, retrying once with [`fallback_options`].
pub fn solve_with_retry(prob: &crate::SdpProblem) -> Result<SdpSolution, SdpError> {
    let sol = solve(prob, &SolverOptions::default());
    if sol.is_optimal() {
        return Ok(sol);
    }
    solve(prob, &fallback_options()).ensure_optimal()
}

/// Maximum `λ` with `Γ − λI ⪰ 0` for the point's moments at `structure`'s level.
pub fn max_lambda(structure: &MomentStructure, p: &CorrelationPoint) -> Result<f64, SdpError> {
    Ok(solve_with_retry(&lambda_problem(structure, p))?.objective)
}

/// Relaxation maximum of a Bell functional at `structure`'s level.
pub fn max_value(structure: &MomentStructure, f: &BellFunctional) -> Result<f64, SdpError> {
    Ok(solve_with_retry(&value_problem(structure, f))?.objective)
}

/// Builds one structure per requested level, sorted and deduplicated.
pub fn structures(levels: &[Level]) -> Vec<MomentStructure> {
    let mut levels = levels.to_vec();
    levels.sort();
    levels.dedup();
    levels.into_iter().map(MomentStructure::build).collect()
}
