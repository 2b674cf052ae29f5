//! NPA moment-matrix relaxations for the CHSH scenario (two parties, two
//! dichotomic settings each), a small dense SDP solver to evaluate them, and
//! the analytic extremality criterion for two-qubit realizations.
//!
//! * [`bell`]: realizations, correlation points and the criterion.
//! * [`words`], [`moments`]: operator words and moment-matrix layouts.
//! * [`sdp`]: interior-point solver and solution certificates.
//! * [`experiments`]: table, onset, and scatter harnesses with CSV/SVG output.

pub mod bell;
pub mod experiments;
pub mod moments;
pub mod sdp;
pub mod words;

pub use bell::{BellFunctional, CorrelationPoint, CriterionReport, Realization};
pub use moments::{lambda_problem, value_problem, Level, MomentStructure};
pub use sdp::{certify, solve, SdpProblem, SdpSolution, SolveStatus, SolverOptions};
