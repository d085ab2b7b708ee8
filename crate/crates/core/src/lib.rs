//! Implementability analysis for many-sender Bayesian persuasion when the
//! receiver commits to a belief-contingent outcome rule.
//!
//! The crate works at the level of *allocations*: maps from full type
//! profiles to lotteries over outcomes. An allocation is implementable
//! exactly when, for every sender and every posterior belief, the interim
//! payoff from truthful revelation weakly exceeds the payoff of the
//! sender's worst outcome at that belief (the grim-trigger punishment).
//! Because the worst-outcome value is a concave, piecewise-linear function
//! of the belief, that continuum of constraints is pinned down by a finite
//! set of test beliefs, which [`beliefs`] enumerates and [`ic`] evaluates.
//!
//! Module map:
//!
//! - [`model`]: problem instances, allocations, interim payoffs.
//! - [`punishment`]: worst-outcome correspondence and the direct mechanism.
//! - [`beliefs`]: finite test-belief sets and the pairwise prefilter.
//! - [`ic`]: implementability verdicts with four independent methods.
//! - [`optimizer`]: dense simplex solver and the receiver's constrained optimum.
//! - [`structure`]: two-decomposability, monotonicity, least-favorite checks,
//!   and product composition.
//! - [`apps`]: grant, auction, and audit model generators.
//! - [`cli`]: the `persuade` command-line front end.

pub mod apps;
pub mod beliefs;
pub mod cli;
pub mod error;
pub mod ic;
mod linalg;
pub mod model;
pub mod optimizer;
pub mod punishment;
pub mod structure;

pub use error::{Error, Result};
pub use model::{load_allocation, load_model, Allocation, Belief, ModelSpec, SenderSpec};

/// Numeric tolerances shared by every module. They are surfaced in reports
/// so verdicts can be audited against them.
pub mod tol {
    /// Normalization tolerance for probability vectors.
    pub const SUM: f64 = 1e-9;
    /// Slack allowed before an incentive constraint counts as violated.
    pub const IC: f64 = 1e-7;
    /// Two payoffs closer than this are treated as tied.
    pub const TIE: f64 = 1e-9;
    /// Beliefs closer than this in L1 are the same belief.
    pub const DEDUP: f64 = 1e-8;
}
