//! Sequential 3/4-approximation algorithms for weighted MAX SAT.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! core: the formula model, the incremental bound bookkeeping, the randomized
//! and deterministic assignment rules, an exact rational simplex for the
//! standard LP relaxation, and exhaustive oracles that check the
//! approximation guarantees with exact arithmetic. File formats, reports and
//! the command-line front end live in the `maxsat` crate.
//!
//! All bounds are tracked doubled (`2·B_i = SAT_i + W − UNSAT_i`) so that
//! bookkeeping stays in integers; probabilities, expectations and LP values
//! are exact [`Rational`]s.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bookkeep;
pub mod error;
pub mod formula;
pub mod greedy;
pub mod lp;
pub mod oracle;
pub mod rational;

pub use bookkeep::{reference_step_quantities, Alpha, StepQuantities, TraceState, VzQuantities};
pub use error::Error;
pub use formula::{corpus, random_instance, Assignment, Clause, CorpusParams, Formula, Order};
pub use greedy::{
    choose, run_greedy_sat, run_greedy_unsat, run_randomized, run_vanzuylen, DrawSource, RunResult,
    StepRecord,
};
pub use lp::{
    build_relaxation, lp_value, rounding_trace, run_lp_rounding, solve_lp, CoverRow, LpModel,
    LpSolution, RoundingStep,
};
pub use oracle::{
    brute_force_opt, brute_force_opt_limited, check_lp_lemmas, check_lp_rounding, check_randomized_lemmas,
    exact_expectation, exact_expectation_limited, Check, ExpectationReport, LemmaReport,
    LemmaStep, BRUTE_FORCE_LIMIT, EXPECTATION_LIMIT,
};
pub use rational::Rational;

/// Clause weight. Weights are nonnegative and bounded by `u64::MAX`; every
/// derived quantity (sums, doubled bounds, deltas) is carried in `i128`, which
/// cannot overflow for fewer than 2^63 clauses.
pub type Weight = u64;

/// Signed accumulator for weight sums and doubled bounds.
pub type Wide = i128;
