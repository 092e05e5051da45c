//! A temporal planning engine for actions whose conditions and effects may sit
//! at arbitrary offsets inside the action's duration, not just at its start or
//! end. Time is kept symbolic during search: the engine explores a space of
//! time-point sequences backed by an incremental simple temporal network, and
//! is guided by a delete-relaxation heuristic computed on a derived classical
//! planning problem. An independent semantics-level validator replays plans
//! against the trace semantics and is used to check everything the engine
//! produces.
//!
//! # Modules
//!
//! - [`scalar`]: the time scalar abstraction (exact, ordered arithmetic).
//! - [`model`]: problems, actions, plans, well-formedness checking.
//! - [`stn`]: simple temporal network with strict and weak difference
//!   constraints, incremental consistency and exact schedule extraction.
//! - [`validator`]: plan semantics (resolved effects, resolved conditions,
//!   trace evaluation, validity verdicts).
//! - [`search`]: time-point search space, duration-order splitting and the
//!   best-first engine.
//! - [`relax`]: the classical (STRIPS) relaxation and heuristics.
//! - [`bench`]: deterministic benchmark problem generators.
//! - [`io`]: JSON document formats and the command-line driver.
//!
//! All time handling is exact: the canonical scalar is [`Time`], an
//! arbitrary-precision rational. No floating point participates in the
//! semantics or in the temporal network.

pub mod bench;
pub mod io;
pub mod model;
pub mod relax;
pub mod scalar;
pub mod search;
pub mod stn;
pub mod validator;

#[cfg(test)]
pub(crate) mod testfix;

/// Canonical time scalar: arbitrary-precision rational, always in lowest
/// terms with a positive denominator.
pub type Time = num_rational::BigRational;

pub use model::{Action, Anchor, Condition, Effect, Plan, PlanStep, Polarity, Problem, TimedRef};


