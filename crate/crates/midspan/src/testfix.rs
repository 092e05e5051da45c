//! Shared fixtures for unit tests.

use crate::model::{Action, Condition, Effect, Problem, TimedRef};
use crate::scalar::time_int;

/// Smallest interesting problem: predicates {p, q}, init {q}, one action of
/// duration exactly 2 with condition q at its start and an add of p one unit
/// in, goal p at the plan end.
pub fn tiny_problem() -> Problem {
    let mut a1 = Action::fixed("a1", time_int(2));
    a1.conditions.push(Condition::at(TimedRef::start(time_int(0)), "q"));
    a1.effects.push(Effect::add(TimedRef::start(time_int(1)), "p"));
    Problem {
        predicates: ["p", "q"].iter().map(|s| s.to_string()).collect(),
        actions: vec![a1],
        init: ["q"].iter().map(|s| s.to_string()).collect(),
        tils: vec![],
        goals: vec![Condition::at(TimedRef::end(time_int(0)), "p")],
    }
}
