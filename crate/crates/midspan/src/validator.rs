//! Independent plan semantics: resolves every effect and condition of a plan
//! to absolute times, evaluates the induced trace, and judges validity.
//!
//! This module is deliberately separate from the search engine — it replays
//! plans against the semantics directly and serves as the oracle for
//! everything the engine produces.
//!
//! A predicate's trace value at time `t` is decided by the latest effect
//! strictly before `t` (the initial state before any effect). A closed-interval
//! condition `[t1, t2]` therefore holds throughout iff the trace is true at
//! `t1` and no delete of the predicate occurs at any `w` with
//! `t1 <= w < t2`; the pointwise evaluation is kept as a test-only oracle.
//!
//! End-relative timed initial literals and goals resolve against the plan's
//! explicit `plan_end` anchor (which must be at least the step makespan), so
//! a goal at exactly the plan end can be supported by effects of the last
//! action.

use crate::model::{makespan, Plan, Polarity, Problem};
use crate::scalar::TimeScalar;
use crate::Time;
use std::collections::BTreeMap;
use std::fmt;

/// An effect resolved to an absolute time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimedEffect<T = Time> {
    pub time: T,
    pub predicate: String,
    pub polarity: Polarity,
}

/// A condition resolved to an absolute closed interval, with its origin for
/// violation reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedCondition<T = Time> {
    pub from: T,
    pub to: T,
    pub predicate: String,
    pub origin: ConditionOrigin,
}

/// Where a resolved condition came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConditionOrigin {
    /// Index into the plan's (sorted) step list.
    Step(usize),
    /// Index into the problem's goal list.
    Goal(usize),
}

impl fmt::Display for ConditionOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionOrigin::Step(i) => write!(f, "step #{i}"),
            ConditionOrigin::Goal(i) => write!(f, "goal #{i}"),
        }
    }
}

/// A plan step names an action the problem does not declare.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan references unknown action {0:?}")]
pub struct UnknownAction(pub String);

/// All add and delete effects of the plan (actions plus timed initial
/// literals), resolved to absolute times, as deduplicated sorted sets.
pub fn plan_effects<T: TimeScalar>(
    problem: &Problem<T>,
    plan: &Plan<T>,
) -> Result<(Vec<TimedEffect<T>>, Vec<TimedEffect<T>>), UnknownAction> {
    let mut adds = Vec::new();
    let mut dels = Vec::new();
    for step in &plan.steps {
        let action = problem
            .action(&step.action)
            .ok_or_else(|| UnknownAction(step.action.clone()))?;
        let end = step.end();
        for e in &action.effects {
            let out = if e.polarity == Polarity::Add { &mut adds } else { &mut dels };
            out.push(TimedEffect {
                time: e.at.resolve(&step.start, &end),
                predicate: e.predicate.clone(),
                polarity: e.polarity,
            });
        }
    }
    let zero = T::zero();
    for e in &problem.tils {
        let out = if e.polarity == Polarity::Add { &mut adds } else { &mut dels };
        out.push(TimedEffect {
            time: e.at.resolve(&zero, &plan.plan_end),
            predicate: e.predicate.clone(),
            polarity: e.polarity,
        });
    }
    adds.sort();
    adds.dedup();
    dels.sort();
    dels.dedup();
    Ok((adds, dels))
}

/// All conditions imposed by the plan's steps and the problem's timed goals,
/// resolved to absolute closed intervals.
pub fn plan_conditions<T: TimeScalar>(
    problem: &Problem<T>,
    plan: &Plan<T>,
) -> Result<Vec<TimedCondition<T>>, UnknownAction> {
    let mut out = Vec::new();
    for (i, step) in plan.steps.iter().enumerate() {
        let action = problem
            .action(&step.action)
            .ok_or_else(|| UnknownAction(step.action.clone()))?;
        let end = step.end();
        for c in &action.conditions {
            out.push(TimedCondition {
                from: c.from.resolve(&step.start, &end),
                to: c.to.resolve(&step.start, &end),
                predicate: c.predicate.clone(),
                origin: ConditionOrigin::Step(i),
            });
        }
    }
    let zero = T::zero();
    for (i, c) in problem.goals.iter().enumerate() {
        out.push(TimedCondition {
            from: c.from.resolve(&zero, &plan.plan_end),
            to: c.to.resolve(&zero, &plan.plan_end),
            predicate: c.predicate.clone(),
            origin: ConditionOrigin::Goal(i),
        });
    }
    Ok(out)
}

/// The trace induced by a plan: per-predicate effect timelines plus the
/// initial state.
pub struct Trace<'p, T = Time> {
    timeline: BTreeMap<String, Vec<(T, Polarity)>>,
    problem: &'p Problem<T>,
    effects: Vec<TimedEffect<T>>,
}

impl<'p, T: TimeScalar> Trace<'p, T> {
    pub fn new(problem: &'p Problem<T>, plan: &Plan<T>) -> Result<Self, UnknownAction> {
        let (adds, dels) = plan_effects(problem, plan)?;
        let mut effects = adds;
        effects.extend(dels);
        effects.sort();
        let mut timeline: BTreeMap<String, Vec<(T, Polarity)>> = BTreeMap::new();
        for e in &effects {
            timeline
                .entry(e.predicate.clone())
                .or_default()
                .push((e.time.clone(), e.polarity));
        }
        // Sorted by (time, polarity) with Add < Delete: when an add and a
        // delete coincide (already a validity violation) the delete decides
        // the trace, deterministically.
        for v in timeline.values_mut() {
            v.sort();
        }
        Ok(Trace { timeline, problem, effects })
    }

    /// All resolved effects, sorted.
    pub fn effects(&self) -> &[TimedEffect<T>] {
        &self.effects
    }

    /// Value of `predicate` at time `t`: the polarity of the latest effect
    /// strictly before `t`, or the initial value when there is none.
    pub fn value(&self, predicate: &str, t: &T) -> bool {
        let before = self
            .timeline
            .get(predicate)
            .and_then(|v| v[..v.partition_point(|(w, _)| w < t)].last());
        match before {
            Some((_, pol)) => *pol == Polarity::Add,
            None => self.problem.init.contains(predicate),
        }
    }

    /// Earliest delete of `predicate` in the half-open interval `[from, to)`.
    fn delete_within(&self, predicate: &str, from: &T, to: &T) -> Option<T> {
        self.timeline.get(predicate).and_then(|v| {
            v.iter()
                .find(|(w, pol)| *pol == Polarity::Delete && w >= from && w < to)
                .map(|(w, _)| w.clone())
        })
    }
}

/// Trace value of one predicate at one instant. Convenience over building a
/// [`Trace`] explicitly.
pub fn trace_value<T: TimeScalar>(
    problem: &Problem<T>,
    plan: &Plan<T>,
    predicate: &str,
    t: &T,
) -> Result<bool, UnknownAction> {
    Ok(Trace::new(problem, plan)?.value(predicate, t))
}

/// A single validity violation with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation<T = Time> {
    /// The same (time, predicate) pair is both added and deleted.
    ContradictoryEffects { time: T, predicate: String },
    /// A resolved condition interval with `from > to`.
    MalformedInterval { predicate: String, from: T, to: T, origin: ConditionOrigin },
    /// The predicate is false at the interval start.
    ConditionFalseAtStart { predicate: String, at: T, origin: ConditionOrigin },
    /// A delete of the predicate at `witness` interrupts the interval.
    ConditionInterrupted { predicate: String, witness: T, origin: ConditionOrigin },
    /// A step names an action the problem does not declare.
    UnknownAction { action: String },
    /// A step's duration is outside its action's bounds or nonpositive, or
    /// its start is negative.
    MalformedStep { action: String, detail: String },
    /// `plan_end` is below the step makespan or negative.
    BadPlanEnd { detail: String },
}

impl<T: TimeScalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ContradictoryEffects { time, predicate } => {
                write!(f, "contradictory effects on {predicate:?} at time {time}")
            }
            Violation::MalformedInterval { predicate, from, to, origin } => {
                write!(f, "malformed interval [{from}, {to}] on {predicate:?} from {origin}")
            }
            Violation::ConditionFalseAtStart { predicate, at, origin } => {
                write!(f, "unsatisfied condition: {predicate:?} is false at time {at} ({origin})")
            }
            Violation::ConditionInterrupted { predicate, witness, origin } => {
                write!(
                    f,
                    "unsatisfied condition: {predicate:?} is deleted at time {witness} inside the required interval ({origin})"
                )
            }
            Violation::UnknownAction { action } => {
                write!(f, "plan references unknown action {action:?}")
            }
            Violation::MalformedStep { action, detail } => {
                write!(f, "malformed step for action {action:?}: {detail}")
            }
            Violation::BadPlanEnd { detail } => write!(f, "bad plan end: {detail}"),
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<T = Time> {
    Valid,
    Invalid(Vec<Violation<T>>),
}

impl<T: TimeScalar> Verdict<T> {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violations(&self) -> &[Violation<T>] {
        match self {
            Verdict::Valid => &[],
            Verdict::Invalid(v) => v,
        }
    }

    /// One violation per line; empty for a valid plan.
    pub fn report(&self) -> String {
        self.violations().iter().map(|v| format!("{v}\n")).collect()
    }
}

/// Judges a plan: no contradictory effect pair, and every resolved condition
/// holds throughout its closed interval. Plans that are not well-formed for
/// the problem (unknown actions, out-of-bounds durations, plan_end below the
/// makespan) are reported as violations rather than errors.
pub fn validate<T: TimeScalar>(problem: &Problem<T>, plan: &Plan<T>) -> Verdict<T> {
    let mut violations: Vec<Violation<T>> = Vec::new();

    for step in &plan.steps {
        match problem.action(&step.action) {
            None => violations.push(Violation::UnknownAction { action: step.action.clone() }),
            Some(action) => {
                if step.duration <= T::zero() {
                    violations.push(Violation::MalformedStep {
                        action: step.action.clone(),
                        detail: format!("duration {} is not positive", step.duration),
                    });
                } else if step.duration < action.d_min || step.duration > action.d_max {
                    violations.push(Violation::MalformedStep {
                        action: step.action.clone(),
                        detail: format!(
                            "duration {} outside [{}, {}]",
                            step.duration, action.d_min, action.d_max
                        ),
                    });
                }
                if step.start < T::zero() {
                    violations.push(Violation::MalformedStep {
                        action: step.action.clone(),
                        detail: format!("start {} is negative", step.start),
                    });
                }
            }
        }
    }
    if plan.plan_end < T::zero() {
        violations.push(Violation::BadPlanEnd {
            detail: format!("plan_end {} is negative", plan.plan_end),
        });
    }
    let ms = makespan(&plan.steps);
    if plan.plan_end < ms {
        violations.push(Violation::BadPlanEnd {
            detail: format!("plan_end {} below makespan {}", plan.plan_end, ms),
        });
    }
    if violations.iter().any(|v| matches!(v, Violation::UnknownAction { .. })) {
        return Verdict::Invalid(violations);
    }

    let (adds, dels) = plan_effects(problem, plan).expect("actions checked above");
    {
        // Contradiction check: exact (time, predicate) pair equality.
        let add_keys: std::collections::BTreeSet<_> =
            adds.iter().map(|e| (&e.time, &e.predicate)).collect();
        for d in &dels {
            if add_keys.contains(&(&d.time, &d.predicate)) {
                violations.push(Violation::ContradictoryEffects {
                    time: d.time.clone(),
                    predicate: d.predicate.clone(),
                });
            }
        }
    }

    let trace = Trace::new(problem, plan).expect("actions checked above");
    let conditions = plan_conditions(problem, plan).expect("actions checked above");
    for c in conditions {
        if c.from > c.to {
            violations.push(Violation::MalformedInterval {
                predicate: c.predicate,
                from: c.from,
                to: c.to,
                origin: c.origin,
            });
            continue;
        }
        if !trace.value(&c.predicate, &c.from) {
            violations.push(Violation::ConditionFalseAtStart {
                predicate: c.predicate,
                at: c.from,
                origin: c.origin,
            });
            continue;
        }
        if let Some(witness) = trace.delete_within(&c.predicate, &c.from, &c.to) {
            violations.push(Violation::ConditionInterrupted {
                predicate: c.predicate,
                witness,
                origin: c.origin,
            });
        }
    }

    if violations.is_empty() {
        Verdict::Valid
    } else {
        Verdict::Invalid(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, Condition, Effect, Plan, PlanStep, TimedRef};
    use crate::scalar::{time_frac, time_int};
    use crate::testfix::tiny_problem;

    fn tiny_plan() -> Plan {
        Plan::new(vec![PlanStep::new(time_int(0), "a1", time_int(2))], time_int(2))
    }

    #[test]
    fn effects_of_single_step() {
        let p = tiny_problem();
        let (adds, dels) = plan_effects(&p, &tiny_plan()).unwrap();
        assert_eq!(adds.len(), 1);
        assert_eq!(adds[0].time, time_int(1));
        assert_eq!(adds[0].predicate, "p");
        assert!(dels.is_empty());
    }

    #[test]
    fn start_relative_til_on_empty_plan() {
        let mut p = tiny_problem();
        p.predicates.insert("r".into());
        p.tils.push(Effect::add(TimedRef::start(time_int(5)), "r"));
        p.goals.clear();
        let plan = Plan::new(vec![], time_int(0));
        let (adds, _) = plan_effects(&p, &plan).unwrap();
        assert!(adds.iter().any(|e| e.time == time_int(5) && e.predicate == "r"));
    }

    #[test]
    fn end_relative_effect_resolves_through_duration() {
        let mut p = tiny_problem();
        let mut a = Action::new("a2", time_int(1), time_int(4));
        a.effects.push(Effect::add(TimedRef::end(time_int(1)), "p"));
        p.actions.push(a);
        let plan = Plan::new(vec![PlanStep::new(time_int(2), "a2", time_int(3))], time_int(5));
        let (adds, _) = plan_effects(&p, &plan).unwrap();
        // t + d - k = 2 + 3 - 1
        assert!(adds.iter().any(|e| e.time == time_int(4)));
    }

    #[test]
    fn conditions_of_single_step() {
        let p = tiny_problem();
        let cs = plan_conditions(&p, &tiny_plan()).unwrap();
        let action_cond = cs.iter().find(|c| c.origin == ConditionOrigin::Step(0)).unwrap();
        assert_eq!(
            (action_cond.from.clone(), action_cond.to.clone()),
            (time_int(0), time_int(0))
        );
        assert_eq!(action_cond.predicate, "q");
    }

    #[test]
    fn goal_at_plan_end_resolves_to_plan_end() {
        let p = tiny_problem();
        let cs = plan_conditions(&p, &tiny_plan()).unwrap();
        let goal = cs.iter().find(|c| c.origin == ConditionOrigin::Goal(0)).unwrap();
        assert_eq!((goal.from.clone(), goal.to.clone()), (time_int(2), time_int(2)));
    }

    #[test]
    fn straddling_goal_interval_resolves_against_both_anchors() {
        let mut p = tiny_problem();
        p.goals = vec![Condition::over(
            TimedRef::start(time_int(1)),
            TimedRef::end(time_int(1)),
            "p",
        )];
        let plan = Plan::new(vec![], time_int(4));
        let cs = plan_conditions(&p, &plan).unwrap();
        assert_eq!((cs[0].from.clone(), cs[0].to.clone()), (time_int(1), time_int(3)));
    }

    #[test]
    fn trace_uses_strictly_before_effects() {
        let p = tiny_problem();
        let plan = tiny_plan();
        // The add of p happens at exactly 1 and does not count at 1.
        assert!(!trace_value(&p, &plan, "p", &time_int(1)).unwrap());
        assert!(trace_value(&p, &plan, "p", &time_frac(3, 2)).unwrap());
        // Initial value before any effect.
        assert!(trace_value(&p, &plan, "q", &time_int(0)).unwrap());
    }

    #[test]
    fn valid_plan_passes() {
        let p = tiny_problem();
        assert_eq!(validate(&p, &tiny_plan()), Verdict::Valid);
    }

    #[test]
    fn empty_plan_misses_goal() {
        let p = tiny_problem();
        let verdict = validate(&p, &Plan::new(vec![], time_int(0)));
        assert!(!verdict.is_valid());
        assert!(verdict
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::ConditionFalseAtStart { predicate, .. } if predicate == "p")));
    }

    #[test]
    fn delete_inside_condition_interval_is_witnessed() {
        let mut p = tiny_problem();
        // a3 deletes q at its start; running it at t=1 interrupts a
        // condition on q over [0, 2].
        let mut a3 = Action::fixed("a3", time_int(1));
        a3.effects.push(Effect::delete(TimedRef::start(time_int(0)), "q"));
        p.actions.push(a3);
        p.goals = vec![Condition::over(
            TimedRef::start(time_int(0)),
            TimedRef::start(time_int(2)),
            "q",
        )];
        let plan = Plan::new(vec![PlanStep::new(time_int(1), "a3", time_int(1))], time_int(2));
        let verdict = validate(&p, &plan);
        assert!(verdict.violations().iter().any(|v| matches!(
            v,
            Violation::ConditionInterrupted { predicate, witness, .. }
                if predicate == "q" && *witness == time_int(1)
        )));
    }

    #[test]
    fn delete_at_instant_of_degenerate_condition_is_invisible() {
        // A delete at exactly t does not change the value at t.
        let mut p = tiny_problem();
        let mut a3 = Action::fixed("a3", time_int(1));
        a3.effects.push(Effect::delete(TimedRef::end(time_int(0)), "q"));
        p.actions.push(a3);
        p.goals = vec![Condition::at(TimedRef::start(time_int(3)), "q")];
        let plan = Plan::new(vec![PlanStep::new(time_int(2), "a3", time_int(1))], time_int(3));
        assert_eq!(validate(&p, &plan), Verdict::Valid);
        // But any instant strictly after sees the delete.
        p.goals = vec![Condition::at(TimedRef::start(time_frac(7, 2)), "q")];
        let plan = Plan::new(vec![PlanStep::new(time_int(2), "a3", time_int(1))], time_int(4));
        assert!(!validate(&p, &plan).is_valid());
    }

    #[test]
    fn contradictory_effect_pair_detected() {
        let mut p = tiny_problem();
        let mut a4 = Action::fixed("a4", time_int(2));
        a4.effects.push(Effect::delete(TimedRef::end(time_int(1)), "p"));
        p.actions.push(a4);
        // a1 adds p at 0+1; a4 at t=0,d=2 deletes p at 0+2-1=1.
        let plan = Plan::new(
            vec![
                PlanStep::new(time_int(0), "a1", time_int(2)),
                PlanStep::new(time_int(0), "a4", time_int(2)),
            ],
            time_int(2),
        );
        let verdict = validate(&p, &plan);
        assert!(verdict.violations().iter().any(|v| matches!(
            v,
            Violation::ContradictoryEffects { time, predicate } if *time == time_int(1) && predicate == "p"
        )));
    }

    #[test]
    fn malformed_interval_reported_not_crashed() {
        let mut p = tiny_problem();
        // Straddling-anchor goal that resolves reversed for a short plan.
        p.goals = vec![Condition::over(
            TimedRef::start(time_int(3)),
            TimedRef::end(time_int(0)),
            "q",
        )];
        let plan = Plan::new(vec![], time_int(1));
        let verdict = validate(&p, &plan);
        assert!(verdict
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::MalformedInterval { .. })));
    }

    #[test]
    fn unknown_action_is_a_violation() {
        let p = tiny_problem();
        let plan = Plan::new(vec![PlanStep::new(time_int(0), "ghost", time_int(1))], time_int(1));
        let verdict = validate(&p, &plan);
        assert!(verdict
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::UnknownAction { action } if action == "ghost")));
    }

    #[test]
    fn out_of_bounds_duration_is_a_violation() {
        let p = tiny_problem();
        let plan = Plan::new(vec![PlanStep::new(time_int(0), "a1", time_int(3))], time_int(3));
        assert!(!validate(&p, &plan).is_valid());
    }

    #[test]
    fn plan_end_below_makespan_is_a_violation() {
        let p = tiny_problem();
        let plan = Plan {
            steps: vec![PlanStep::new(time_int(0), "a1", time_int(2))],
            plan_end: time_int(1),
        };
        assert!(validate(&p, &plan)
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::BadPlanEnd { .. })));
    }

    #[test]
    fn shifting_a_plan_preserves_the_verdict_without_absolute_anchors() {
        // No TILs; the goal is end-anchored, so shifting everything by +c is
        // verdict-preserving.
        let p = tiny_problem();
        for c in [time_int(1), time_frac(1, 3), time_int(7)] {
            let shifted = Plan::new(
                vec![PlanStep::new(c.clone(), "a1", time_int(2))],
                time_int(2) + c.clone(),
            );
            assert_eq!(validate(&p, &shifted), Verdict::Valid, "shift by {c}");
        }
    }

    #[test]
    fn verdict_stable_under_normalization() {
        let mut p = tiny_problem();
        let dup = p.actions[0].effects[0].clone();
        p.actions[0].effects.push(dup);
        let plan = tiny_plan();
        let before = validate(&p, &plan).is_valid();
        let normalized = crate::model::normalize_problem(&p).unwrap();
        assert_eq!(before, validate(&normalized, &plan).is_valid());
    }

    #[test]
    fn report_is_one_line_per_violation() {
        let p = tiny_problem();
        let verdict = validate(&p, &Plan::new(vec![], time_int(0)));
        let report = verdict.report();
        assert_eq!(report.lines().count(), verdict.violations().len());
    }
}
