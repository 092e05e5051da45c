//! Core domain types: timed references, actions with conditions and effects
//! at arbitrary offsets inside their duration, problems, plans, and
//! well-formedness checking.
//!
//! Every temporal quantity is an exact scalar (canonically [`crate::Time`]).
//! All types are immutable values after construction and freely shareable
//! across threads.

use crate::scalar::TimeScalar;
use crate::Time;
use std::collections::BTreeSet;
use std::fmt;

/// Which end of the owning interval a [`TimedRef`] is measured from.
///
/// For a reference inside an action, `Start`/`End` are the action instance's
/// start and end. For timed initial literals and goals they are the plan
/// start (time zero) and the plan end anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anchor {
    Start,
    End,
}

/// A time relative to an interval: `Start + offset` or `End - offset`,
/// with `offset >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimedRef<T = Time> {
    pub anchor: Anchor,
    pub offset: T,
}

impl<T: TimeScalar> TimedRef<T> {
    pub fn start(offset: T) -> Self {
        TimedRef { anchor: Anchor::Start, offset }
    }

    pub fn end(offset: T) -> Self {
        TimedRef { anchor: Anchor::End, offset }
    }

    /// Absolute time of this reference given the interval's endpoints.
    pub fn resolve(&self, start: &T, end: &T) -> T {
        match self.anchor {
            Anchor::Start => start.clone() + self.offset.clone(),
            Anchor::End => end.clone() - self.offset.clone(),
        }
    }
}

impl<T: TimeScalar> fmt::Display for TimedRef<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.anchor {
            Anchor::Start => write!(f, "start+{}", self.offset),
            Anchor::End => write!(f, "end-{}", self.offset),
        }
    }
}

/// Whether an effect makes its predicate true or false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Add,
    Delete,
}

/// A single add or delete of `predicate` at the relative time `at`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Effect<T = Time> {
    pub at: TimedRef<T>,
    pub predicate: String,
    pub polarity: Polarity,
}

impl<T: TimeScalar> Effect<T> {
    pub fn add(at: TimedRef<T>, predicate: impl Into<String>) -> Self {
        Effect { at, predicate: predicate.into(), polarity: Polarity::Add }
    }

    pub fn delete(at: TimedRef<T>, predicate: impl Into<String>) -> Self {
        Effect { at, predicate: predicate.into(), polarity: Polarity::Delete }
    }
}

/// `predicate` must hold over the closed interval `[from, to]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Condition<T = Time> {
    pub from: TimedRef<T>,
    pub to: TimedRef<T>,
    pub predicate: String,
}

impl<T: TimeScalar> Condition<T> {
    pub fn over(from: TimedRef<T>, to: TimedRef<T>, predicate: impl Into<String>) -> Self {
        Condition { from, to, predicate: predicate.into() }
    }

    /// Degenerate interval: both ends are the same timed reference.
    pub fn at(when: TimedRef<T>, predicate: impl Into<String>) -> Self {
        Condition { from: when.clone(), to: when, predicate: predicate.into() }
    }

    pub fn is_instantaneous(&self) -> bool {
        self.from == self.to
    }
}

/// A durative action. Conditions and effects may sit anywhere inside the
/// duration, referenced from either end.
///
/// `duration_open_low`/`duration_open_high` mark half-open duration bounds;
/// they are always false for authored actions and only set on the duration
/// pieces produced by order splitting (see [`crate::search::split`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action<T = Time> {
    pub name: String,
    pub d_min: T,
    pub d_max: T,
    pub duration_open_low: bool,
    pub duration_open_high: bool,
    pub conditions: Vec<Condition<T>>,
    pub effects: Vec<Effect<T>>,
}

impl<T: TimeScalar> Action<T> {
    pub fn new(name: impl Into<String>, d_min: T, d_max: T) -> Self {
        Action {
            name: name.into(),
            d_min,
            d_max,
            duration_open_low: false,
            duration_open_high: false,
            conditions: Vec::new(),
            effects: Vec::new(),
        }
    }

    /// Fixed-duration action (`d_min == d_max`).
    pub fn fixed(name: impl Into<String>, duration: T) -> Self {
        Action::new(name, duration.clone(), duration)
    }

    pub fn add_effects(&self) -> impl Iterator<Item = &Effect<T>> {
        self.effects.iter().filter(|e| e.polarity == Polarity::Add)
    }

    pub fn del_effects(&self) -> impl Iterator<Item = &Effect<T>> {
        self.effects.iter().filter(|e| e.polarity == Polarity::Delete)
    }
}

/// A planning problem: declared predicates, actions, the initial state,
/// timed initial literals (effects anchored to the plan start/end) and timed
/// goals (conditions with the same anchoring).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Problem<T = Time> {
    pub predicates: BTreeSet<String>,
    pub actions: Vec<Action<T>>,
    pub init: BTreeSet<String>,
    pub tils: Vec<Effect<T>>,
    pub goals: Vec<Condition<T>>,
}

impl<T: TimeScalar> Problem<T> {
    pub fn action(&self, name: &str) -> Option<&Action<T>> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// One scheduled action instance: start time, action name, duration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlanStep<T = Time> {
    pub start: T,
    pub action: String,
    pub duration: T,
}

impl<T: TimeScalar> PlanStep<T> {
    pub fn new(start: T, action: impl Into<String>, duration: T) -> Self {
        PlanStep { start, action: action.into(), duration }
    }

    pub fn end(&self) -> T {
        self.start.clone() + self.duration.clone()
    }
}

/// A plan: a set of steps plus an explicit plan-end anchor.
///
/// End-relative timed initial literals and goals resolve against `plan_end`,
/// which must be at least the step makespan. Steps are kept sorted and
/// deduplicated (a plan is a set of tuples).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan<T = Time> {
    pub steps: Vec<PlanStep<T>>,
    pub plan_end: T,
}

impl<T: TimeScalar> Plan<T> {
    pub fn new(steps: Vec<PlanStep<T>>, plan_end: T) -> Self {
        let mut steps = steps;
        steps.sort();
        steps.dedup();
        Plan { steps, plan_end }
    }

    /// Plan with `plan_end` defaulted to the step makespan.
    pub fn with_default_end(steps: Vec<PlanStep<T>>) -> Self {
        let end = makespan(&steps);
        Plan::new(steps, end)
    }

    pub fn makespan(&self) -> T {
        makespan(&self.steps)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Maximum end time over the steps; zero for no steps.
pub fn makespan<T: TimeScalar>(steps: &[PlanStep<T>]) -> T {
    steps.iter().map(|s| s.end()).max().unwrap_or_else(T::zero)
}

/// A well-formedness violation found by [`normalize_problem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// A predicate is used but not declared in `predicates`.
    UndeclaredPredicate { predicate: String, site: String },
    /// A timed reference carries a negative offset.
    NegativeOffset { site: String, offset: String },
    /// `d_min > d_max`.
    DurationOrder { action: String },
    /// `d_max <= 0` or `d_min < 0`.
    InvalidDurationBound { action: String, detail: String },
    /// The same (time, predicate) pair is both added and deleted.
    ContradictoryEffects { site: String, predicate: String, at: String },
    /// A same-anchor condition interval whose resolved bounds are reversed.
    ReversedConditionInterval { site: String, predicate: String },
    /// Two actions share a name, making plan steps ambiguous.
    DuplicateActionName { action: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndeclaredPredicate { predicate, site } => {
                write!(f, "undeclared predicate {predicate:?} in {site}")
            }
            Diagnostic::NegativeOffset { site, offset } => {
                write!(f, "negative offset {offset} in {site}")
            }
            Diagnostic::DurationOrder { action } => {
                write!(f, "action {action:?} has d_min > d_max")
            }
            Diagnostic::InvalidDurationBound { action, detail } => {
                write!(f, "action {action:?} has an invalid duration bound: {detail}")
            }
            Diagnostic::ContradictoryEffects { site, predicate, at } => {
                write!(f, "contradictory effect pair on {predicate:?} at {at} in {site}")
            }
            Diagnostic::ReversedConditionInterval { site, predicate } => {
                write!(f, "condition interval on {predicate:?} in {site} is reversed")
            }
            Diagnostic::DuplicateActionName { action } => {
                write!(f, "duplicate action name {action:?}")
            }
        }
    }
}

/// Checks well-formedness and returns the problem in canonical form:
/// duplicate conditions/effects collapsed, deterministic ordering, scalars
/// already in lowest terms by construction. On failure returns the complete
/// list of violations.
pub fn normalize_problem<T: TimeScalar>(problem: &Problem<T>) -> Result<Problem<T>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let declared = &problem.predicates;

    let check_pred = |pred: &str, site: &str, diags: &mut Vec<Diagnostic>| {
        if !declared.contains(pred) {
            diags.push(Diagnostic::UndeclaredPredicate {
                predicate: pred.to_string(),
                site: site.to_string(),
            });
        }
    };
    let check_offset = |tr: &TimedRef<T>, site: &str, diags: &mut Vec<Diagnostic>| {
        if tr.offset < T::zero() {
            diags.push(Diagnostic::NegativeOffset {
                site: site.to_string(),
                offset: tr.offset.to_string(),
            });
        }
    };
    fn check_effect_clash<T: TimeScalar>(
        effects: &[Effect<T>],
        site: &str,
        diags: &mut Vec<Diagnostic>,
    ) {
        let adds: BTreeSet<_> = effects
            .iter()
            .filter(|e| e.polarity == Polarity::Add)
            .map(|e| (&e.at, &e.predicate))
            .collect();
        for e in effects.iter().filter(|e| e.polarity == Polarity::Delete) {
            if adds.contains(&(&e.at, &e.predicate)) {
                diags.push(Diagnostic::ContradictoryEffects {
                    site: site.to_string(),
                    predicate: e.predicate.clone(),
                    at: e.at.to_string(),
                });
            }
        }
    }
    fn check_interval<T: TimeScalar>(c: &Condition<T>, site: &str, diags: &mut Vec<Diagnostic>) {
        if c.from.anchor == c.to.anchor {
            let reversed = match c.from.anchor {
                // [start+k1, start+k2] needs k1 <= k2; [end-k1, end-k2] needs k1 >= k2.
                Anchor::Start => c.from.offset > c.to.offset,
                Anchor::End => c.from.offset < c.to.offset,
            };
            if reversed {
                diags.push(Diagnostic::ReversedConditionInterval {
                    site: site.to_string(),
                    predicate: c.predicate.clone(),
                });
            }
        }
    }

    for p in &problem.init {
        check_pred(p, "init", &mut diags);
    }

    let mut seen_names = BTreeSet::new();
    for action in &problem.actions {
        let site = format!("action {:?}", action.name);
        if !seen_names.insert(&action.name) {
            diags.push(Diagnostic::DuplicateActionName { action: action.name.clone() });
        }
        if action.d_min > action.d_max {
            diags.push(Diagnostic::DurationOrder { action: action.name.clone() });
        }
        if action.d_min < T::zero() {
            diags.push(Diagnostic::InvalidDurationBound {
                action: action.name.clone(),
                detail: format!("d_min {} < 0", action.d_min),
            });
        }
        if action.d_max <= T::zero() {
            diags.push(Diagnostic::InvalidDurationBound {
                action: action.name.clone(),
                detail: format!("d_max {} <= 0", action.d_max),
            });
        }
        for c in &action.conditions {
            check_pred(&c.predicate, &site, &mut diags);
            check_offset(&c.from, &site, &mut diags);
            check_offset(&c.to, &site, &mut diags);
            check_interval(c, &site, &mut diags);
        }
        for e in &action.effects {
            check_pred(&e.predicate, &site, &mut diags);
            check_offset(&e.at, &site, &mut diags);
        }
        check_effect_clash(&action.effects, &site, &mut diags);
    }

    for e in &problem.tils {
        check_pred(&e.predicate, "timed initial literals", &mut diags);
        check_offset(&e.at, "timed initial literals", &mut diags);
    }
    check_effect_clash(&problem.tils, "timed initial literals", &mut diags);
    for c in &problem.goals {
        check_pred(&c.predicate, "goals", &mut diags);
        check_offset(&c.from, "goals", &mut diags);
        check_offset(&c.to, "goals", &mut diags);
        check_interval(c, "goals", &mut diags);
    }

    if !diags.is_empty() {
        return Err(diags);
    }

    let mut out = problem.clone();
    for action in &mut out.actions {
        action.conditions.sort();
        action.conditions.dedup();
        action.effects.sort();
        action.effects.dedup();
    }
    out.tils.sort();
    out.tils.dedup();
    out.goals.sort();
    out.goals.dedup();
    Ok(out)
}
