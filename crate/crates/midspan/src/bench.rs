//! Deterministic generators for benchmark problem families. Each generator
//! is a pure function of its parameters and produces a problem that passes
//! normalization with no diagnostics.

use crate::model::{Action, Condition, Effect, Problem, TimedRef};
use crate::scalar::{format_rational, time_int};
use crate::Time;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Parameters of the painter family: a single worker applies `coats` coats
/// of paint to each of `items` items; consecutive coats on one item must be
/// separated by a gap between `min_gap` and `max_gap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PainterSpec {
    pub coats: u32,
    pub items: u32,
    pub min_gap: Time,
    pub max_gap: Time,
    pub coat_duration: Time,
}

impl PainterSpec {
    /// Grid defaults: unit coats, gap between 1 and 3.
    pub fn new(coats: u32, items: u32) -> Self {
        PainterSpec {
            coats,
            items,
            min_gap: time_int(1),
            max_gap: time_int(3),
            coat_duration: time_int(1),
        }
    }
}

/// A generator was given parameters outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator parameters: {0}")]
pub struct BenchSpecError(pub String);

/// Painter encoding notes, emitted as the generated document's comment.
pub fn painter_header(spec: &PainterSpec) -> String {
    format!(
        "painter: {} coats on {} items, one worker. A coat occupies the worker for {} \
         (worker-free is deleted at start and re-added {} after start). Every coat except \
         the last runs on for max_gap beyond the paint work: it adds the next coat's \
         enabling window at start+{} and deletes it at its own end (start+{}). Under the \
         strictly-before trace semantics the next coat's start therefore lands in \
         (prev_paint_end + {}, prev_paint_end + {}]: open at the minimum gap, closed at \
         the maximum. Equal gaps make the window empty and the instance unsolvable.",
        spec.coats,
        spec.items,
        format_rational(&spec.coat_duration),
        format_rational(&spec.coat_duration),
        format_rational(&(spec.coat_duration.clone() + spec.min_gap.clone())),
        format_rational(&(spec.coat_duration.clone() + spec.max_gap.clone())),
        format_rational(&spec.min_gap),
        format_rational(&spec.max_gap),
    )
}

/// Generates a painter instance. One `worker-free` mutex serializes coats;
/// `coated-<item>-<coat>` tracks progress; `window-<item>-<coat>` enables a
/// coat only inside the gap window opened by its predecessor.
pub fn gen_painter(spec: &PainterSpec) -> Result<Problem, BenchSpecError> {
    if spec.coats < 2 {
        return Err(BenchSpecError(format!("coats must be at least 2, got {}", spec.coats)));
    }
    if spec.items < 1 {
        return Err(BenchSpecError("items must be at least 1".into()));
    }
    if spec.min_gap <= Time::zero() {
        return Err(BenchSpecError("min_gap must be positive".into()));
    }
    if spec.min_gap > spec.max_gap {
        return Err(BenchSpecError(format!(
            "min_gap {} exceeds max_gap {}",
            format_rational(&spec.min_gap),
            format_rational(&spec.max_gap)
        )));
    }
    if spec.coat_duration <= Time::zero() {
        return Err(BenchSpecError("coat_duration must be positive".into()));
    }

    let cd = &spec.coat_duration;
    let mut predicates = BTreeSet::new();
    predicates.insert("worker-free".to_string());
    let coated = |i: u32, c: u32| format!("coated-{i}-{c}");
    let window = |i: u32, c: u32| format!("window-{i}-{c}");
    for i in 1..=spec.items {
        for c in 1..=spec.coats {
            predicates.insert(coated(i, c));
            if c >= 2 {
                predicates.insert(window(i, c));
            }
        }
    }

    let mut actions = Vec::new();
    for i in 1..=spec.items {
        for c in 1..=spec.coats {
            let last = c == spec.coats;
            let duration =
                if last { cd.clone() } else { cd.clone() + spec.max_gap.clone() };
            let mut a = Action::fixed(format!("paint-{i}-{c}"), duration);
            a.conditions
                .push(Condition::at(TimedRef::start(Time::zero()), "worker-free"));
            if c >= 2 {
                a.conditions
                    .push(Condition::at(TimedRef::start(Time::zero()), window(i, c)));
            }
            a.effects
                .push(Effect::delete(TimedRef::start(Time::zero()), "worker-free"));
            a.effects
                .push(Effect::add(TimedRef::start(cd.clone()), "worker-free"));
            a.effects.push(Effect::add(TimedRef::start(cd.clone()), coated(i, c)));
            if !last {
                a.effects.push(Effect::add(
                    TimedRef::start(cd.clone() + spec.min_gap.clone()),
                    window(i, c + 1),
                ));
                a.effects
                    .push(Effect::delete(TimedRef::end(Time::zero()), window(i, c + 1)));
            }
            actions.push(a);
        }
    }

    let goals = (1..=spec.items)
        .map(|i| Condition::at(TimedRef::end(Time::zero()), coated(i, spec.coats)))
        .collect();

    Ok(Problem {
        predicates,
        actions,
        init: std::iter::once("worker-free".to_string()).collect(),
        tils: vec![],
        goals,
    })
}

/// Fuse-mending family exercising timed initial literals: `windows` light
/// windows are provided by TIL pairs (light on, off 3 later, every 10 time
/// units); mending a fuse takes 2 units, requires light throughout and both
/// hands.
pub fn gen_matchcellar(fuses: u32, windows: u32) -> Result<Problem, BenchSpecError> {
    if fuses < 1 {
        return Err(BenchSpecError("fuses must be at least 1".into()));
    }
    let mut predicates: BTreeSet<String> =
        ["light", "hands-free"].iter().map(|s| s.to_string()).collect();
    let mended = |f: u32| format!("mended-{f}");
    for f in 1..=fuses {
        predicates.insert(mended(f));
    }

    let mut tils = Vec::new();
    for w in 0..windows {
        let open = time_int(10 * i64::from(w));
        let close = open.clone() + time_int(3);
        tils.push(Effect::add(TimedRef::start(open), "light"));
        tils.push(Effect::delete(TimedRef::start(close), "light"));
    }

    let mut actions = Vec::new();
    for f in 1..=fuses {
        let mut a = Action::fixed(format!("mend-{f}"), time_int(2));
        a.conditions.push(Condition::over(
            TimedRef::start(Time::zero()),
            TimedRef::end(Time::zero()),
            "light",
        ));
        a.conditions
            .push(Condition::at(TimedRef::start(Time::zero()), "hands-free"));
        a.effects
            .push(Effect::delete(TimedRef::start(Time::zero()), "hands-free"));
        a.effects
            .push(Effect::add(TimedRef::end(Time::zero()), "hands-free"));
        a.effects.push(Effect::add(TimedRef::end(Time::zero()), mended(f)));
        actions.push(a);
    }

    let goals = (1..=fuses)
        .map(|f| Condition::at(TimedRef::end(Time::zero()), mended(f)))
        .collect();

    Ok(Problem {
        predicates,
        actions,
        init: std::iter::once("hands-free".to_string()).collect(),
        tils,
        goals,
    })
}

/// One light window per fuse: solvable by mending each fuse in its own
/// window.
pub fn gen_matchcellar_like(fuses: u32) -> Problem {
    gen_matchcellar(fuses, fuses).expect("fuses >= 1")
}

/// Deadline family: each task's trigger opens a window (add at start,
/// delete `window` later at its end); the follow-up must run entirely
/// inside it. Solvable exactly when `follow < window`.
pub fn gen_deadline_with(
    tasks: u32,
    window: Time,
    follow: Time,
) -> Result<Problem, BenchSpecError> {
    if tasks < 1 {
        return Err(BenchSpecError("tasks must be at least 1".into()));
    }
    if window <= Time::zero() || follow <= Time::zero() {
        return Err(BenchSpecError("window and follow-up durations must be positive".into()));
    }

    let mut predicates = BTreeSet::new();
    let win = |t: u32| format!("window-{t}");
    let done = |t: u32| format!("done-{t}");
    for t in 1..=tasks {
        predicates.insert(win(t));
        predicates.insert(done(t));
    }

    let mut actions = Vec::new();
    for t in 1..=tasks {
        let mut trigger = Action::fixed(format!("trigger-{t}"), window.clone());
        trigger.effects.push(Effect::add(TimedRef::start(Time::zero()), win(t)));
        trigger.effects.push(Effect::delete(TimedRef::end(Time::zero()), win(t)));
        actions.push(trigger);

        let mut follow_up = Action::fixed(format!("follow-{t}"), follow.clone());
        follow_up.conditions.push(Condition::over(
            TimedRef::start(Time::zero()),
            TimedRef::end(Time::zero()),
            win(t),
        ));
        follow_up.effects.push(Effect::add(TimedRef::end(Time::zero()), done(t)));
        actions.push(follow_up);
    }

    let goals = (1..=tasks)
        .map(|t| Condition::at(TimedRef::end(Time::zero()), done(t)))
        .collect();

    Ok(Problem { predicates, actions, init: BTreeSet::new(), tils: vec![], goals })
}

/// Default deadline instance: window 2, follow-up 1 (solvable).
pub fn gen_deadline(tasks: u32) -> Problem {
    gen_deadline_with(tasks, time_int(2), time_int(1)).expect("tasks >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::normalize_problem;
    use crate::scalar::time_frac;
    use crate::search::{search, SearchConfig, SearchOutcome, UnsolvedReason};
    use crate::validator::validate;

    #[test]
    fn painter_rejects_reversed_gaps() {
        let mut spec = PainterSpec::new(2, 1);
        spec.min_gap = time_int(4);
        assert!(gen_painter(&spec).is_err());
    }

    #[test]
    fn painter_rejects_too_few_coats() {
        assert!(gen_painter(&PainterSpec::new(1, 1)).is_err());
    }

    #[test]
    fn generators_normalize_cleanly() {
        assert!(normalize_problem(&gen_painter(&PainterSpec::new(3, 2)).unwrap()).is_ok());
        assert!(normalize_problem(&gen_matchcellar_like(3)).is_ok());
        assert!(normalize_problem(&gen_deadline(3)).is_ok());
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = PainterSpec::new(3, 2);
        assert_eq!(gen_painter(&spec).unwrap(), gen_painter(&spec).unwrap());
        assert_eq!(gen_matchcellar_like(2), gen_matchcellar_like(2));
        assert_eq!(gen_deadline(2), gen_deadline(2));
    }

    #[test]
    fn smallest_painter_instance_solves_and_validates() {
        let problem = gen_painter(&PainterSpec::new(2, 1)).unwrap();
        let outcome = search(&problem, &SearchConfig::default()).unwrap();
        let plan = outcome.plan().expect("solvable");
        assert!(validate(&problem, plan).is_valid());
        assert_eq!(plan.steps.len(), 2);
    }

    #[test]
    fn painter_respects_gap_window_in_extracted_plans() {
        let problem = gen_painter(&PainterSpec::new(2, 1)).unwrap();
        let plan = search(&problem, &SearchConfig::default())
            .unwrap()
            .plan()
            .cloned()
            .expect("solvable");
        let first = plan.steps.iter().find(|s| s.action == "paint-1-1").unwrap();
        let second = plan.steps.iter().find(|s| s.action == "paint-1-2").unwrap();
        let paint_end = first.start.clone() + time_int(1); // coat_duration
        let gap = second.start.clone() - paint_end;
        assert!(gap > time_int(1) && gap <= time_int(3), "gap {gap}");
    }

    #[test]
    fn fractional_gaps_stay_exact() {
        let spec = PainterSpec {
            coats: 2,
            items: 1,
            min_gap: time_frac(1, 3),
            max_gap: time_frac(1, 2),
            coat_duration: time_frac(2, 3),
        };
        let problem = gen_painter(&spec).unwrap();
        let plan = search(&problem, &SearchConfig::default())
            .unwrap()
            .plan()
            .cloned()
            .expect("solvable");
        assert_eq!(plan.steps.len(), 2);
        assert!(validate(&problem, &plan).is_valid());
    }

    #[test]
    fn matchcellar_single_fuse_mends_inside_the_window() {
        let problem = gen_matchcellar_like(1);
        let outcome = search(&problem, &SearchConfig::default()).unwrap();
        let plan = outcome.plan().expect("solvable");
        assert!(validate(&problem, plan).is_valid());
        let mend = &plan.steps[0];
        assert!(mend.start > time_int(0) && mend.start.clone() + time_int(2) <= time_int(3));
    }

    #[test]
    fn more_fuses_than_windows_is_unsolvable_within_limits() {
        let problem = gen_matchcellar(2, 1).unwrap();
        let config = SearchConfig { max_expansions: Some(2000), ..Default::default() };
        let outcome = search(&problem, &config).unwrap();
        assert!(outcome.plan().is_none());
    }

    #[test]
    fn deadline_follow_up_fits_inside_window() {
        let problem = gen_deadline(1);
        let outcome = search(&problem, &SearchConfig::default()).unwrap();
        let plan = outcome.plan().expect("solvable");
        assert!(validate(&problem, plan).is_valid());
    }

    #[test]
    fn deadline_follow_up_larger_than_window_dead_ends() {
        let problem = gen_deadline_with(1, time_int(1), time_int(2)).unwrap();
        let config = SearchConfig { max_expansions: Some(2000), ..Default::default() };
        match search(&problem, &config).unwrap() {
            SearchOutcome::Unsolved { reason, .. } => {
                assert!(matches!(
                    reason,
                    UnsolvedReason::Exhausted | UnsolvedReason::ExpansionLimit
                ));
            }
            SearchOutcome::Solved { plan, .. } => panic!("impossible plan {plan:?}"),
        }
    }

    #[test]
    fn painter_header_mentions_the_window_contract() {
        let header = painter_header(&PainterSpec::new(2, 1));
        assert!(header.contains("worker"));
        assert!(header.contains("(prev_paint_end + 1, prev_paint_end + 3]"));
    }
}
