//! Timed time-points of conditions and effects, and splitting of an action's
//! duration range into pieces over which their relative order is invariant.
//!
//! An action's events resolve to `start + k` or `end - k'`; the order of a
//! start-anchored and an end-anchored event flips exactly at the duration
//! `k + k'`. Collecting those critical durations inside `[d_min, d_max]`
//! yields a partition into maximal open intervals between consecutive
//! critical values plus a degenerate closed piece at each critical value
//! (range endpoints stay closed when not critical). Within a piece, events
//! are totally ordered by resolved time with the deterministic tie-break
//! condition-end < instantaneous-condition < condition-start < add < delete,
//! then by predicate name.

use crate::model::{Action, Condition, Effect, Polarity, TimedRef};
use crate::scalar::{DenseTimeScalar, TimeScalar};
use crate::Time;

/// What kind of event a timed time-point is. Declaration order is the
/// within-instant expansion order: ends of durative conditions release their
/// guards first, conditions are checked before effects apply, adds before
/// deletes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    CondEnd,
    CondInstant,
    CondStart,
    EffectAdd,
    EffectDelete,
}

impl ItemKind {
    pub fn is_condition(self) -> bool {
        matches!(self, ItemKind::CondEnd | ItemKind::CondInstant | ItemKind::CondStart)
    }

    pub fn is_effect(self) -> bool {
        matches!(self, ItemKind::EffectAdd | ItemKind::EffectDelete)
    }
}

/// One timed time-point: an event kind on a predicate at a relative time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TtpItem<T = Time> {
    pub at: TimedRef<T>,
    pub kind: ItemKind,
    pub predicate: String,
}

/// Timed time-points of a condition set: a degenerate interval becomes one
/// instantaneous check, anything else a start/end pair.
pub fn condition_time_points<T: TimeScalar>(conditions: &[Condition<T>]) -> Vec<TtpItem<T>> {
    let mut items = Vec::new();
    for c in conditions {
        if c.is_instantaneous() {
            items.push(TtpItem {
                at: c.from.clone(),
                kind: ItemKind::CondInstant,
                predicate: c.predicate.clone(),
            });
        } else {
            items.push(TtpItem {
                at: c.from.clone(),
                kind: ItemKind::CondStart,
                predicate: c.predicate.clone(),
            });
            items.push(TtpItem {
                at: c.to.clone(),
                kind: ItemKind::CondEnd,
                predicate: c.predicate.clone(),
            });
        }
    }
    dedup(items)
}

/// Timed time-points of an effect set.
pub fn effect_time_points<T: TimeScalar>(effects: &[Effect<T>]) -> Vec<TtpItem<T>> {
    let items = effects
        .iter()
        .map(|e| TtpItem {
            at: e.at.clone(),
            kind: match e.polarity {
                Polarity::Add => ItemKind::EffectAdd,
                Polarity::Delete => ItemKind::EffectDelete,
            },
            predicate: e.predicate.clone(),
        })
        .collect();
    dedup(items)
}

/// Timed time-points of a whole action (conditions and effects, as a set).
pub fn action_time_points<T: TimeScalar>(action: &Action<T>) -> Vec<TtpItem<T>> {
    let mut items = condition_time_points(&action.conditions);
    items.extend(effect_time_points(&action.effects));
    dedup(items)
}

fn dedup<T: TimeScalar>(mut items: Vec<TtpItem<T>>) -> Vec<TtpItem<T>> {
    items.sort();
    items.dedup();
    items
}

/// A sub-interval of an action's duration range over which the total order
/// of its timed time-points is invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece<T = Time> {
    /// Index of the base action in the problem's action list.
    pub action_index: usize,
    pub lo: T,
    pub hi: T,
    pub open_lo: bool,
    pub open_hi: bool,
    /// The fixed total order of the action's timed time-points in this piece.
    pub order: Vec<TtpItem<T>>,
    /// Simultaneity group per `order` position: consecutive positions share
    /// a group id exactly when their resolved times coincide for every
    /// duration in the piece.
    pub groups: Vec<u32>,
}

impl<T: TimeScalar> Piece<T> {
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// True when `d` lies inside the piece's interval.
    pub fn contains(&self, d: &T) -> bool {
        let above = if self.open_lo { *d > self.lo } else { *d >= self.lo };
        let below = if self.open_hi { *d < self.hi } else { *d <= self.hi };
        above && below
    }
}

/// Splits `action` (at `action_index` in its problem) into order-invariant
/// duration pieces covering `[d_min, d_max]` exactly, with pairwise-disjoint
/// interiors.
pub fn split_action<T: DenseTimeScalar>(action: &Action<T>, action_index: usize) -> Vec<Piece<T>> {
    let items = action_time_points(action);
    let start_offsets: Vec<&T> = {
        let mut v: Vec<&T> = items
            .iter()
            .filter(|i| i.at.anchor == crate::model::Anchor::Start)
            .map(|i| &i.at.offset)
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let end_offsets: Vec<&T> = {
        let mut v: Vec<&T> = items
            .iter()
            .filter(|i| i.at.anchor == crate::model::Anchor::End)
            .map(|i| &i.at.offset)
            .collect();
        v.sort();
        v.dedup();
        v
    };

    let mut criticals: Vec<T> = Vec::new();
    for k in &start_offsets {
        for k2 in &end_offsets {
            let c = (*k).clone() + (*k2).clone();
            if c >= action.d_min && c <= action.d_max {
                criticals.push(c);
            }
        }
    }
    criticals.sort();
    criticals.dedup();

    // Interval bounds first: (lo, hi, open_lo, open_hi).
    let mut bounds: Vec<(T, T, bool, bool)> = Vec::new();
    let mut cursor = action.d_min.clone();
    let mut cursor_open = false;
    for c in criticals {
        if cursor < c {
            bounds.push((cursor.clone(), c.clone(), cursor_open, true));
        }
        bounds.push((c.clone(), c.clone(), false, false));
        cursor = c;
        cursor_open = true;
    }
    if cursor < action.d_max {
        bounds.push((cursor, action.d_max.clone(), cursor_open, false));
    } else if bounds.is_empty() {
        // No critical values and d_min == d_max: one degenerate closed piece.
        bounds.push((action.d_min.clone(), action.d_max.clone(), false, false));
    }

    bounds
        .into_iter()
        .map(|(lo, hi, open_lo, open_hi)| {
            let sample = if lo == hi { lo.clone() } else { (lo.clone() + hi.clone()).halved() };
            let (order, groups) = order_at(&items, &sample);
            Piece { action_index, lo, hi, open_lo, open_hi, order, groups }
        })
        .collect()
}

/// Total order of the items for duration `sample`, with simultaneity groups.
fn order_at<T: TimeScalar>(items: &[TtpItem<T>], sample: &T) -> (Vec<TtpItem<T>>, Vec<u32>) {
    let zero = T::zero();
    let mut keyed: Vec<(T, &TtpItem<T>)> = items
        .iter()
        .map(|item| (item.at.resolve(&zero, sample), item))
        .collect();
    keyed.sort_by(|(ta, a), (tb, b)| {
        ta.cmp(tb)
            .then(a.kind.cmp(&b.kind))
            .then(a.predicate.cmp(&b.predicate))
            .then(a.at.cmp(&b.at))
    });
    let mut order = Vec::with_capacity(keyed.len());
    let mut groups = Vec::with_capacity(keyed.len());
    let mut group = 0u32;
    let mut prev_time: Option<&T> = None;
    for (time, item) in &keyed {
        if let Some(prev) = prev_time {
            if prev != time {
                group += 1;
            }
        }
        groups.push(group);
        order.push((*item).clone());
        prev_time = Some(time);
    }
    (order, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Anchor;
    use crate::scalar::{time_frac, time_int};

    fn crossing_action() -> Action {
        let mut a = Action::new("a", time_int(1), time_int(5));
        a.effects.push(Effect::add(TimedRef::start(time_int(2)), "p"));
        a.effects.push(Effect::add(TimedRef::end(time_int(1)), "q"));
        a
    }

    #[test]
    fn instantaneous_condition_maps_to_single_check() {
        let c = Condition::at(TimedRef::start(time_int(2)), "q");
        let items = condition_time_points(std::slice::from_ref(&c));
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].kind, ItemKind::CondInstant);
    }

    #[test]
    fn durative_condition_maps_to_start_end_pair() {
        let c = Condition::over(TimedRef::start(time_int(0)), TimedRef::end(time_int(1)), "q");
        let items = condition_time_points(std::slice::from_ref(&c));
        assert_eq!(items.len(), 2);
        assert!(items.iter().any(|i| i.kind == ItemKind::CondStart && i.at.anchor == Anchor::Start));
        assert!(items.iter().any(|i| i.kind == ItemKind::CondEnd && i.at.anchor == Anchor::End));
    }

    #[test]
    fn effects_map_by_polarity() {
        let es = vec![
            Effect::add(TimedRef::start(time_int(1)), "p"),
            Effect::delete(TimedRef::end(time_int(0)), "q"),
        ];
        let items = effect_time_points(&es);
        assert!(items.iter().any(|i| i.kind == ItemKind::EffectAdd && i.predicate == "p"));
        assert!(items.iter().any(|i| i.kind == ItemKind::EffectDelete && i.predicate == "q"));
    }

    #[test]
    fn crossing_pair_splits_into_three_pieces() {
        let pieces = split_action(&crossing_action(), 0);
        assert_eq!(pieces.len(), 3);
        // [1, 3), {3}, (3, 5]
        assert_eq!((pieces[0].lo.clone(), pieces[0].hi.clone()), (time_int(1), time_int(3)));
        assert!(!pieces[0].open_lo && pieces[0].open_hi);
        assert!(pieces[1].is_degenerate() && pieces[1].lo == time_int(3));
        assert_eq!((pieces[2].lo.clone(), pieces[2].hi.clone()), (time_int(3), time_int(5)));
        assert!(pieces[2].open_lo && !pieces[2].open_hi);
    }

    #[test]
    fn crossing_pair_orders_flip_across_the_critical_value() {
        let pieces = split_action(&crossing_action(), 0);
        // Below the crossing the end-anchored effect (on q) comes first.
        assert_eq!(pieces[0].order[0].predicate, "q");
        assert_eq!(pieces[2].order[0].predicate, "p");
        // At the crossing both are simultaneous: one group.
        assert_eq!(pieces[1].groups, vec![0, 0]);
        // Away from it: two groups.
        assert_eq!(pieces[0].groups, vec![0, 1]);
    }

    #[test]
    fn start_only_action_is_one_piece() {
        let mut a = Action::new("a", time_int(1), time_int(9));
        a.effects.push(Effect::add(TimedRef::start(time_int(3)), "p"));
        a.conditions.push(Condition::at(TimedRef::start(time_int(0)), "q"));
        let pieces = split_action(&a, 0);
        assert_eq!(pieces.len(), 1);
        assert_eq!((pieces[0].lo.clone(), pieces[0].hi.clone()), (time_int(1), time_int(9)));
        assert!(!pieces[0].open_lo && !pieces[0].open_hi);
    }

    #[test]
    fn fixed_duration_action_is_one_degenerate_piece() {
        let mut a = Action::fixed("a", time_int(2));
        a.effects.push(Effect::add(TimedRef::start(time_int(1)), "p"));
        let pieces = split_action(&a, 0);
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].is_degenerate());
    }

    #[test]
    fn two_by_two_crossings_bound_piece_count() {
        let mut a = Action::new("a", time_int(0), time_int(100));
        a.effects.push(Effect::add(TimedRef::start(time_int(1)), "p1"));
        a.effects.push(Effect::add(TimedRef::start(time_int(2)), "p2"));
        a.effects.push(Effect::delete(TimedRef::end(time_int(1)), "p3"));
        a.effects.push(Effect::delete(TimedRef::end(time_int(2)), "p4"));
        let pieces = split_action(&a, 0);
        // At most 4 critical values => at most 9 pieces.
        assert!(pieces.len() <= 9);
        let criticals = pieces.iter().filter(|p| p.is_degenerate()).count();
        assert!(criticals <= 4);
    }

    #[test]
    fn critical_value_at_range_boundary() {
        // Crossing at exactly d_min: degenerate piece first, then open-low.
        let mut a = Action::new("a", time_int(3), time_int(5));
        a.effects.push(Effect::add(TimedRef::start(time_int(2)), "p"));
        a.effects.push(Effect::add(TimedRef::end(time_int(1)), "q"));
        let pieces = split_action(&a, 0);
        assert_eq!(pieces.len(), 2);
        assert!(pieces[0].is_degenerate() && pieces[0].lo == time_int(3));
        assert!(pieces[1].open_lo && !pieces[1].open_hi);
        assert_eq!(pieces[1].hi, time_int(5));
    }

    #[test]
    fn pieces_partition_the_duration_range() {
        let pieces = split_action(&crossing_action(), 0);
        // Consecutive pieces abut, and the shared boundary point belongs to
        // exactly one of them.
        for w in pieces.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
            assert!(w[0].open_hi != w[1].open_lo);
        }
        // Sampled durations stay inside exactly one piece.
        for d in [time_int(1), time_int(2), time_int(3), time_frac(7, 2), time_int(5)] {
            assert_eq!(pieces.iter().filter(|p| p.contains(&d)).count(), 1, "duration {d}");
        }
    }

    #[test]
    fn tie_break_orders_conditions_before_effects() {
        let mut a = Action::fixed("a", time_int(2));
        a.conditions.push(Condition::at(TimedRef::start(time_int(0)), "w"));
        a.effects.push(Effect::delete(TimedRef::start(time_int(0)), "w"));
        a.effects.push(Effect::add(TimedRef::start(time_int(0)), "b"));
        let pieces = split_action(&a, 0);
        let kinds: Vec<ItemKind> = pieces[0].order.iter().map(|i| i.kind).collect();
        assert_eq!(kinds, vec![ItemKind::CondInstant, ItemKind::EffectAdd, ItemKind::EffectDelete]);
        // All three share an instant: a single simultaneity group.
        assert_eq!(pieces[0].groups, vec![0, 0, 0]);
    }
}
