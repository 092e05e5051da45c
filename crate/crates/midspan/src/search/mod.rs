//! The time-point search space and best-first engine.
//!
//! States carry the facts currently true, a multiset of durative-condition
//! guards, an agenda of pending time-points (sorted lists whose heads are the
//! only expandable elements), a simple temporal network over every time-point
//! committed so far, and the last expanded time-point. The engine either
//! expands the head of one agenda list (applying effects, checking
//! conditions, ordering the remaining commitments after it) or opens a new
//! action instance, appending that instance's fixed event order to the
//! agenda. A state with an empty agenda is a goal: a plan is read off any
//! consistent schedule of its network.
//!
//! Internally the network runs on integer ticks: every rational in one
//! problem is a multiple of `1/D` for the common denominator `D`, so scaled
//! arithmetic is exact (and allocation-free). Extracted schedules are
//! converted back to rationals, with strict gaps realized by exact halving.

pub mod engine;
pub mod split;

pub use engine::{search, Heuristic, SearchConfig, SearchOutcome, SearchStats, UnsolvedReason};

use crate::model::{normalize_problem, Anchor, Diagnostic, Plan, PlanStep, Problem};
use crate::scalar::Ticks;
use crate::stn::{Bound, Inconsistent, NodeId, Stn};
use crate::Time;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use split::{condition_time_points, effect_time_points, split_action, ItemKind, Piece};
use std::collections::VecDeque;

/// Dense predicate handle inside a [`SearchSpace`] (assigned in sorted name
/// order, so id order equals name order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub u32);

impl PredId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// Compact predicate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredSet {
    words: Vec<u64>,
}

impl PredSet {
    pub fn new(len: usize) -> Self {
        PredSet { words: vec![0; len.div_ceil(64)] }
    }

    pub fn insert(&mut self, p: PredId) {
        self.words[p.index() / 64] |= 1 << (p.index() % 64);
    }

    pub fn remove(&mut self, p: PredId) {
        self.words[p.index() / 64] &= !(1 << (p.index() % 64));
    }

    pub fn contains(&self, p: PredId) -> bool {
        self.words[p.index() / 64] & (1 << (p.index() % 64)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = PredId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter_map(move |b| {
                if bits & (1 << b) != 0 {
                    Some(PredId((w * 64 + b) as u32))
                } else {
                    None
                }
            })
        })
    }
}

/// A grounded timed time-point of a piece, in ticks.
#[derive(Debug, Clone)]
pub struct GroundItem {
    pub kind: ItemKind,
    pub pred: PredId,
    pub anchor: Anchor,
    pub offset: Ticks,
}

/// A duration piece with grounded items.
#[derive(Debug, Clone)]
pub struct GroundPiece {
    pub action_index: usize,
    pub lo: Ticks,
    pub hi: Ticks,
    pub open_lo: bool,
    pub open_hi: bool,
    pub items: Vec<GroundItem>,
    pub groups: Vec<u32>,
    /// Per group id: does the group mix conditions and effects?
    pub mixed_group: Vec<bool>,
}

/// A grounded timed initial literal or goal time-point, anchored to the plan
/// start or plan end.
#[derive(Debug, Clone)]
pub struct InitItem {
    pub kind: ItemKind,
    pub pred: PredId,
    pub anchor: Anchor,
    pub offset: Ticks,
}

/// Which agenda list a time-point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListOwner {
    /// Timed initial literals and goals anchored to the plan start.
    StartAnchored,
    /// Timed initial literals and goals anchored to the plan end.
    EndAnchored,
    /// An opened action instance.
    Instance(u32),
}

/// A pending time-point in some agenda list.
#[derive(Debug, Clone)]
pub struct AgendaItem {
    pub kind: ItemKind,
    pub pred: PredId,
    pub node: NodeId,
    pub group: u32,
    /// Index into [`SearchSpace::init_items`] when this comes from a timed
    /// initial literal or goal.
    pub init_id: Option<u32>,
}

/// One agenda list: time-points in their fixed order, heads only expandable.
#[derive(Debug, Clone)]
pub struct AgendaList {
    pub owner: ListOwner,
    /// Index of the owning piece for instance lists.
    pub piece: Option<u32>,
    pub items: VecDeque<AgendaItem>,
}

/// An opened action instance, for plan extraction.
#[derive(Debug, Clone)]
pub struct InstanceRecord {
    pub piece: u32,
    pub start: NodeId,
    pub end: NodeId,
}

/// A search state. Self-contained value; branching copies it.
#[derive(Debug, Clone)]
pub struct SearchState {
    /// Predicates currently true.
    pub facts: PredSet,
    /// Durative-condition guard counts per predicate (a multiset).
    pub active: Vec<u32>,
    /// Pending commitments: lists of time-points, heads expandable.
    pub agenda: Vec<AgendaList>,
    /// Temporal constraints over all committed time-points, in ticks.
    pub network: Stn<Ticks>,
    /// Node of the last expanded time-point.
    pub last_node: NodeId,
    /// Whether the last expanded time-point was an effect.
    pub last_was_effect: bool,
    /// Path cost: number of expansions from the initial state.
    pub cost: u32,
    /// Node of the plan-end anchor.
    pub plan_end: NodeId,
    pub instances: Vec<InstanceRecord>,
}

impl SearchState {
    /// Number of pending time-points across all agenda lists.
    pub fn pending(&self) -> usize {
        self.agenda.iter().map(|l| l.items.len()).sum()
    }
}

/// The timed initial literal / goal constraints are unsatisfiable on their
/// own: no plan can exist.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the problem's timed initial literals and goals are inconsistent")]
pub struct TriviallyUnsolvable;

/// A grounded, split, indexed problem ready for search.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    problem: Problem,
    pred_names: Vec<String>,
    pieces: Vec<GroundPiece>,
    init_items: Vec<InitItem>,
    /// Indices into `init_items`, ascending offset (plan-start anchored).
    start_order: Vec<u32>,
    /// Indices into `init_items`, descending offset (plan-end anchored).
    end_order: Vec<u32>,
    init_facts: PredSet,
    /// Common denominator of every rational in the problem: one tick is
    /// `1/denominator` time units.
    denominator: BigInt,
}

impl SearchSpace {
    /// Normalizes the problem, splits every action into order-invariant
    /// pieces, grounds predicates to dense ids and scales all times to
    /// integer ticks.
    pub fn new(problem: &Problem) -> Result<SearchSpace, Vec<Diagnostic>> {
        let problem = normalize_problem(problem)?;
        let pred_names: Vec<String> = problem.predicates.iter().cloned().collect();
        let pred_id = |name: &str| -> PredId {
            PredId(pred_names.binary_search_by(|p| p.as_str().cmp(name)).expect("normalized") as u32)
        };

        let denominator = common_denominator(&problem);
        let to_ticks = |t: &Time| -> Ticks { time_to_ticks(t, &denominator) };

        let mut pieces = Vec::new();
        for (ai, action) in problem.actions.iter().enumerate() {
            for piece in split_action(action, ai) {
                pieces.push(ground_piece(piece, &pred_id, &to_ticks));
            }
        }

        let mut init_items = Vec::new();
        for item in condition_time_points(&problem.goals) {
            init_items.push(InitItem {
                kind: item.kind,
                pred: pred_id(&item.predicate),
                anchor: item.at.anchor,
                offset: to_ticks(&item.at.offset),
            });
        }
        for item in effect_time_points(&problem.tils) {
            init_items.push(InitItem {
                kind: item.kind,
                pred: pred_id(&item.predicate),
                anchor: item.at.anchor,
                offset: to_ticks(&item.at.offset),
            });
        }

        let order_key = |i: &u32| {
            let it = &init_items[*i as usize];
            (it.offset, it.kind, it.pred)
        };
        let mut start_order: Vec<u32> = (0..init_items.len() as u32)
            .filter(|&i| init_items[i as usize].anchor == Anchor::Start)
            .collect();
        start_order.sort_by_key(order_key);
        let mut end_order: Vec<u32> = (0..init_items.len() as u32)
            .filter(|&i| init_items[i as usize].anchor == Anchor::End)
            .collect();
        // Descending offset is ascending real time for end-anchored items;
        // ties expand in the usual within-instant order.
        end_order.sort_by(|a, b| {
            let (ka, kb) = (&init_items[*a as usize], &init_items[*b as usize]);
            kb.offset
                .cmp(&ka.offset)
                .then(ka.kind.cmp(&kb.kind))
                .then(ka.pred.cmp(&kb.pred))
        });

        let mut init_facts = PredSet::new(pred_names.len());
        for p in &problem.init {
            init_facts.insert(pred_id(p));
        }

        Ok(SearchSpace {
            problem,
            pred_names,
            pieces,
            init_items,
            start_order,
            end_order,
            init_facts,
            denominator,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn pieces(&self) -> &[GroundPiece] {
        &self.pieces
    }

    pub fn init_items(&self) -> &[InitItem] {
        &self.init_items
    }

    pub fn predicate_count(&self) -> usize {
        self.pred_names.len()
    }

    pub fn predicate_name(&self, p: PredId) -> &str {
        &self.pred_names[p.index()]
    }

    pub fn initial_facts(&self) -> &PredSet {
        &self.init_facts
    }

    /// Total number of distinct timed time-points (per piece, plus the timed
    /// initial literal and goal time-points).
    pub fn time_point_count(&self) -> usize {
        self.pieces.iter().map(|p| p.items.len()).sum::<usize>() + self.init_items.len()
    }

    /// Rational value of a tick count.
    pub fn ticks_to_time(&self, t: Ticks) -> Time {
        Time::new(BigInt::from(t.0), self.denominator.clone())
    }

    /// Initial state: initial facts, the plan-start/plan-end nodes, one node
    /// per timed initial literal / goal time-point pinned to its offset, and
    /// the two sorted agenda lists.
    pub fn initial_state(&self) -> Result<SearchState, TriviallyUnsolvable> {
        let mut network: Stn<Ticks> = Stn::new();
        let plan_end = network.add_node();
        let mk_list = |ids: &[u32], owner: ListOwner, network: &mut Stn<Ticks>| -> AgendaList {
            let mut items = VecDeque::with_capacity(ids.len());
            for (pos, &id) in ids.iter().enumerate() {
                let it = &self.init_items[id as usize];
                let node = network.add_node();
                match it.anchor {
                    Anchor::Start => {
                        // node - origin = offset
                        network.push_constraint(NodeId::ORIGIN, node, Bound::weak(it.offset));
                        network.push_constraint(node, NodeId::ORIGIN, Bound::weak(-it.offset));
                    }
                    Anchor::End => {
                        // plan_end - node = offset
                        network.push_constraint(node, plan_end, Bound::weak(it.offset));
                        network.push_constraint(plan_end, node, Bound::weak(-it.offset));
                    }
                }
                items.push_back(AgendaItem {
                    kind: it.kind,
                    pred: it.pred,
                    node,
                    group: pos as u32,
                    init_id: Some(id),
                });
            }
            AgendaList { owner, piece: None, items }
        };

        let mut agenda = Vec::new();
        let start_list = mk_list(&self.start_order, ListOwner::StartAnchored, &mut network);
        if !start_list.items.is_empty() {
            agenda.push(start_list);
        }
        let end_list = mk_list(&self.end_order, ListOwner::EndAnchored, &mut network);
        if !end_list.items.is_empty() {
            agenda.push(end_list);
        }
        if !network.check_consistent() {
            return Err(TriviallyUnsolvable);
        }
        Ok(SearchState {
            facts: self.init_facts.clone(),
            active: vec![0; self.pred_names.len()],
            agenda,
            network,
            last_node: NodeId::ORIGIN,
            last_was_effect: false,
            cost: 0,
            plan_end,
            instances: Vec::new(),
        })
    }

    /// Cheap applicability test of the head of `list_idx` against the
    /// state's facts and guards; no temporal reasoning.
    pub(crate) fn head_admissible(&self, state: &SearchState, list_idx: usize) -> bool {
        let item = state.agenda[list_idx].items.front().expect("lists are never empty");
        match item.kind {
            ItemKind::EffectAdd => true,
            // Deleting a predicate some durative condition still guards
            // would break the guard-support invariant.
            ItemKind::EffectDelete => state.active[item.pred.index()] == 0,
            ItemKind::CondInstant | ItemKind::CondStart => state.facts.contains(item.pred),
            // An end without a matching open guard is a dead-end.
            ItemKind::CondEnd => {
                state.facts.contains(item.pred) && state.active[item.pred.index()] > 0
            }
        }
    }

    /// Expands the head of `list_idx` in place. Assumes
    /// [`SearchSpace::head_admissible`]; returns false when the temporal
    /// network becomes inconsistent.
    fn apply_head(&self, state: &mut SearchState, list_idx: usize) -> bool {
        let item = state.agenda[list_idx]
            .items
            .pop_front()
            .expect("lists are never empty");
        if state.agenda[list_idx].items.is_empty() {
            state.agenda.remove(list_idx);
        }
        match item.kind {
            ItemKind::EffectAdd => state.facts.insert(item.pred),
            ItemKind::EffectDelete => state.facts.remove(item.pred),
            ItemKind::CondStart => state.active[item.pred.index()] += 1,
            ItemKind::CondEnd => state.active[item.pred.index()] -= 1,
            ItemKind::CondInstant => {}
        }
        debug_assert!(
            state
                .active
                .iter()
                .enumerate()
                .all(|(p, &n)| n == 0 || state.facts.contains(PredId(p as u32))),
            "guarded predicates must stay true"
        );

        // The expanded point happens at or after the previous one.
        state
            .network
            .push_constraint(item.node, state.last_node, Bound::weak(Ticks(0)));
        // Every remaining commitment happens at or after it; effects push
        // conditions and same-predicate effects strictly later.
        let is_effect = item.kind.is_effect();
        for list in &state.agenda {
            for t in &list.items {
                let strict = is_effect
                    && (t.kind.is_condition() || (t.kind.is_effect() && t.pred == item.pred));
                state
                    .network
                    .push_constraint(t.node, item.node, Bound { value: Ticks(0), strict });
            }
        }
        if !state.network.check_consistent() {
            return false;
        }
        state.last_node = item.node;
        state.last_was_effect = is_effect;
        true
    }

    /// Expansion of an existing agenda head: at most one successor, with the
    /// path cost unchanged (the engine accounts for it).
    pub fn succ_tp(&self, state: &SearchState, list_idx: usize) -> Option<SearchState> {
        if !self.head_admissible(state, list_idx) {
            return None;
        }
        let mut next = state.clone();
        if self.apply_head(&mut next, list_idx) {
            Some(next)
        } else {
            None
        }
    }

    /// Opens a new instance of a piece: fresh start/end nodes with the
    /// piece's duration bounds, one node per timed time-point pinned to its
    /// offset, and a new agenda list in the piece's fixed order.
    pub fn succ_act(&self, state: &SearchState, piece_idx: usize) -> Option<SearchState> {
        let piece = &self.pieces[piece_idx];
        let mut next = state.clone();
        let instance = next.instances.len() as u32;
        let net = &mut next.network;
        let start = net.add_node();
        let end = net.add_node();

        // lo <= end - start <= hi, honoring piece openness; Plan durations
        // must be positive, so a closed zero lower bound becomes strict.
        net.push_constraint(start, end, Bound { value: piece.hi, strict: piece.open_hi });
        net.push_constraint(end, start, Bound { value: -piece.lo, strict: piece.open_lo });
        if piece.lo.is_zero() && !piece.open_lo {
            net.push_constraint(end, start, Bound::strict(Ticks(0)));
        }

        let mut items = VecDeque::with_capacity(piece.items.len());
        for (pos, gi) in piece.items.iter().enumerate() {
            let node = net.add_node();
            match gi.anchor {
                Anchor::Start => {
                    // node - start = offset
                    net.push_constraint(start, node, Bound::weak(gi.offset));
                    net.push_constraint(node, start, Bound::weak(-gi.offset));
                }
                Anchor::End => {
                    // end - node = offset
                    net.push_constraint(node, end, Bound::weak(gi.offset));
                    net.push_constraint(end, node, Bound::weak(-gi.offset));
                }
            }
            items.push_back(AgendaItem {
                kind: gi.kind,
                pred: gi.pred,
                node,
                group: piece.groups[pos],
                init_id: None,
            });
        }

        // The instance starts at or after the last expanded point, strictly
        // after when that point was an effect.
        net.push_constraint(
            start,
            next.last_node,
            Bound { value: Ticks(0), strict: next.last_was_effect },
        );

        if !items.is_empty() {
            next.agenda.push(AgendaList {
                owner: ListOwner::Instance(instance),
                piece: Some(piece_idx as u32),
                items,
            });
        }
        // Every pending commitment (including this instance's own) happens
        // at or after the start.
        for list in &next.agenda {
            for t in &list.items {
                next.network.push_constraint(t.node, start, Bound::weak(Ticks(0)));
            }
        }
        // End-anchored literals and goals resolve at or after every action's
        // end.
        next.network.push_constraint(next.plan_end, end, Bound::weak(Ticks(0)));

        if !next.network.check_consistent() {
            return None;
        }
        next.last_node = start;
        next.last_was_effect = false;
        next.instances.push(InstanceRecord { piece: piece_idx as u32, start, end });
        Some(next)
    }

    /// All successors: one per admissible agenda head, one per openable
    /// piece, each with path cost `state.cost + 1`.
    pub fn successors(&self, state: &SearchState) -> Vec<SearchState> {
        self.expand(state, false)
    }

    /// Like [`SearchSpace::successors`] but expands whole same-instant
    /// groups of an instance's events in one step (see
    /// [`SearchSpace::succ_tp_compressed`]).
    pub fn successors_compressed(&self, state: &SearchState) -> Vec<SearchState> {
        self.expand(state, true)
    }

    fn expand(&self, state: &SearchState, compress: bool) -> Vec<SearchState> {
        let mut out = Vec::new();
        for i in 0..state.agenda.len() {
            let succ =
                if compress { self.succ_tp_compressed(state, i) } else { self.succ_tp(state, i) };
            out.extend(succ);
        }
        for p in 0..self.pieces.len() {
            out.extend(self.succ_act(state, p));
        }
        for s in &mut out {
            s.cost = state.cost + 1;
        }
        out
    }

    /// Length of the head group of `list_idx` that a compressed expansion
    /// would consume in one step: the leading run of same-instant events of
    /// one instance. Same-instant runs of conditions or of effects compress
    /// unconditionally; a mixed run only when no other instance has a
    /// pending mixed same-instant group forced to coincide with it, and
    /// otherwise falls back to its leading run of conditions.
    pub fn compressible_head_len(&self, state: &SearchState, list_idx: usize) -> usize {
        let list = &state.agenda[list_idx];
        if !matches!(list.owner, ListOwner::Instance(_)) {
            return 1;
        }
        let head_group = list.items[0].group;
        let glen = list.items.iter().take_while(|i| i.group == head_group).count();
        if glen == 1 {
            return 1;
        }
        let conds = list.items.iter().take(glen).take_while(|i| i.kind.is_condition()).count();
        if conds == glen || conds == 0 {
            return glen;
        }
        // Mixed group: guard against another instance's mixed group being
        // forced simultaneous with this one.
        let our_node = list.items[0].node;
        for (j, other) in state.agenda.iter().enumerate() {
            if j == list_idx || !matches!(other.owner, ListOwner::Instance(_)) {
                continue;
            }
            let piece = &self.pieces[other.piece.expect("instance lists have a piece") as usize];
            let mut k = 0;
            while k < other.items.len() {
                let g = other.items[k].group;
                let run_len = other.items.iter().skip(k).take_while(|i| i.group == g).count();
                if piece.mixed_group[g as usize]
                    && state.network.forces_equal(our_node, other.items[k].node)
                {
                    return conds.max(1);
                }
                k += run_len;
            }
        }
        glen
    }

    /// Compressed head expansion: applies the whole eligible head group in
    /// one search step, in the list's fixed order, without intermediate
    /// branching. Behaves exactly like [`SearchSpace::succ_tp`] for
    /// single-event groups.
    pub fn succ_tp_compressed(&self, state: &SearchState, list_idx: usize) -> Option<SearchState> {
        let take = self.compressible_head_len(state, list_idx);
        if take == 1 {
            return self.succ_tp(state, list_idx);
        }
        if !self.head_admissible(state, list_idx) {
            return None;
        }
        let list_len = state.agenda[list_idx].items.len();
        let mut next = state.clone();
        for step in 0..take {
            if step > 0 && !self.head_admissible(&next, list_idx) {
                return None;
            }
            if !self.apply_head(&mut next, list_idx) {
                return None;
            }
            // The list disappears when exhausted; that can only happen on
            // the final step of the group.
            debug_assert!(step + 1 == take || step + 1 < list_len);
        }
        Some(next)
    }

    /// A goal state has no pending commitments.
    pub fn is_goal(&self, state: &SearchState) -> bool {
        state.agenda.is_empty()
    }

    /// Exact rational schedule of a live state's network: earliest times,
    /// strict gaps realized by halving, every constraint re-verified.
    pub fn schedule(&self, state: &SearchState) -> Result<Vec<Time>, Inconsistent> {
        let offsets = state.network.earliest_offsets()?;
        let mut gap = Time::from_integer(BigInt::from(1));
        for _ in 0..256 {
            let times: Vec<Time> = offsets
                .iter()
                .map(|o| self.ticks_to_time(o.value) + crate::stn::times_int(&gap, o.eps))
                .collect();
            let ok = state.network.constraints().all(|(from, to, bound)| {
                let diff = times[to.0 as usize].clone() - times[from.0 as usize].clone();
                let limit = self.ticks_to_time(bound.value);
                if bound.strict {
                    diff < limit
                } else {
                    diff <= limit
                }
            });
            if ok {
                return Ok(times);
            }
            gap = gap / Time::from_integer(BigInt::from(2));
        }
        unreachable!("strict slacks are positive rationals; halving must terminate");
    }

    /// Reads a plan off a goal state: the earliest schedule of its network
    /// gives each instance's start and duration and the plan-end anchor.
    pub fn extract_plan(&self, state: &SearchState) -> Plan {
        debug_assert!(self.is_goal(state));
        let times = self
            .schedule(state)
            .expect("expansion keeps live states consistent");
        let steps: Vec<PlanStep> = state
            .instances
            .iter()
            .map(|inst| {
                let piece = &self.pieces[inst.piece as usize];
                let start = times[inst.start.0 as usize].clone();
                let end = times[inst.end.0 as usize].clone();
                PlanStep::new(
                    start.clone(),
                    self.problem.actions[piece.action_index].name.clone(),
                    end - start,
                )
            })
            .collect();
        Plan::new(steps, times[state.plan_end.0 as usize].clone())
    }
}

/// Least common denominator of every rational in the problem.
fn common_denominator(problem: &Problem) -> BigInt {
    use num_integer::Integer;
    let mut d = BigInt::from(1);
    let mut fold = |t: &Time| {
        d = d.lcm(t.denom());
    };
    for a in &problem.actions {
        fold(&a.d_min);
        fold(&a.d_max);
        for c in &a.conditions {
            fold(&c.from.offset);
            fold(&c.to.offset);
        }
        for e in &a.effects {
            fold(&e.at.offset);
        }
    }
    for e in &problem.tils {
        fold(&e.at.offset);
    }
    for c in &problem.goals {
        fold(&c.from.offset);
        fold(&c.to.offset);
    }
    d
}

/// Exact scaling of a rational to ticks; the denominator divides `scale`.
fn time_to_ticks(t: &Time, scale: &BigInt) -> Ticks {
    let scaled = t.numer() * scale / t.denom();
    debug_assert_eq!(&(&scaled * t.denom()), &(t.numer() * scale));
    let v = scaled.to_i64().expect("temporal magnitude exceeds engine capacity");
    // Headroom so long constraint chains cannot overflow i64 sums.
    assert!(
        v.abs() <= (1 << 42),
        "temporal magnitude exceeds engine capacity ({v} ticks)"
    );
    Ticks(v)
}

fn ground_piece(
    piece: Piece,
    pred_id: &dyn Fn(&str) -> PredId,
    to_ticks: &dyn Fn(&Time) -> Ticks,
) -> GroundPiece {
    let items: Vec<GroundItem> = piece
        .order
        .iter()
        .map(|i| GroundItem {
            kind: i.kind,
            pred: pred_id(&i.predicate),
            anchor: i.at.anchor,
            offset: to_ticks(&i.at.offset),
        })
        .collect();
    let group_count = piece.groups.last().map_or(0, |g| g + 1) as usize;
    let mut has_cond = vec![false; group_count];
    let mut has_eff = vec![false; group_count];
    for (pos, item) in items.iter().enumerate() {
        let g = piece.groups[pos] as usize;
        if item.kind.is_condition() {
            has_cond[g] = true;
        } else {
            has_eff[g] = true;
        }
    }
    let mixed_group = has_cond.iter().zip(&has_eff).map(|(c, e)| *c && *e).collect();
    GroundPiece {
        action_index: piece.action_index,
        lo: to_ticks(&piece.lo),
        hi: to_ticks(&piece.hi),
        open_lo: piece.open_lo,
        open_hi: piece.open_hi,
        items,
        groups: piece.groups,
        mixed_group,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::time_int;
    use crate::testfix::tiny_problem;
    use crate::validator::validate;

    fn space() -> SearchSpace {
        SearchSpace::new(&tiny_problem()).unwrap()
    }

    #[test]
    fn initial_state_has_one_end_anchored_goal_list() {
        let sp = space();
        let init = sp.initial_state().unwrap();
        assert_eq!(init.agenda.len(), 1);
        assert_eq!(init.agenda[0].owner, ListOwner::EndAnchored);
        assert_eq!(init.agenda[0].items.len(), 1);
        assert_eq!(init.agenda[0].items[0].kind, ItemKind::CondInstant);
        assert_eq!(sp.predicate_name(init.agenda[0].items[0].pred), "p");
        assert!(!sp.is_goal(&init));
    }

    #[test]
    fn fractional_offsets_scale_to_integer_ticks() {
        let mut p = tiny_problem();
        p.actions[0].effects[0].at.offset = crate::scalar::time_frac(1, 3);
        p.actions[0].d_min = crate::scalar::time_frac(1, 2);
        p.actions[0].d_max = crate::scalar::time_frac(1, 2);
        let sp = SearchSpace::new(&p).unwrap();
        // lcm(3, 2) = 6: one tick is 1/6.
        assert_eq!(sp.ticks_to_time(Ticks(6)), time_int(1));
        let piece = &sp.pieces()[0];
        assert_eq!(piece.lo, Ticks(3));
        assert!(piece
            .items
            .iter()
            .any(|i| i.kind == ItemKind::EffectAdd && i.offset == Ticks(2)));
    }

    #[test]
    fn start_anchored_literals_sort_by_ascending_offset() {
        let mut p = tiny_problem();
        p.predicates.insert("r".into());
        p.tils.push(crate::model::Effect::add(crate::model::TimedRef::start(time_int(5)), "r"));
        p.tils.push(crate::model::Effect::add(crate::model::TimedRef::start(time_int(2)), "q"));
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let start_list = init
            .agenda
            .iter()
            .find(|l| l.owner == ListOwner::StartAnchored)
            .unwrap();
        let offsets: Vec<Ticks> = start_list
            .items
            .iter()
            .map(|i| sp.init_items[i.init_id.unwrap() as usize].offset)
            .collect();
        assert_eq!(offsets, vec![Ticks(2), Ticks(5)]);
    }

    #[test]
    fn end_anchored_literals_sort_by_descending_offset() {
        let mut p = tiny_problem();
        p.predicates.insert("r".into());
        p.goals.clear();
        p.tils.push(crate::model::Effect::add(crate::model::TimedRef::end(time_int(3)), "r"));
        p.tils.push(crate::model::Effect::add(crate::model::TimedRef::end(time_int(1)), "q"));
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let end_list = init
            .agenda
            .iter()
            .find(|l| l.owner == ListOwner::EndAnchored)
            .unwrap();
        let offsets: Vec<Ticks> = end_list
            .items
            .iter()
            .map(|i| sp.init_items[i.init_id.unwrap() as usize].offset)
            .collect();
        assert_eq!(offsets, vec![Ticks(3), Ticks(1)]);
    }

    #[test]
    fn problem_without_commitments_starts_at_goal() {
        let mut p = tiny_problem();
        p.goals.clear();
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        assert!(sp.is_goal(&init));
        let plan = sp.extract_plan(&init);
        assert!(plan.is_empty());
        assert_eq!(plan.plan_end, time_int(0));
    }

    #[test]
    fn init_expansions_match_hand_walk() {
        // From the initial state: expanding the pending goal fails (p is
        // false), opening the action succeeds — exactly one successor.
        let sp = space();
        let init = sp.initial_state().unwrap();
        assert!(sp.succ_tp(&init, 0).is_none());
        let succs = sp.successors(&init);
        assert_eq!(succs.len(), 1);
        assert_eq!(succs[0].cost, 1);
        assert_eq!(succs[0].agenda.len(), 2);
    }

    #[test]
    fn full_hand_walk_reaches_goal_and_extracts_plan() {
        let sp = space();
        let init = sp.initial_state().unwrap();
        let opened = sp.succ_act(&init, 0).unwrap();
        // New instance list: [condition q at start+0, add p at start+1].
        let inst = opened
            .agenda
            .iter()
            .position(|l| matches!(l.owner, ListOwner::Instance(_)))
            .unwrap();
        assert_eq!(opened.agenda[inst].items[0].kind, ItemKind::CondInstant);
        assert_eq!(opened.agenda[inst].items[1].kind, ItemKind::EffectAdd);

        // Goal head still fails; condition head succeeds.
        let goal_idx = 1 - inst;
        assert!(sp.succ_tp(&opened, goal_idx).is_none());
        let after_cond = sp.succ_tp(&opened, inst).unwrap();

        // Apply the add of p, then the goal check.
        let inst2 = after_cond
            .agenda
            .iter()
            .position(|l| matches!(l.owner, ListOwner::Instance(_)))
            .unwrap();
        let after_add = sp.succ_tp(&after_cond, inst2).unwrap();
        assert_eq!(after_add.agenda.len(), 1);
        let goal_state = sp.succ_tp(&after_add, 0).unwrap();
        assert!(sp.is_goal(&goal_state));

        let plan = sp.extract_plan(&goal_state);
        assert_eq!(plan.steps.len(), 1);
        assert_eq!(plan.steps[0].start, time_int(0));
        assert_eq!(plan.steps[0].action, "a1");
        assert_eq!(plan.steps[0].duration, time_int(2));
        assert!(plan.plan_end >= time_int(2));
        assert!(validate(sp.problem(), &plan).is_valid());
    }

    #[test]
    fn delete_guarded_by_active_condition_dead_ends() {
        // An action holding q over its whole duration blocks another
        // instance's delete of q while the guard is active.
        let mut p = tiny_problem();
        p.actions[0].conditions = vec![crate::model::Condition::over(
            crate::model::TimedRef::start(time_int(0)),
            crate::model::TimedRef::end(time_int(0)),
            "q",
        )];
        let mut killer = crate::model::Action::fixed("kill", time_int(1));
        killer
            .effects
            .push(crate::model::Effect::delete(crate::model::TimedRef::start(time_int(0)), "q"));
        p.actions.push(killer);
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let opened = sp.succ_act(&init, 0).unwrap();
        let inst = opened
            .agenda
            .iter()
            .position(|l| matches!(l.owner, ListOwner::Instance(_)))
            .unwrap();
        // Start the durative condition on q.
        let guarded = sp.succ_tp(&opened, inst).unwrap();
        assert!(guarded.active.iter().any(|&n| n > 0));
        // Opening the killer and expanding its delete head must fail.
        let kill_piece = sp
            .pieces()
            .iter()
            .position(|pc| sp.problem().actions[pc.action_index].name == "kill")
            .unwrap();
        let with_killer = sp.succ_act(&guarded, kill_piece).unwrap();
        let kill_list = with_killer
            .agenda
            .iter()
            .position(|l| {
                l.items
                    .front()
                    .is_some_and(|i| i.kind == ItemKind::EffectDelete)
            })
            .unwrap();
        assert!(sp.succ_tp(&with_killer, kill_list).is_none());
    }

    #[test]
    fn condition_end_without_open_guard_dead_ends() {
        // A lone durative condition whose end is expandable first (via the
        // end-anchored goal list) fails instead of corrupting the multiset.
        let mut p = tiny_problem();
        p.goals = vec![crate::model::Condition::over(
            crate::model::TimedRef::start(time_int(1)),
            crate::model::TimedRef::end(time_int(1)),
            "q",
        )];
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let end_list = init
            .agenda
            .iter()
            .position(|l| l.owner == ListOwner::EndAnchored)
            .unwrap();
        assert_eq!(init.agenda[end_list].items[0].kind, ItemKind::CondEnd);
        assert!(sp.succ_tp(&init, end_list).is_none());
    }

    #[test]
    fn opening_impossible_piece_dead_ends() {
        // An end-anchored effect deeper than the maximal duration can never
        // fit inside the action.
        let mut p = tiny_problem();
        let mut a = crate::model::Action::new("deep", time_int(1), time_int(2));
        a.effects
            .push(crate::model::Effect::add(crate::model::TimedRef::end(time_int(5)), "p"));
        p.actions.push(a);
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let deep_piece = sp
            .pieces()
            .iter()
            .position(|pc| sp.problem().actions[pc.action_index].name == "deep")
            .unwrap();
        assert!(sp.succ_act(&init, deep_piece).is_none());
    }

    #[test]
    fn successor_count_is_heads_plus_pieces() {
        let sp = space();
        let init = sp.initial_state().unwrap();
        let opened = sp.succ_act(&init, 0).unwrap();
        // Two lists (goal fails, condition succeeds) + one piece (another
        // instance can open).
        let succs = sp.successors(&opened);
        assert_eq!(succs.len(), 2);
    }

    #[test]
    fn zero_minimum_duration_still_yields_positive_durations() {
        let mut p = tiny_problem();
        p.actions[0].d_min = time_int(0);
        p.actions[0].d_max = time_int(2);
        let sp = SearchSpace::new(&p).unwrap();
        let init = sp.initial_state().unwrap();
        let opened = sp.succ_act(&init, 0).unwrap();
        let inst = opened.instances.last().unwrap();
        let times = sp.schedule(&opened).unwrap();
        assert!(times[inst.end.0 as usize] > times[inst.start.0 as usize]);
    }

    #[test]
    fn schedules_along_a_branch_are_monotone_at_the_last_point() {
        let sp = space();
        let mut state = sp.initial_state().unwrap();
        let mut omega_nodes = vec![state.last_node];
        state = sp.succ_act(&state, 0).unwrap();
        omega_nodes.push(state.last_node);
        'outer: while !sp.is_goal(&state) {
            for i in 0..state.agenda.len() {
                if let Some(next) = sp.succ_tp(&state, i) {
                    state = next;
                    omega_nodes.push(state.last_node);
                    continue 'outer;
                }
            }
            panic!("walk got stuck");
        }
        let times = sp.schedule(&state).unwrap();
        for w in omega_nodes.windows(2) {
            assert!(times[w[0].0 as usize] <= times[w[1].0 as usize]);
        }
    }
}
