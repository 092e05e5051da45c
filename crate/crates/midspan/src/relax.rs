//! Classical (STRIPS) relaxation of the time-point search space, and the
//! heuristics computed on it.
//!
//! Every timed time-point of every duration piece becomes one unit-cost
//! classical action; a unary counter atom per piece position chains them in
//! the piece's fixed order (the counter returns to position zero when the
//! last event fires). Every timed initial literal and goal time-point gets a
//! marker atom added by its own relaxed action; the relaxation's goal is all
//! markers plus every counter back at zero. A search state maps to a relaxed
//! state from its facts, the counter positions of its open instances, and
//! the markers of the literal/goal time-points already expanded.

use crate::search::split::ItemKind;
use crate::search::{ListOwner, SearchSpace, SearchState};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Dense handle of an atom of the relaxed problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// A relaxed classical action: precondition, add and delete sets, unit cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedAction {
    pub pre: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

/// The grounded relaxation, with indexes for heuristic evaluation.
#[derive(Debug, Clone)]
pub struct RelaxedProblem {
    atom_count: usize,
    /// First counter atom per piece (`None` for pieces without events).
    counter_base: Vec<Option<u32>>,
    /// Number of counter atoms per piece.
    counter_len: Vec<u32>,
    /// Marker atom per timed initial literal / goal time-point.
    goal_marker: Vec<u32>,
    pub actions: Vec<RelaxedAction>,
    pub init: Vec<AtomId>,
    pub goals: Vec<AtomId>,
    /// Relaxed action indices by precondition atom.
    precond_of: Vec<Vec<u32>>,
    /// Precondition count per relaxed action.
    pre_count: Vec<u32>,
}

impl RelaxedProblem {
    pub fn build(space: &SearchSpace) -> RelaxedProblem {
        let base = space.predicate_count() as u32;
        let mut next = base;

        let mut counter_base = Vec::with_capacity(space.pieces().len());
        let mut counter_len = Vec::with_capacity(space.pieces().len());
        for piece in space.pieces() {
            let n = piece.items.len() as u32;
            if n == 0 {
                counter_base.push(None);
                counter_len.push(0);
            } else {
                counter_base.push(Some(next));
                counter_len.push(n);
                next += n;
            }
        }
        let goal_marker: Vec<u32> = (0..space.init_items().len() as u32)
            .map(|i| next + i)
            .collect();
        next += space.init_items().len() as u32;

        let mut actions = Vec::new();
        for (pi, piece) in space.pieces().iter().enumerate() {
            let n = piece.items.len() as u32;
            let Some(cbase) = counter_base[pi] else { continue };
            for (i, item) in piece.items.iter().enumerate() {
                let i = i as u32;
                let j = (i + 1) % n;
                let mut pre = vec![AtomId(cbase + i)];
                let mut add = vec![AtomId(cbase + j)];
                let mut del = vec![AtomId(cbase + i)];
                let pred = AtomId(item.pred.0);
                match item.kind {
                    ItemKind::EffectAdd => add.push(pred),
                    ItemKind::EffectDelete => del.push(pred),
                    _ => pre.push(pred),
                }
                pre.sort();
                pre.dedup();
                actions.push(RelaxedAction { pre, add, del });
            }
        }
        for (gi, item) in space.init_items().iter().enumerate() {
            let mut pre = Vec::new();
            let mut add = vec![AtomId(goal_marker[gi])];
            let mut del = Vec::new();
            let pred = AtomId(item.pred.0);
            match item.kind {
                ItemKind::EffectAdd => add.push(pred),
                ItemKind::EffectDelete => del.push(pred),
                _ => pre.push(pred),
            }
            actions.push(RelaxedAction { pre, add, del });
        }

        let mut init: Vec<AtomId> = space.initial_facts().iter().map(|p| AtomId(p.0)).collect();
        for cb in counter_base.iter().flatten() {
            init.push(AtomId(*cb));
        }
        init.sort();
        init.dedup();

        let mut goals: Vec<AtomId> = goal_marker.iter().map(|&g| AtomId(g)).collect();
        for cb in counter_base.iter().flatten() {
            goals.push(AtomId(*cb));
        }
        goals.sort();
        goals.dedup();

        let atom_count = next as usize;
        let mut precond_of = vec![Vec::new(); atom_count];
        let mut pre_count = Vec::with_capacity(actions.len());
        for (ai, a) in actions.iter().enumerate() {
            pre_count.push(a.pre.len() as u32);
            for p in &a.pre {
                precond_of[p.index()].push(ai as u32);
            }
        }

        RelaxedProblem {
            atom_count,
            counter_base,
            counter_len,
            goal_marker,
            actions,
            init,
            goals,
            precond_of,
            pre_count,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// Counter atom `i` of `piece`, when the piece has events.
    pub fn counter_atom(&self, piece: usize, i: u32) -> Option<AtomId> {
        self.counter_base[piece].map(|b| {
            debug_assert!(i < self.counter_len[piece]);
            AtomId(b + i)
        })
    }

    /// Marker atom of a timed initial literal / goal time-point.
    pub fn goal_marker(&self, init_item: usize) -> AtomId {
        AtomId(self.goal_marker[init_item])
    }

    /// Maps a search state to a relaxed state: current facts, every counter
    /// at zero, the counter position of each open instance (events already
    /// fired), and the marker of every literal/goal time-point no longer
    /// pending.
    pub fn relaxed_state(&self, state: &SearchState) -> Vec<AtomId> {
        self.relaxed_atoms(state, usize::MAX, 0)
    }

    /// Relaxed state of the successor reached by consuming the first `take`
    /// events of agenda list `list_idx`, computed without temporal
    /// reasoning. Used by the engine to evaluate candidate successors
    /// without materializing them.
    pub fn relaxed_state_after(
        &self,
        state: &SearchState,
        list_idx: usize,
        take: usize,
    ) -> Vec<AtomId> {
        self.relaxed_atoms(state, list_idx, take)
    }

    fn relaxed_atoms(&self, state: &SearchState, list_idx: usize, take: usize) -> Vec<AtomId> {
        let mut facts = state.facts.clone();
        if take > 0 {
            for item in state.agenda[list_idx].items.iter().take(take) {
                match item.kind {
                    ItemKind::EffectAdd => facts.insert(item.pred),
                    ItemKind::EffectDelete => facts.remove(item.pred),
                    _ => {}
                }
            }
        }
        let mut atoms: Vec<AtomId> = facts.iter().map(|p| AtomId(p.0)).collect();
        for cb in self.counter_base.iter().flatten() {
            atoms.push(AtomId(*cb));
        }
        let mut pending_marker = vec![false; self.goal_marker.len()];
        for (j, list) in state.agenda.iter().enumerate() {
            let consumed = if j == list_idx { take } else { 0 };
            match list.owner {
                ListOwner::Instance(_) => {
                    let piece = list.piece.expect("instance lists have a piece") as usize;
                    if let Some(base) = self.counter_base[piece] {
                        let n = self.counter_len[piece];
                        let remaining = list.items.len() - consumed;
                        debug_assert!(remaining <= n as usize);
                        if remaining > 0 {
                            atoms.push(AtomId(base + (n - remaining as u32)));
                        }
                    }
                }
                ListOwner::StartAnchored | ListOwner::EndAnchored => {
                    for item in list.items.iter().skip(consumed) {
                        let id = item.init_id.expect("anchored lists carry literal/goal ids");
                        pending_marker[id as usize] = true;
                    }
                }
            }
        }
        for (gi, pending) in pending_marker.iter().enumerate() {
            if !pending {
                atoms.push(AtomId(self.goal_marker[gi]));
            }
        }
        atoms.sort();
        atoms.dedup();
        atoms
    }

    /// Additive heuristic on the delete-free relaxation: least fixpoint of
    /// `h(p) = 0` for `p` in the state, else `min` over adders of
    /// `1 + sum over preconditions`; the value is the sum over the goal
    /// atoms. `None` means some goal atom is unreachable.
    pub fn h_add(&self, state_atoms: &[AtomId]) -> Option<u64> {
        let mut cost: Vec<Option<u64>> = vec![None; self.atom_count];
        let mut settled = vec![false; self.atom_count];
        let mut remaining = self.pre_count.clone();
        let mut acc: Vec<u64> = vec![0; self.actions.len()];
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();

        for a in state_atoms {
            if cost[a.index()].is_none() {
                cost[a.index()] = Some(0);
                heap.push(Reverse((0, a.0)));
            }
        }
        // Actions with no preconditions fire immediately at cost 1.
        let fire = |ai: usize,
                        cost: &mut Vec<Option<u64>>,
                        heap: &mut BinaryHeap<Reverse<(u64, u32)>>,
                        acc: &[u64]| {
            let c = acc[ai].saturating_add(1);
            for added in &self.actions[ai].add {
                if cost[added.index()].is_none_or(|old| c < old) {
                    cost[added.index()] = Some(c);
                    heap.push(Reverse((c, added.0)));
                }
            }
        };
        for ai in 0..self.actions.len() {
            if remaining[ai] == 0 {
                fire(ai, &mut cost, &mut heap, &acc);
            }
        }

        while let Some(Reverse((c, atom))) = heap.pop() {
            let atom = atom as usize;
            if settled[atom] {
                continue;
            }
            settled[atom] = true;
            debug_assert_eq!(cost[atom], Some(c));
            for &ai in &self.precond_of[atom] {
                let ai = ai as usize;
                remaining[ai] -= 1;
                acc[ai] = acc[ai].saturating_add(c);
                if remaining[ai] == 0 {
                    fire(ai, &mut cost, &mut heap, &acc);
                }
            }
        }

        let mut total: u64 = 0;
        for g in &self.goals {
            total = total.saturating_add(cost[g.index()]?);
        }
        Some(total)
    }

    /// Baseline heuristic: 0 when every relaxation goal atom already holds,
    /// else 1.
    pub fn h_blind(&self, state_atoms: &[AtomId]) -> u64 {
        let all = self.goals.iter().all(|g| state_atoms.binary_search(g).is_ok());
        if all {
            0
        } else {
            1
        }
    }
}
