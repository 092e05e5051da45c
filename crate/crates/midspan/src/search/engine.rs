//! Best-first tree search over the time-point space.
//!
//! Plain tree search, no duplicate detection: states are expanded in order
//! of `f = g + h` where `g` counts expansions along the branch and `h` comes
//! from the delete-free relaxation. Ties prefer larger `g`, then
//! first-in-first-out, so runs are fully deterministic. States whose
//! heuristic is infinite (a relaxation goal is unreachable) are pruned:
//! delete-free unreachability implies real unreachability.
//!
//! The open list is lazy: an entry holds its parent state and which
//! successor to take, and the successor (with its temporal network) is only
//! materialized when the entry is popped. Heuristic values do not depend on
//! the network, so they are computed at enqueue time from the parent alone;
//! entries whose materialization turns out temporally inconsistent are
//! discarded at pop. This yields exactly the expansions an eager engine
//! would perform, while the frontier stays small.

use crate::model::{Diagnostic, Plan, Problem};
use crate::relax::RelaxedProblem;
use crate::search::{SearchSpace, SearchState};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Heuristic selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Additive delete-relaxation heuristic.
    #[default]
    Additive,
    /// 0 at relaxation goals, 1 elsewhere.
    Blind,
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hadd" => Ok(Heuristic::Additive),
            "blind" => Ok(Heuristic::Blind),
            other => Err(format!("unknown heuristic {other:?} (expected \"hadd\" or \"blind\")")),
        }
    }
}

/// Engine limits and switches.
#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    pub heuristic: Heuristic,
    /// Stop after this many expansions.
    pub max_expansions: Option<u64>,
    /// Wall-clock budget.
    pub timeout: Option<Duration>,
    /// Expand same-instant event groups of one instance in a single step.
    pub simultaneity: bool,
}

/// Counters reported alongside every outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// States popped and expanded.
    pub expansions: u64,
    /// Successor candidates enqueued.
    pub generated: u64,
    /// Candidates pruned for an unreachable relaxation goal.
    pub pruned_infinite: u64,
    /// Candidates discarded at pop because their temporal network was
    /// inconsistent.
    pub dead_ends: u64,
}

/// Why no plan was returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnsolvedReason {
    /// The finite reachable space was fully explored.
    Exhausted,
    /// The expansion budget ran out.
    ExpansionLimit,
    /// The wall-clock budget ran out.
    Timeout,
}

impl fmt::Display for UnsolvedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnsolvedReason::Exhausted => write!(f, "search space exhausted"),
            UnsolvedReason::ExpansionLimit => write!(f, "expansion limit reached"),
            UnsolvedReason::Timeout => write!(f, "time limit reached"),
        }
    }
}

/// Result of a search run.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Solved { plan: Plan, stats: SearchStats },
    Unsolved { reason: UnsolvedReason, stats: SearchStats },
}

impl SearchOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SearchOutcome::Solved { plan, .. } => Some(plan),
            SearchOutcome::Unsolved { .. } => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Solved { stats, .. } => stats,
            SearchOutcome::Unsolved { stats, .. } => stats,
        }
    }
}

enum Step {
    /// The initial state itself.
    Root(SearchState),
    /// Expand the head (group) of agenda list `list` of the parent.
    Head { parent: Arc<SearchState>, list: usize },
    /// Open an instance of piece `piece` on the parent.
    Open { parent: Arc<SearchState>, piece: usize },
}

struct OpenEntry {
    f: u64,
    g: u32,
    seq: u64,
    step: Step,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenEntry {}
impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap pops the maximum; "better" must compare greater:
        // smaller f, then larger g, then earlier insertion.
        other
            .f
            .cmp(&self.f)
            .then(self.g.cmp(&other.g))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Searches `problem` for a plan. The problem is normalized first;
/// well-formedness violations are returned as-is.
pub fn search(problem: &Problem, config: &SearchConfig) -> Result<SearchOutcome, Vec<Diagnostic>> {
    let space = SearchSpace::new(problem)?;
    Ok(search_space(&space, config))
}

/// Searches an already-built space.
pub fn search_space(space: &SearchSpace, config: &SearchConfig) -> SearchOutcome {
    let relaxation = RelaxedProblem::build(space);
    let started = Instant::now();
    let mut stats = SearchStats::default();

    let heuristic_of = |atoms: &[crate::relax::AtomId]| -> Option<u64> {
        match config.heuristic {
            Heuristic::Additive => relaxation.h_add(atoms),
            Heuristic::Blind => Some(relaxation.h_blind(atoms)),
        }
    };

    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let init = match space.initial_state() {
        Ok(init) => init,
        Err(_) => return SearchOutcome::Unsolved { reason: UnsolvedReason::Exhausted, stats },
    };
    match heuristic_of(&relaxation.relaxed_state(&init)) {
        Some(h) => {
            open.push(OpenEntry { f: h, g: 0, seq, step: Step::Root(init) });
            seq += 1;
        }
        None => {
            stats.pruned_infinite += 1;
            return SearchOutcome::Unsolved { reason: UnsolvedReason::Exhausted, stats };
        }
    }

    while let Some(entry) = open.pop() {
        let state = match entry.step {
            Step::Root(state) => state,
            Step::Head { parent, list } => {
                let succ = if config.simultaneity {
                    space.succ_tp_compressed(&parent, list)
                } else {
                    space.succ_tp(&parent, list)
                };
                match succ {
                    Some(mut s) => {
                        s.cost = parent.cost + 1;
                        s
                    }
                    None => {
                        stats.dead_ends += 1;
                        continue;
                    }
                }
            }
            Step::Open { parent, piece } => match space.succ_act(&parent, piece) {
                Some(mut s) => {
                    s.cost = parent.cost + 1;
                    s
                }
                None => {
                    stats.dead_ends += 1;
                    continue;
                }
            },
        };

        if space.is_goal(&state) {
            let plan = space.extract_plan(&state);
            return SearchOutcome::Solved { plan, stats };
        }
        if let Some(limit) = config.max_expansions {
            if stats.expansions >= limit {
                return SearchOutcome::Unsolved { reason: UnsolvedReason::ExpansionLimit, stats };
            }
        }
        if let Some(budget) = config.timeout {
            if started.elapsed() >= budget {
                return SearchOutcome::Unsolved { reason: UnsolvedReason::Timeout, stats };
            }
        }
        stats.expansions += 1;

        let g = state.cost + 1;
        let h_here = entry.f - u64::from(entry.g);
        let parent = Arc::new(state);
        for list in 0..parent.agenda.len() {
            if !space.head_admissible(&parent, list) {
                continue;
            }
            let take = if config.simultaneity {
                space.compressible_head_len(&parent, list)
            } else {
                1
            };
            let atoms = relaxation.relaxed_state_after(&parent, list, take);
            match heuristic_of(&atoms) {
                Some(h) => {
                    stats.generated += 1;
                    open.push(OpenEntry {
                        f: u64::from(g).saturating_add(h),
                        g,
                        seq,
                        step: Step::Head { parent: Arc::clone(&parent), list },
                    });
                    seq += 1;
                }
                None => stats.pruned_infinite += 1,
            }
        }
        // Opening an instance leaves the relaxed state unchanged: the child
        // inherits the parent's heuristic value.
        for piece in 0..space.pieces().len() {
            stats.generated += 1;
            open.push(OpenEntry {
                f: u64::from(g).saturating_add(h_here),
                g,
                seq,
                step: Step::Open { parent: Arc::clone(&parent), piece },
            });
            seq += 1;
        }
    }
    SearchOutcome::Unsolved { reason: UnsolvedReason::Exhausted, stats }
}
