//! Incremental simple temporal network over exact scalars.
//!
//! Constraints are difference bounds `v - u <= c` (weak) or `v - u < c`
//! (strict) between nodes. Strictness is handled without any global epsilon:
//! an edge weighs `(c, -1)` if strict and `(c, 0)` otherwise, weights add
//! componentwise and compare lexicographically, and the network is
//! inconsistent exactly when some cycle weighs less than `(0, 0)` — that is,
//! a cycle with negative total bound, or a zero-bound cycle containing a
//! strict edge.
//!
//! Consistency is maintained incrementally: the network carries a potential
//! function (a feasible assignment in the lexicographic group) and each new
//! constraint triggers a Dijkstra pass over reduced costs from the affected
//! node, proportional to the subgraph whose potentials actually change. Once
//! inconsistent, the network is frozen.
//!
//! The observable contract of cloning is value-copy; internally the
//! per-node constraint lists are shared between clones (the search copies
//! the network on every branch, and branches only ever add constraints).
//!
//! Node 0 is the origin (plan start, time zero); every node is implicitly
//! constrained to be at or after it.

use crate::scalar::{DenseTimeScalar, TimeScalar};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::sync::Arc;

/// Dense handle of a network node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ORIGIN: NodeId = NodeId(0);

    fn index(self) -> usize {
        self.0 as usize
    }
}

/// `v - u <= value`, or `v - u < value` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound<T> {
    pub value: T,
    pub strict: bool,
}

impl<T> Bound<T> {
    pub fn weak(value: T) -> Self {
        Bound { value, strict: false }
    }

    pub fn strict(value: T) -> Self {
        Bound { value, strict: true }
    }
}

/// Element of the lexicographic group (value, epsilon-count); a strict edge
/// contributes epsilon-count -1, i.e. behaves as `value - epsilon` for an
/// arbitrarily small positive epsilon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offset<T> {
    pub value: T,
    pub eps: i64,
}

impl<T: TimeScalar> Offset<T> {
    fn zero() -> Self {
        Offset { value: T::zero(), eps: 0 }
    }

    fn from_bound(b: &Bound<T>) -> Self {
        Offset { value: b.value.clone(), eps: if b.strict { -1 } else { 0 } }
    }

    fn plus(&self, other: &Self) -> Self {
        Offset { value: self.value.clone() + other.value.clone(), eps: self.eps + other.eps }
    }

    fn minus(&self, other: &Self) -> Self {
        Offset { value: self.value.clone() - other.value.clone(), eps: self.eps - other.eps }
    }

    fn is_negative(&self) -> bool {
        *self < Offset::zero()
    }
}

impl<T: Ord> PartialOrd for Offset<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Offset<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then(self.eps.cmp(&other.eps))
    }
}

/// Immutable cons cell: one outgoing constraint of a node, linking to the
/// node's earlier constraints. Shared across network clones.
#[derive(Debug)]
struct EdgeCell<T> {
    to: NodeId,
    weight: Offset<T>,
    strict: bool,
    prev: OutList<T>,
}

type OutList<T> = Option<Arc<EdgeCell<T>>>;

/// Min-heap entry for the propagation passes; ties broken by node id so
/// traversal order is deterministic.
struct HeapEntry<T> {
    dist: Offset<T>,
    node: NodeId,
}

impl<T: Ord> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Ord> Eq for HeapEntry<T> {}
impl<T: Ord> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Ord> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest distance.
        other.dist.cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

/// Error returned when a schedule is requested from an inconsistent network.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the temporal network is inconsistent")]
pub struct Inconsistent;

/// The network. Clones are independent (branches only add constraints; the
/// shared tails of the constraint lists are immutable).
#[derive(Debug, Clone)]
pub struct Stn<T = crate::Time> {
    /// Outgoing constraints per node (persistent lists).
    out: Vec<OutList<T>>,
    /// Feasible potentials while consistent: for every edge,
    /// `potential[to] <= potential[from] + weight`.
    potential: Vec<Offset<T>>,
    edges: u32,
    inconsistent: bool,
}

impl<T: TimeScalar> Default for Stn<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: TimeScalar> Stn<T> {
    /// Fresh network holding only the origin node.
    pub fn new() -> Self {
        Stn { out: vec![None], potential: vec![Offset::zero()], edges: 0, inconsistent: false }
    }

    pub fn node_count(&self) -> usize {
        self.potential.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges as usize
    }

    /// Iterates all recorded constraints as `(from, to, bound)`.
    pub fn constraints(&self) -> impl Iterator<Item = (NodeId, NodeId, Bound<T>)> + '_ {
        self.out.iter().enumerate().flat_map(|(from, list)| {
            let mut cell = list.as_ref();
            std::iter::from_fn(move || {
                let c = cell?;
                cell = c.prev.as_ref();
                Some((
                    NodeId(from as u32),
                    c.to,
                    Bound { value: c.weight.value.clone(), strict: c.strict },
                ))
            })
        })
    }

    /// Creates a node, implicitly at or after the origin.
    pub fn add_node(&mut self) -> NodeId {
        let id = NodeId(self.potential.len() as u32);
        self.potential.push(Offset::zero());
        self.out.push(None);
        // origin - node <= 0
        self.push_constraint(id, NodeId::ORIGIN, Bound::weak(T::zero()));
        id
    }

    /// Records `v - u <= bound` (or `< bound` when strict) and restores the
    /// potential function, flagging inconsistency if the constraint closes a
    /// negative cycle. After the network has become inconsistent it is
    /// frozen: further constraints are recorded but change nothing.
    pub fn push_constraint(&mut self, u: NodeId, v: NodeId, bound: Bound<T>) {
        assert!(u.index() < self.node_count() && v.index() < self.node_count());
        let weight = Offset::from_bound(&bound);
        let prev = self.out[u.index()].take();
        self.out[u.index()] =
            Some(Arc::new(EdgeCell { to: v, weight: weight.clone(), strict: bound.strict, prev }));
        self.edges += 1;
        if self.inconsistent {
            return;
        }
        if u == v {
            if weight.is_negative() {
                self.inconsistent = true;
            }
            return;
        }
        let slack = self.potential[u.index()].plus(&weight).minus(&self.potential[v.index()]);
        if !slack.is_negative() {
            return;
        }
        self.propagate(u, v, &slack);
    }

    /// Dijkstra over reduced costs from `v` after a violated new edge
    /// `u -> v`. `slack < 0` is the violation amount. Nodes whose potential
    /// must drop are exactly those with reduced distance `d` from `v` with
    /// `slack + d < 0`; if `u` is among them the new edge lies on a negative
    /// cycle.
    fn propagate(&mut self, u: NodeId, v: NodeId, slack: &Offset<T>) {
        let n = self.node_count();
        let mut dist: Vec<Option<Offset<T>>> = vec![None; n];
        let mut done = vec![false; n];
        let mut updates: Vec<(NodeId, Offset<T>)> = Vec::new();
        let mut heap = BinaryHeap::new();
        dist[v.index()] = Some(Offset::zero());
        heap.push(HeapEntry { dist: Offset::zero(), node: v });

        while let Some(HeapEntry { dist: d, node: x }) = heap.pop() {
            if done[x.index()] {
                continue;
            }
            done[x.index()] = true;
            let drop = slack.plus(&d);
            if !drop.is_negative() {
                // Distances only grow from here: nothing else changes.
                break;
            }
            if x == u {
                self.inconsistent = true;
                return;
            }
            updates.push((x, self.potential[x.index()].plus(&drop)));
            let mut cell = self.out[x.index()].as_ref();
            while let Some(edge) = cell {
                let y = edge.to;
                if !done[y.index()] {
                    // Reduced cost of an edge satisfied by the old
                    // potentials is nonnegative, so this is a valid Dijkstra
                    // relaxation.
                    let reduced = self.potential[x.index()]
                        .plus(&edge.weight)
                        .minus(&self.potential[y.index()]);
                    let cand = d.plus(&reduced);
                    if dist[y.index()].as_ref().map_or(true, |old| cand < *old) {
                        dist[y.index()] = Some(cand.clone());
                        heap.push(HeapEntry { dist: cand, node: y });
                    }
                }
                cell = edge.prev.as_ref();
            }
        }
        for (node, pot) in updates {
            self.potential[node.index()] = pot;
        }
    }

    /// True while no negative cycle (including zero cycles with a strict
    /// edge) has been recorded. Constant time: the work happens in
    /// [`Stn::push_constraint`].
    pub fn check_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Tightest entailed bound on `to - from`, or `None` when unconstrained.
    /// The network must be consistent.
    pub fn entailed_upper(&self, from: NodeId, to: NodeId) -> Option<Bound<T>> {
        assert!(self.check_consistent());
        if from == to {
            return Some(Bound::weak(T::zero()));
        }
        let n = self.node_count();
        let mut dist: Vec<Option<Offset<T>>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[from.index()] = Some(Offset::zero());
        heap.push(HeapEntry { dist: Offset::zero(), node: from });
        while let Some(HeapEntry { dist: d, node: x }) = heap.pop() {
            if done[x.index()] {
                continue;
            }
            done[x.index()] = true;
            if x == to {
                let real =
                    d.plus(&self.potential[to.index()]).minus(&self.potential[from.index()]);
                let strict = real.eps < 0;
                return Some(if strict {
                    Bound::strict(real.value)
                } else {
                    Bound::weak(real.value)
                });
            }
            let mut cell = self.out[x.index()].as_ref();
            while let Some(edge) = cell {
                let y = edge.to;
                if !done[y.index()] {
                    let reduced = self.potential[x.index()]
                        .plus(&edge.weight)
                        .minus(&self.potential[y.index()]);
                    let cand = d.plus(&reduced);
                    if dist[y.index()].as_ref().map_or(true, |old| cand < *old) {
                        dist[y.index()] = Some(cand.clone());
                        heap.push(HeapEntry { dist: cand, node: y });
                    }
                }
                cell = edge.prev.as_ref();
            }
        }
        None
    }

    /// True when the network forces `a` and `b` to the same instant in every
    /// schedule. The network must be consistent.
    ///
    /// Equality is forced exactly when both differences are bounded above by
    /// zero (a strict zero bound in one direction alongside any zero bound in
    /// the other would be a negative cycle, which a consistent network cannot
    /// contain).
    pub fn forces_equal(&self, a: NodeId, b: NodeId) -> bool {
        let nonpos = |upper: Option<Bound<T>>| upper.map_or(false, |b| b.value <= T::zero());
        // entailed_upper(b, a) bounds a - b; entailed_upper(a, b) bounds b - a.
        nonpos(self.entailed_upper(b, a)) && nonpos(self.entailed_upper(a, b))
    }

    /// Earliest time of every node in the lexicographic group: the value
    /// part plus `eps` counts of an arbitrarily small positive gap. Origin
    /// is zero. The network must be consistent.
    ///
    /// For every node the `eps` component is nonnegative, so any
    /// sufficiently small positive rational realizes the strict gaps; see
    /// [`Stn::extract_schedule`].
    pub fn earliest_offsets(&self) -> Result<Vec<Offset<T>>, Inconsistent> {
        if self.inconsistent {
            return Err(Inconsistent);
        }
        // Earliest time of x is minus the shortest path weight from x to the
        // origin (every node has one through its implicit origin edge).
        // Queue-based Bellman-Ford over reversed edges, in the lexicographic
        // group.
        let n = self.node_count();
        let mut rev: Vec<Vec<(NodeId, &Offset<T>)>> = vec![Vec::new(); n];
        for (from, list) in self.out.iter().enumerate() {
            let mut cell = list.as_ref();
            while let Some(edge) = cell {
                rev[edge.to.index()].push((NodeId(from as u32), &edge.weight));
                cell = edge.prev.as_ref();
            }
        }
        let mut to_origin: Vec<Option<Offset<T>>> = vec![None; n];
        to_origin[NodeId::ORIGIN.index()] = Some(Offset::zero());
        let mut queue = std::collections::VecDeque::new();
        let mut queued = vec![false; n];
        queue.push_back(NodeId::ORIGIN);
        queued[NodeId::ORIGIN.index()] = true;
        let mut relaxations = 0usize;
        let budget = (n + 1) * (self.edge_count() + 1);
        while let Some(y) = queue.pop_front() {
            queued[y.index()] = false;
            let base = to_origin[y.index()].clone().expect("queued node has a distance");
            for (x, w) in &rev[y.index()] {
                let cand = w.plus(&base);
                if to_origin[x.index()].as_ref().map_or(true, |old| cand < *old) {
                    relaxations += 1;
                    assert!(relaxations <= budget, "negative cycle in a consistent network");
                    to_origin[x.index()] = Some(cand);
                    if !queued[x.index()] {
                        queued[x.index()] = true;
                        queue.push_back(*x);
                    }
                }
            }
        }
        let earliest: Vec<Offset<T>> = to_origin
            .into_iter()
            .map(|d| {
                let d = d.expect("every node reaches the origin");
                Offset { value: T::zero() - d.value, eps: -d.eps }
            })
            .collect();
        debug_assert!(earliest.iter().all(|w| w.eps >= 0));
        Ok(earliest)
    }

    /// One line per recorded constraint: `t<v> - t<u> {<,<=} value`.
    /// Constraints are listed newest-first per node.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (from, to, bound) in self.constraints() {
            let op = if bound.strict { "<" } else { "<=" };
            let _ = writeln!(s, "t{} - t{} {} {}", to.0, from.0, op, bound.value);
        }
        s
    }

    /// Re-checks an assignment against every recorded constraint.
    pub fn verify_times(&self, times: &[T]) -> bool {
        self.constraints().all(|(from, to, bound)| {
            let diff = times[to.index()].clone() - times[from.index()].clone();
            if bound.strict {
                diff < bound.value
            } else {
                diff <= bound.value
            }
        })
    }
}

impl<T: DenseTimeScalar> Stn<T> {
    /// Exact earliest schedule: origin at zero, every constraint satisfied,
    /// strict ones with strictly positive slack. Strict gaps are realized by
    /// a positive value that starts at one and halves until the exact edge
    /// re-check accepts; the result is always re-verified before returning.
    pub fn extract_schedule(&self) -> Result<Vec<T>, Inconsistent> {
        let earliest = self.earliest_offsets()?;
        let mut gap = T::one();
        for _ in 0..256 {
            let times: Vec<T> = earliest
                .iter()
                .map(|w| w.value.clone() + times_int(&gap, w.eps))
                .collect();
            if self.verify_times(&times) {
                debug_assert!(times[NodeId::ORIGIN.index()].is_zero());
                return Ok(times);
            }
            gap = gap.halved();
        }
        unreachable!("strict slacks are positive rationals; halving must terminate");
    }
}

/// `base * k` for a nonnegative integer `k`, by doubling.
pub(crate) fn times_int<T: TimeScalar>(base: &T, k: i64) -> T {
    debug_assert!(k >= 0);
    let mut acc = T::zero();
    let mut add = base.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc + add.clone();
        }
        k >>= 1;
        if k > 0 {
            add = add.clone() + add;
        }
    }
    acc
}
