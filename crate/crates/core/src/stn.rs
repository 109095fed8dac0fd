//! Simple Temporal Network machinery on plain weighted digraphs.
//!
//! An arc `(t, h, w)` encodes `s(h) - s(t) <= w`. A potential `p` is
//! feasible when every reduced weight `w - p(h) + p(t)` is non-negative,
//! which exists iff the graph has no negative cycle.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::model::{Schedule, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StnError {
    #[error("node {node} out of range for a graph of order {order}")]
    NodeOutOfRange { node: usize, order: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} is unreachable from source {origin}")]
    Unreachable { node: usize, origin: usize },
}

/// Weighted arc `(tail, head, weight)`.
pub type Arc = (usize, usize, Weight);

/// Weighted digraph without self-loops and with at most one arc per
/// ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceGraph {
    order: usize,
    arcs: Vec<Arc>,
}

impl DistanceGraph {
    /// Duplicate ordered pairs keep the minimum weight; arc order otherwise
    /// follows first occurrence.
    pub fn new(order: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self, StnError> {
        let mut position: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut kept: Vec<Arc> = Vec::new();
        for (t, h, w) in arcs {
            for v in [t, h] {
                if v >= order {
                    return Err(StnError::NodeOutOfRange { node: v, order });
                }
            }
            if t == h {
                return Err(StnError::SelfLoop(t));
            }
            match position.get(&(t, h)) {
                Some(&i) => kept[i].2 = kept[i].2.min(w),
                None => {
                    position.insert((t, h), kept.len());
                    kept.push((t, h, w));
                }
            }
        }
        Ok(DistanceGraph { order, arcs: kept })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Copy of the graph with one extra node (index `order`) and a 0-weight
    /// arc from it to each node in `targets`.
    pub fn with_virtual_source(&self, targets: impl IntoIterator<Item = usize>) -> DistanceGraph {
        let source = self.order;
        let mut arcs = self.arcs.clone();
        arcs.extend(targets.into_iter().map(|v| (source, v, 0)));
        DistanceGraph { order: self.order + 1, arcs }
    }
}

/// Integer node labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential(Vec<Weight>);

impl Potential {
    pub fn new(values: Vec<Weight>) -> Self {
        Potential(values)
    }

    pub fn values(&self) -> &[Weight] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Weight> {
        self.0
    }

    /// Whether all reduced weights of `graph` are non-negative.
    pub fn is_feasible_for(&self, graph: &DistanceGraph) -> bool {
        graph
            .arcs
            .iter()
            .all(|&(t, h, w)| w as i128 - self.0[h] as i128 + self.0[t] as i128 >= 0)
    }
}

/// Result of a shortest-path computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShortestPaths {
    /// Shortest-path distances; a feasible potential.
    Feasible(Potential),
    /// A closed walk of negative total weight, as consecutive arcs.
    NegativeCycle(Vec<Arc>),
}

impl ShortestPaths {
    pub fn into_potential(self) -> Option<Potential> {
        match self {
            ShortestPaths::Feasible(p) => Some(p),
            ShortestPaths::NegativeCycle(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, ShortestPaths::Feasible(_))
    }
}

/// Total weight of a walk.
pub fn walk_weight(arcs: &[Arc]) -> i128 {
    arcs.iter().map(|&(_, _, w)| w as i128).sum()
}

/// Whether `arcs` form a closed walk: the head of each arc is the tail of
/// the next one, cyclically.
pub fn is_closed_walk(arcs: &[Arc]) -> bool {
    !arcs.is_empty() && (0..arcs.len()).all(|i| arcs[i].1 == arcs[(i + 1) % arcs.len()].0)
}

struct Adjacency {
    offsets: Vec<usize>,
    arcs: Vec<usize>,
}

impl Adjacency {
    fn outgoing(graph: &DistanceGraph) -> Self {
        let mut offsets = vec![0usize; graph.order + 1];
        for &(t, _, _) in &graph.arcs {
            offsets[t + 1] += 1;
        }
        for i in 0..graph.order {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut arcs = vec![0; graph.arcs.len()];
        for (i, &(t, _, _)) in graph.arcs.iter().enumerate() {
            arcs[fill[t]] = i;
            fill[t] += 1;
        }
        Adjacency { offsets, arcs }
    }

    fn of(&self, v: usize) -> &[usize] {
        &self.arcs[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Queue-based Bellman-Ford from `source`.
///
/// Every node must be reachable from `source`. On conservative graphs the
/// result holds integral shortest-path distances; otherwise a negative
/// cycle is returned.
pub fn bellman_ford(graph: &DistanceGraph, source: usize) -> Result<ShortestPaths, StnError> {
    let n = graph.order;
    if source >= n {
        return Err(StnError::NodeOutOfRange { node: source, order: n });
    }
    let adj = Adjacency::outgoing(graph);
    check_reachable(graph, &adj, source)?;

    let mut dist: Vec<i128> = vec![i128::MAX; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut hops = vec![0usize; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    queued[source] = true;
    let mut since_check = 0usize;

    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        for &a in adj.of(u) {
            let (_, v, w) = graph.arcs[a];
            let candidate = dist[u] + w as i128;
            if candidate < dist[v] {
                dist[v] = candidate;
                parent[v] = Some(a);
                hops[v] = hops[u] + 1;
                since_check += 1;
                // A shortest walk with n arcs repeats a node; look for a
                // cycle in the parent graph (always negative when present).
                if hops[v] >= n || since_check >= n {
                    since_check = 0;
                    if let Some(cycle) = parent_cycle(graph, &parent) {
                        return Ok(ShortestPaths::NegativeCycle(cycle));
                    }
                    if hops[v] >= n {
                        return Ok(ShortestPaths::NegativeCycle(round_based_cycle(graph, source)));
                    }
                }
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(ShortestPaths::Feasible(Potential(dist.into_iter().map(|d| d as Weight).collect())))
}

fn check_reachable(graph: &DistanceGraph, adj: &Adjacency, source: usize) -> Result<(), StnError> {
    let mut seen = vec![false; graph.order];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(u) = stack.pop() {
        for &a in adj.of(u) {
            let v = graph.arcs[a].1;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(node) => Err(StnError::Unreachable { node, origin: source }),
        None => Ok(()),
    }
}

/// Finds a cycle in the graph formed by parent arcs, if any.
fn parent_cycle(graph: &DistanceGraph, parent: &[Option<usize>]) -> Option<Vec<Arc>> {
    const FRESH: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let n = graph.order;
    let mut state = vec![FRESH; n];
    for start in 0..n {
        if state[start] != FRESH {
            continue;
        }
        let mut v = start;
        let mut trail = Vec::new();
        while state[v] == FRESH {
            state[v] = ACTIVE;
            trail.push(v);
            match parent[v] {
                Some(a) => v = graph.arcs[a].0,
                None => break,
            }
        }
        if state[v] == ACTIVE && parent[v].is_some() {
            return Some(collect_cycle(graph, parent, v));
        }
        for u in trail {
            state[u] = DONE;
        }
    }
    None
}

/// Walks parent arcs backwards from `on_cycle` until it returns.
fn collect_cycle(graph: &DistanceGraph, parent: &[Option<usize>], on_cycle: usize) -> Vec<Arc> {
    let mut cycle = Vec::new();
    let mut v = on_cycle;
    loop {
        let a = parent[v].expect("node on a parent cycle has a parent");
        cycle.push(graph.arcs[a]);
        v = graph.arcs[a].0;
        if v == on_cycle {
            break;
        }
    }
    cycle.reverse();
    cycle
}

/// Classic round-based extraction; only called once a negative cycle is
/// known to exist.
fn round_based_cycle(graph: &DistanceGraph, source: usize) -> Vec<Arc> {
    let n = graph.order;
    let mut dist: Vec<i128> = vec![i128::MAX; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    dist[source] = 0;
    let mut last = None;
    for _ in 0..n {
        last = None;
        for (i, &(t, h, w)) in graph.arcs.iter().enumerate() {
            if dist[t] != i128::MAX && dist[t] + (w as i128) < dist[h] {
                dist[h] = dist[t] + w as i128;
                parent[h] = Some(i);
                last = Some(h);
            }
        }
    }
    let mut v = last.expect("a negative cycle keeps relaxing in round n");
    for _ in 0..n {
        v = graph.arcs[parent[v].expect("relaxed node has a parent")].0;
    }
    collect_cycle(graph, &parent, v)
}

/// Consistency of the STN encoded by `graph`: a feasible schedule (the
/// distances from a virtual source with 0-arcs to every node) or a
/// negative cycle.
pub fn stn_consistency(graph: &DistanceGraph) -> StnOutcome {
    let n = graph.order;
    let extended = graph.with_virtual_source(0..n);
    match bellman_ford(&extended, n).expect("virtual source reaches every node") {
        ShortestPaths::Feasible(p) => {
            let mut values = p.into_inner();
            values.truncate(n);
            StnOutcome::Consistent(Schedule::new(values))
        }
        ShortestPaths::NegativeCycle(c) => StnOutcome::NegativeCycle(c),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StnOutcome {
    Consistent(Schedule),
    NegativeCycle(Vec<Arc>),
}

impl StnOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, StnOutcome::Consistent(_))
    }

    pub fn into_potential(self) -> Option<Potential> {
        match self {
            StnOutcome::Consistent(s) => Some(Potential::new(s.into_inner())),
            StnOutcome::NegativeCycle(_) => None,
        }
    }
}
