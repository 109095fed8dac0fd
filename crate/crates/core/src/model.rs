//! Hyper Temporal Network data model.
//!
//! A network is a set of timepoints `0..n` plus a list of hyperarcs. Every
//! hyperarc has one *distinguished* endpoint (the tail of a standard or
//! multi-head arc, the head of a multi-tail arc) and a non-empty list of
//! weighted *ends* on the other side.
//!
//! Constraint semantics for a schedule `s`:
//!
//! * standard `(t, h, w)`: `s(h) - s(t) <= w`
//! * multi-head `(t, H, w)`: `s(t) >= min_{v in H} (s(v) - w(v))`
//! * multi-tail `(T, h, w)`: `s(h) <= max_{v in T} (s(v) + w(v))`

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::stn::{self, DistanceGraph};

/// Integer weight and time type.
pub type Weight = i64;

/// Largest admissible absolute weight of a single constraint.
pub const MAX_ABS_WEIGHT: Weight = i32::MAX as Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("timepoint {id} out of range for a network of order {order}")]
    TimepointOutOfRange { id: usize, order: usize },
    #[error("hyperarc {arc} has no ends")]
    EmptyArc { arc: usize },
    #[error("hyperarc {arc} is a self-loop on timepoint {node}")]
    SelfLoop { arc: usize, node: usize },
    #[error("hyperarc {arc} lists timepoint {node} twice")]
    DuplicateEnd { arc: usize, node: usize },
    #[error("hyperarc {arc} duplicates the standard arc {tail} -> {head}")]
    ParallelArc { arc: usize, tail: usize, head: usize },
    #[error("weight {weight} of hyperarc {arc} exceeds the admissible range")]
    WeightOutOfRange { arc: usize, weight: Weight },
    #[error("schedule has {got} values but the network has {expected} timepoints")]
    ScheduleLength { expected: usize, got: usize },
    #[error("weight sum overflows a 64-bit accumulator")]
    WeightOverflow,
}

impl ModelError {
    /// Index of the offending hyperarc, when the error concerns one.
    pub fn arc(&self) -> Option<usize> {
        match *self {
            ModelError::EmptyArc { arc }
            | ModelError::SelfLoop { arc, .. }
            | ModelError::DuplicateEnd { arc, .. }
            | ModelError::ParallelArc { arc, .. }
            | ModelError::WeightOutOfRange { arc, .. } => Some(arc),
            _ => None,
        }
    }
}

/// Dense timepoint index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimepointId(pub usize);

impl TimepointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TimepointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of a hyperarc in its network's arc list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub usize);

impl ArcId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Standard,
    MultiHead,
    MultiTail,
}

/// A standard arc, multi-head or multi-tail hyperarc.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyperarc {
    kind: ArcKind,
    pivot: TimepointId,
    ends: Vec<(TimepointId, Weight)>,
}

impl Hyperarc {
    pub fn standard(tail: usize, head: usize, weight: Weight) -> Self {
        Hyperarc {
            kind: ArcKind::Standard,
            pivot: TimepointId(tail),
            ends: vec![(TimepointId(head), weight)],
        }
    }

    /// `s(tail) >= min_h (s(h) - w(h))`. A single head yields a standard arc.
    pub fn multi_head(tail: usize, heads: &[(usize, Weight)]) -> Self {
        Self::hyper(ArcKind::MultiHead, tail, heads)
    }

    /// `s(head) <= max_t (s(t) + w(t))`. A single tail yields a standard arc.
    pub fn multi_tail(head: usize, tails: &[(usize, Weight)]) -> Self {
        Self::hyper(ArcKind::MultiTail, head, tails)
    }

    fn hyper(kind: ArcKind, pivot: usize, ends: &[(usize, Weight)]) -> Self {
        let ends: Vec<_> = ends.iter().map(|&(v, w)| (TimepointId(v), w)).collect();
        if ends.len() == 1 {
            let (v, w) = ends[0];
            return match kind {
                ArcKind::MultiTail => Hyperarc::standard(v.0, pivot, w),
                _ => Hyperarc::standard(pivot, v.0, w),
            };
        }
        Hyperarc {
            kind,
            pivot: TimepointId(pivot),
            ends,
        }
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    /// The distinguished endpoint: tail for standard and multi-head arcs,
    /// head for multi-tail arcs.
    pub fn pivot(&self) -> TimepointId {
        self.pivot
    }

    /// The weighted endpoints on the non-distinguished side.
    pub fn ends(&self) -> &[(TimepointId, Weight)] {
        &self.ends
    }

    /// Number of endpoints, `|A|`.
    pub fn cardinality(&self) -> usize {
        self.ends.len() + 1
    }

    /// Tail of a standard or multi-head arc.
    pub fn tail(&self) -> Option<TimepointId> {
        match self.kind {
            ArcKind::MultiTail => None,
            _ => Some(self.pivot),
        }
    }

    /// The arc with its direction flipped; multi-head and multi-tail swap.
    pub fn reversed(&self) -> Hyperarc {
        let kind = match self.kind {
            ArcKind::Standard => ArcKind::Standard,
            ArcKind::MultiHead => ArcKind::MultiTail,
            ArcKind::MultiTail => ArcKind::MultiHead,
        };
        if kind == ArcKind::Standard {
            let (h, w) = self.ends[0];
            return Hyperarc::standard(h.0, self.pivot.0, w);
        }
        Hyperarc {
            kind,
            pivot: self.pivot,
            ends: self.ends.clone(),
        }
    }

    /// Whether `s` satisfies this constraint.
    pub fn is_satisfied_by(&self, s: &[Weight]) -> bool {
        let at = |v: TimepointId| s[v.0] as i128;
        let pivot = at(self.pivot);
        match self.kind {
            ArcKind::Standard => {
                let (h, w) = self.ends[0];
                at(h) - pivot <= w as i128
            }
            ArcKind::MultiHead => self.ends.iter().any(|&(v, w)| pivot >= at(v) - w as i128),
            ArcKind::MultiTail => self.ends.iter().any(|&(v, w)| pivot <= at(v) + w as i128),
        }
    }
}

/// Structural class of a network, used to route it to a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkClass {
    StandardOnly,
    MultiHeadOnly,
    MultiTailOnly,
    Mixed,
}

impl NetworkClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NetworkClass::StandardOnly => "standard",
            NetworkClass::MultiHeadOnly => "multi-head",
            NetworkClass::MultiTailOnly => "multi-tail",
            NetworkClass::Mixed => "mixed",
        }
    }
}

impl fmt::Display for NetworkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated Hyper Temporal Network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hytn {
    order: usize,
    arcs: Vec<Hyperarc>,
}

impl Hytn {
    /// Validates and builds a network. Single-end hyperarcs are already
    /// normalized to standard arcs by the [`Hyperarc`] constructors.
    pub fn new(order: usize, arcs: Vec<Hyperarc>) -> Result<Self, ModelError> {
        let mut standard_pairs = HashSet::new();
        for (i, arc) in arcs.iter().enumerate() {
            if arc.ends.is_empty() {
                return Err(ModelError::EmptyArc { arc: i });
            }
            let check = |v: TimepointId| {
                if v.0 >= order {
                    Err(ModelError::TimepointOutOfRange { id: v.0, order })
                } else {
                    Ok(())
                }
            };
            check(arc.pivot)?;
            let mut seen = HashSet::with_capacity(arc.ends.len());
            for &(v, w) in &arc.ends {
                check(v)?;
                if v == arc.pivot {
                    return Err(ModelError::SelfLoop { arc: i, node: v.0 });
                }
                if !seen.insert(v) {
                    return Err(ModelError::DuplicateEnd { arc: i, node: v.0 });
                }
                if w.abs() > MAX_ABS_WEIGHT {
                    return Err(ModelError::WeightOutOfRange { arc: i, weight: w });
                }
            }
            if arc.kind == ArcKind::Standard {
                let (tail, head) = (arc.pivot.0, arc.ends[0].0 .0);
                if !standard_pairs.insert((tail, head)) {
                    return Err(ModelError::ParallelArc { arc: i, tail, head });
                }
            }
        }
        Ok(Hytn { order, arcs })
    }

    /// A network without constraints.
    pub fn empty(order: usize) -> Self {
        Hytn { order, arcs: Vec::new() }
    }

    /// Number of timepoints `n`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `m = sum |A|` over all hyperarcs.
    pub fn size(&self) -> usize {
        self.arcs.iter().map(Hyperarc::cardinality).sum()
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Hyperarc {
        &self.arcs[id.0]
    }

    /// Largest absolute weight, `W`.
    pub fn max_abs_weight(&self) -> Weight {
        self.arcs
            .iter()
            .flat_map(|a| a.ends.iter().map(|&(_, w)| w.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn classify(&self) -> NetworkClass {
        classify(self)
    }

    /// Network restricted to the arcs selected by `keep`, same timepoints.
    pub fn sub_network(&self, mut keep: impl FnMut(ArcId, &Hyperarc) -> bool) -> Hytn {
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .filter(|(i, a)| keep(ArcId(*i), a))
            .map(|(_, a)| a.clone())
            .collect();
        Hytn { order: self.order, arcs }
    }
}

/// Incremental construction of a [`Hytn`].
#[derive(Debug, Clone, Default)]
pub struct HytnBuilder {
    order: usize,
    arcs: Vec<Hyperarc>,
}

impl HytnBuilder {
    pub fn new(order: usize) -> Self {
        HytnBuilder { order, arcs: Vec::new() }
    }

    pub fn standard(mut self, tail: usize, head: usize, weight: Weight) -> Self {
        self.arcs.push(Hyperarc::standard(tail, head, weight));
        self
    }

    pub fn multi_head(mut self, tail: usize, heads: &[(usize, Weight)]) -> Self {
        self.arcs.push(Hyperarc::multi_head(tail, heads));
        self
    }

    pub fn multi_tail(mut self, head: usize, tails: &[(usize, Weight)]) -> Self {
        self.arcs.push(Hyperarc::multi_tail(head, tails));
        self
    }

    pub fn arc(mut self, arc: Hyperarc) -> Self {
        self.arcs.push(arc);
        self
    }

    pub fn build(self) -> Result<Hytn, ModelError> {
        Hytn::new(self.order, self.arcs)
    }
}

/// Integer time assignment, one value per timepoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule(Vec<Weight>);

impl Schedule {
    pub fn new(values: Vec<Weight>) -> Self {
        Schedule(values)
    }

    pub fn zeros(order: usize) -> Self {
        Schedule(vec![0; order])
    }

    pub fn values(&self) -> &[Weight] {
        &self.0
    }

    pub fn get(&self, v: TimepointId) -> Weight {
        self.0[v.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The time-flipped schedule `-s`.
    pub fn negated(&self) -> Schedule {
        Schedule(self.0.iter().map(|v| -v).collect())
    }

    pub fn into_inner(self) -> Vec<Weight> {
        self.0
    }
}

impl From<Vec<Weight>> for Schedule {
    fn from(values: Vec<Weight>) -> Self {
        Schedule(values)
    }
}

/// A negative cycle `(S, C)` of a multi-head network.
///
/// `S` is a set of timepoints, `C` a set of hyperarcs such that every node
/// of `S` is the tail of exactly one arc of `C` and all heads of `C` stay
/// inside `S`. It is negative when every cyclic sequence obtained by
/// following, from each node, one head of its arc has negative weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegativeCycleCert {
    nodes: Vec<TimepointId>,
    arcs: Vec<ArcId>,
}

impl NegativeCycleCert {
    /// Nodes and arcs are stored sorted and deduplicated.
    pub fn new(nodes: impl IntoIterator<Item = TimepointId>, arcs: impl IntoIterator<Item = ArcId>) -> Self {
        let nodes: BTreeSet<_> = nodes.into_iter().collect();
        let arcs: BTreeSet<_> = arcs.into_iter().collect();
        NegativeCycleCert {
            nodes: nodes.into_iter().collect(),
            arcs: arcs.into_iter().collect(),
        }
    }

    pub fn nodes(&self) -> &[TimepointId] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    /// The map `a: S -> C` sending each node to the arc it is the tail of.
    /// `None` if some arc is not a tail-carrying arc of `network`, if a node
    /// tails several arcs, or if an id is out of range.
    pub fn assignment(&self, network: &Hytn) -> Option<BTreeMap<TimepointId, ArcId>> {
        let mut map = BTreeMap::new();
        for &a in &self.arcs {
            let tail = network.arcs.get(a.0)?.tail()?;
            if map.insert(tail, a).is_some() {
                return None;
            }
        }
        Some(map)
    }
}

/// Whether `s` satisfies every hyperarc of `network`.
pub fn verify_schedule(network: &Hytn, s: &Schedule) -> Result<bool, ModelError> {
    if s.len() != network.order {
        return Err(ModelError::ScheduleLength {
            expected: network.order,
            got: s.len(),
        });
    }
    Ok(network.arcs.iter().all(|a| a.is_satisfied_by(&s.0)))
}

/// Total predicate: whether `cert` is a negative cycle of `network`.
///
/// Multi-tail networks are checked on their reversal, so certificates
/// produced by the solver for them verify here as well. Mixed networks
/// admit no certificate and always yield `false`.
pub fn verify_negative_cycle(network: &Hytn, cert: &NegativeCycleCert) -> bool {
    match network.classify() {
        NetworkClass::Mixed => false,
        NetworkClass::MultiTailOnly => verify_multi_head_cycle(&reverse_network(network), cert),
        _ => verify_multi_head_cycle(network, cert),
    }
}

fn verify_multi_head_cycle(network: &Hytn, cert: &NegativeCycleCert) -> bool {
    if cert.nodes.is_empty() || cert.nodes.iter().any(|v| v.0 >= network.order) {
        return false;
    }
    let Some(assignment) = cert.assignment(network) else {
        return false;
    };
    // Condition 2: every node of S tails exactly one arc, and no arc tails
    // outside S. Together with heads inside S this is condition 1.
    let in_set: HashSet<TimepointId> = cert.nodes.iter().copied().collect();
    if assignment.len() != cert.nodes.len() || assignment.keys().any(|v| !in_set.contains(v)) {
        return false;
    }

    let local: BTreeMap<TimepointId, usize> = cert.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut aux = Vec::new();
    for (&tail, &arc) in &assignment {
        for &(head, w) in network.arc(arc).ends() {
            let Some(&h) = local.get(&head) else {
                return false;
            };
            aux.push((local[&tail], h, -w));
        }
    }
    // Every cycle of the auxiliary graph must be strictly positive: the
    // graph is conservative and its zero reduced-weight subgraph acyclic.
    let Ok(graph) = DistanceGraph::new(cert.nodes.len(), aux) else {
        return false;
    };
    let Some(potential) = stn::stn_consistency(&graph).into_potential() else {
        return false;
    };
    let p = potential.values();
    let tight: Vec<(usize, usize)> = graph
        .arcs()
        .iter()
        .filter(|&&(t, h, w)| w - p[h] + p[t] == 0)
        .map(|&(t, h, _)| (t, h))
        .collect();
    is_acyclic(cert.nodes.len(), &tight)
}

fn is_acyclic(order: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; order];
    let mut out = vec![Vec::new(); order];
    for &(t, h) in arcs {
        indegree[h] += 1;
        out[t].push(h);
    }
    let mut stack: Vec<usize> = (0..order).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for &h in &out[v] {
            indegree[h] -= 1;
            if indegree[h] == 0 {
                stack.push(h);
            }
        }
    }
    removed == order
}

/// Reverses every arc; multi-head and multi-tail hyperarcs swap kind.
pub fn reverse_network(network: &Hytn) -> Hytn {
    Hytn {
        order: network.order,
        arcs: network.arcs.iter().map(Hyperarc::reversed).collect(),
    }
}

/// `T = sum of |w|` over all weights of the network.
pub fn weight_bound(network: &Hytn) -> Result<Weight, ModelError> {
    network
        .arcs
        .iter()
        .flat_map(|a| a.ends.iter())
        .try_fold(0 as Weight, |acc, &(_, w)| acc.checked_add(w.abs()))
        .ok_or(ModelError::WeightOverflow)
}

pub fn classify(network: &Hytn) -> NetworkClass {
    let has = |k| network.arcs.iter().any(|a| a.kind == k);
    match (has(ArcKind::MultiHead), has(ArcKind::MultiTail)) {
        (false, false) => NetworkClass::StandardOnly,
        (true, false) => NetworkClass::MultiHeadOnly,
        (false, true) => NetworkClass::MultiTailOnly,
        (true, true) => NetworkClass::Mixed,
    }
}
