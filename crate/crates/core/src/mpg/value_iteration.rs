use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::model::Weight;
use crate::stn::{stn_consistency, DistanceGraph, StnOutcome};

use super::{MeanPayoffGame, Player};

/// Worklist discipline for the value iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QueuePolicy {
    Fifo,
    Lifo,
    /// LIFO that halts as soon as a watched node reaches ⊤.
    #[default]
    LifoEarlyStop,
    /// Largest current energy first.
    MaxPriority,
}

impl QueuePolicy {
    pub const ALL: [QueuePolicy; 4] = [
        QueuePolicy::Fifo,
        QueuePolicy::Lifo,
        QueuePolicy::LifoEarlyStop,
        QueuePolicy::MaxPriority,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QueuePolicy::Fifo => "fifo",
            QueuePolicy::Lifo => "lifo",
            QueuePolicy::LifoEarlyStop => "lifo-stop",
            QueuePolicy::MaxPriority => "max-priority",
        }
    }

    /// The same policy without early stopping.
    pub fn to_completion(self) -> QueuePolicy {
        match self {
            QueuePolicy::LifoEarlyStop => QueuePolicy::Lifo,
            p => p,
        }
    }
}

impl fmt::Display for QueuePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown queue policy `{0}` (expected fifo, lifo, lifo-stop or max-priority)")]
pub struct ParsePolicyError(String);

impl FromStr for QueuePolicy {
    type Err = ParsePolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(QueuePolicy::Fifo),
            "lifo" => Ok(QueuePolicy::Lifo),
            "lifo-stop" | "lifo+stop" | "lifo-early-stop" => Ok(QueuePolicy::LifoEarlyStop),
            "max-priority" | "maxpriority" | "priority" => Ok(QueuePolicy::MaxPriority),
            _ => Err(ParsePolicyError(s.to_string())),
        }
    }
}

/// Energy level of a node: a finite amount or ⊤.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Energy {
    Finite(Weight),
    Top,
}

impl Energy {
    pub fn is_top(self) -> bool {
        self == Energy::Top
    }

    pub fn finite(self) -> Option<Weight> {
        match self {
            Energy::Finite(x) => Some(x),
            Energy::Top => None,
        }
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Energy::Finite(x) => write!(f, "{x}"),
            Energy::Top => f.write_str("T"),
        }
    }
}

const TOP: Weight = Weight::MAX;

/// A function from game nodes to `{0, …, cutoff} ∪ {⊤}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressMeasure {
    values: Vec<Weight>,
    cutoff: Weight,
}

impl ProgressMeasure {
    /// Builds a measure from explicit values. Finite values above `cutoff`
    /// are stored as ⊤.
    pub fn new(values: impl IntoIterator<Item = Energy>, cutoff: Weight) -> Self {
        let values = values
            .into_iter()
            .map(|e| match e {
                Energy::Finite(x) if x <= cutoff => x.max(0),
                _ => TOP,
            })
            .collect();
        ProgressMeasure { values, cutoff }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> Energy {
        match self.values[v] {
            TOP => Energy::Top,
            x => Energy::Finite(x),
        }
    }

    pub fn is_top(&self, v: usize) -> bool {
        self.values[v] == TOP
    }

    pub fn cutoff(&self) -> Weight {
        self.cutoff
    }

    pub fn iter(&self) -> impl Iterator<Item = Energy> + '_ {
        (0..self.len()).map(|v| self.get(v))
    }

    /// Whether `v` satisfies its progress-measure inequality: against every
    /// successor for Player 0, against some successor for Player 1.
    pub fn is_stable_at(&self, game: &MeanPayoffGame, v: usize) -> bool {
        self.is_top(v) || self.values[v] >= lift_target(game, &self.values, v, self.cutoff)
    }

    /// Whether every node satisfies its inequality.
    pub fn is_fixpoint(&self, game: &MeanPayoffGame) -> bool {
        self.len() == game.node_count() && (0..self.len()).all(|v| self.is_stable_at(game, v))
    }

    /// Finite values; ⊤ becomes `None`.
    pub fn to_options(&self) -> Vec<Option<Weight>> {
        self.iter().map(Energy::finite).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    pub lift_count: u64,
    pub policy: QueuePolicy,
    pub early_stopped: bool,
    pub elapsed: Duration,
}

impl SolveStats {
    /// Adds the lifts and time of another run.
    pub fn absorb(&mut self, other: &SolveStats) {
        self.lift_count += other.lift_count;
        self.elapsed += other.elapsed;
        self.early_stopped |= other.early_stopped;
    }
}

/// Result of [`value_iteration`]. When `stats.early_stopped` is set the
/// measure is not a fixpoint and the winning regions are partial: `w0`
/// holds the nodes already known to be lost by Player 1.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub measure: ProgressMeasure,
    pub stats: SolveStats,
}

impl GameSolution {
    pub fn is_complete(&self) -> bool {
        !self.stats.early_stopped
    }

    /// Nodes won by Player 0 (value ⊤).
    pub fn w0(&self) -> Vec<usize> {
        (0..self.measure.len()).filter(|&v| self.measure.is_top(v)).collect()
    }

    /// Nodes won by Player 1 (finite value).
    pub fn w1(&self) -> Vec<usize> {
        (0..self.measure.len()).filter(|&v| !self.measure.is_top(v)).collect()
    }

    pub fn player1_wins_everywhere(&self) -> bool {
        self.is_complete() && (0..self.measure.len()).all(|v| !self.measure.is_top(v))
    }
}

/// Largest finite value a least progress measure can take. Any finite
/// value is the energy deficit of a path through distinct nodes, so it is
/// bounded by the sum of the worst outgoing weight of every node and by
/// `(n - 1) * W`.
pub(crate) fn cutoff(game: &MeanPayoffGame) -> Weight {
    let n = game.node_count() as i128;
    let coarse = (n - 1).max(0) * game.max_weight() as i128;
    let mut fine: i128 = 0;
    for v in 0..game.node_count() {
        let worst = game.successors(v).map(|(_, w)| w).min().unwrap_or(0);
        fine += (-worst).max(0) as i128;
    }
    coarse.min(fine).min((TOP - 1) as i128) as Weight
}

#[inline]
fn need(f_succ: Weight, w: Weight) -> Weight {
    if f_succ == TOP {
        TOP
    } else {
        (f_succ - w).max(0)
    }
}

fn lift_target(game: &MeanPayoffGame, f: &[Weight], v: usize, cutoff: Weight) -> Weight {
    let needs = game.successors(v).map(|(u, w)| need(f[u], w));
    let target = match game.owner(v) {
        Player::Zero => needs.max().unwrap_or(0),
        Player::One => needs.min().unwrap_or(TOP),
    };
    if target > cutoff {
        TOP
    } else {
        target
    }
}

enum Worklist {
    Fifo(VecDeque<usize>),
    Lifo(Vec<usize>),
    Priority(BinaryHeap<(Weight, Reverse<usize>)>),
}

impl Worklist {
    fn new(policy: QueuePolicy) -> Self {
        match policy {
            QueuePolicy::Fifo => Worklist::Fifo(VecDeque::new()),
            QueuePolicy::Lifo | QueuePolicy::LifoEarlyStop => Worklist::Lifo(Vec::new()),
            QueuePolicy::MaxPriority => Worklist::Priority(BinaryHeap::new()),
        }
    }

    fn push(&mut self, v: usize, key: Weight) {
        match self {
            Worklist::Fifo(q) => q.push_back(v),
            Worklist::Lifo(q) => q.push(v),
            Worklist::Priority(q) => q.push((key, Reverse(v))),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Worklist::Fifo(q) => q.pop_front(),
            Worklist::Lifo(q) => q.pop(),
            Worklist::Priority(q) => q.pop().map(|(_, Reverse(v))| v),
        }
    }
}

/// Options of [`value_iteration_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationOptions {
    /// Periodically prove nodes lost for Player 1 from the current lift
    /// witnesses and raise them to ⊤ at once. The result is unchanged; only
    /// the number of lifts differs.
    pub top_detection: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { top_detection: true }
    }
}

/// Computes the least energy progress measure of `game` by repeatedly
/// lifting unstable nodes.
///
/// With [`QueuePolicy::LifoEarlyStop`] and a non-empty `watch` list the run
/// halts as soon as a watched node reaches ⊤; with any other policy, or an
/// empty watch list, it runs to the fixpoint.
pub fn value_iteration(game: &MeanPayoffGame, policy: QueuePolicy, watch: &[usize]) -> GameSolution {
    value_iteration_with(game, policy, watch, IterationOptions::default())
}

pub fn value_iteration_with(
    game: &MeanPayoffGame,
    policy: QueuePolicy,
    watch: &[usize],
    options: IterationOptions,
) -> GameSolution {
    let start = Instant::now();
    let n = game.node_count();
    let mut run = Run {
        game,
        cutoff: cutoff(game),
        f: vec![0; n],
        support: vec![0; n],
        queued: vec![false; n],
        worklist: Worklist::new(policy),
    };
    let mut watched = vec![false; if policy == QueuePolicy::LifoEarlyStop { n } else { 0 }];
    for &v in watch {
        if let Some(slot) = watched.get_mut(v) {
            *slot = true;
        }
    }
    for v in 0..n {
        let stable = match game.owner(v) {
            Player::Zero => game.successors(v).all(|(_, w)| w >= 0),
            Player::One => {
                run.support[v] = game.successors(v).filter(|&(_, w)| w >= 0).count();
                run.support[v] > 0
            }
        };
        if !stable {
            run.queued[v] = true;
            run.worklist.push(v, 0);
        }
    }

    let mut lifts = 0u64;
    let mut early_stopped = false;
    let mut next_check = 2 * (n + game.arc_count()) as u64;
    'outer: while let Some(v) = run.worklist.pop() {
        run.queued[v] = false;
        if run.f[v] == TOP {
            // Raised by top detection while queued.
            continue;
        }
        let new = lift_target(game, &run.f, v, run.cutoff);
        debug_assert!(new > run.f[v], "queued node {v} was stable");
        run.raise(v, new);
        lifts += 1;
        if new == TOP && watched.get(v).copied().unwrap_or(false) {
            early_stopped = true;
            break;
        }
        if options.top_detection && lifts >= next_check {
            for u in proven_lost(game, &run.f) {
                run.raise(u, TOP);
                lifts += 1;
                if watched.get(u).copied().unwrap_or(false) {
                    early_stopped = true;
                    break 'outer;
                }
            }
            next_check = 2 * lifts;
        }
    }

    GameSolution {
        measure: ProgressMeasure {
            values: run.f,
            cutoff: run.cutoff,
        },
        stats: SolveStats {
            lift_count: lifts,
            policy,
            early_stopped,
            elapsed: start.elapsed(),
        },
    }
}

struct Run<'a> {
    game: &'a MeanPayoffGame,
    cutoff: Weight,
    f: Vec<Weight>,
    // For Player 1 nodes: how many successors currently satisfy f(v) >= f(u) - w.
    support: Vec<usize>,
    queued: Vec<bool>,
    worklist: Worklist,
}

impl Run<'_> {
    /// Sets `f(v)` to the larger value `new` and queues the predecessors it
    /// makes unstable.
    fn raise(&mut self, v: usize, new: Weight) {
        let game = self.game;
        let old = self.f[v];
        self.f[v] = new;
        if game.owner(v) == Player::One && new != TOP {
            self.support[v] = game.successors(v).filter(|&(u, w)| new >= need(self.f[u], w)).count();
        }
        for (u, w) in game.predecessors(v) {
            if self.queued[u] || self.f[u] == TOP {
                continue;
            }
            let fu = self.f[u];
            let now_violated = fu < need(new, w);
            let unstable = match game.owner(u) {
                Player::Zero => now_violated,
                Player::One => {
                    if now_violated && fu >= need(old, w) {
                        self.support[u] -= 1;
                    }
                    self.support[u] == 0
                }
            };
            if unstable {
                self.queued[u] = true;
                self.worklist.push(u, fu);
            }
        }
    }
}

/// Finite-valued nodes from which Player 0 provably wins.
///
/// Player 0 is fixed to the successor currently demanding the most energy.
/// In the remaining one-player graph Player 1 wins exactly from the nodes
/// that can reach a cycle of non-negative weight; those are found one cycle
/// at a time (as negative cycles under weights `-N*w - 1`) and discarded
/// together with everything that reaches them. Whatever survives is lost
/// for Player 1 in the real game too, since Player 0 has a strategy keeping
/// every play there.
fn proven_lost(game: &MeanPayoffGame, f: &[Weight]) -> Vec<usize> {
    const MAX_ROUNDS: usize = 16;
    let n = game.node_count();
    let mut alive: Vec<bool> = f.iter().map(|&x| x != TOP).collect();
    // Arcs of the one-player graph, between finite nodes only.
    let mut arcs: Vec<(usize, usize, Weight)> = Vec::new();
    for v in (0..n).filter(|&v| alive[v]) {
        match game.owner(v) {
            Player::Zero => {
                let mut best: Option<(Weight, usize, Weight)> = None;
                for (u, w) in game.successors(v) {
                    let x = need(f[u], w);
                    if best.is_none_or(|b| x > b.0) {
                        best = Some((x, u, w));
                    }
                }
                let (_, u, w) = best.expect("games have no dead ends");
                if alive[u] {
                    arcs.push((v, u, w));
                }
            }
            Player::One => arcs.extend(game.successors(v).filter(|&(u, _)| alive[u]).map(|(u, w)| (v, u, w))),
        }
    }

    for _ in 0..MAX_ROUNDS {
        let nodes: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        if nodes.is_empty() {
            return nodes;
        }
        let mut local = vec![usize::MAX; n];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        arcs.retain(|&(t, h, _)| alive[t] && alive[h]);
        let k = nodes.len() as i128;
        let max_w = arcs.iter().map(|a| a.2.unsigned_abs() as i128).max().unwrap_or(0);
        if k * (k * max_w + 1) >= i64::MAX as i128 / 2 {
            return Vec::new();
        }
        let scaled = arcs.iter().map(|&(t, h, w)| (local[t], local[h], -(k as Weight) * w - 1));
        let graph = DistanceGraph::new(nodes.len(), scaled).expect("one-player graph is simple");
        let outcome = stn_consistency(&graph);
        let StnOutcome::NegativeCycle(cycle) = outcome else {
            return nodes;
        };
        // Discard every node that reaches the cycle.
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for &(t, h, _) in graph.arcs() {
            preds[h].push(t);
        }
        let mut stack: Vec<usize> = cycle.iter().map(|a| a.0).collect();
        for &v in &stack {
            alive[nodes[v]] = false;
        }
        while let Some(v) = stack.pop() {
            for &u in &preds[v] {
                if alive[nodes[u]] {
                    alive[nodes[u]] = false;
                    stack.push(u);
                }
            }
        }
    }
    Vec::new()
}
