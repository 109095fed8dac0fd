//! Consistency checking, scheduling and negative-cycle extraction for
//! multi-head (or multi-tail) networks through mean payoff games.

use std::borrow::Cow;

use thiserror::Error;

use crate::model::{
    reverse_network, ArcId, ArcKind, Hyperarc, Hytn, NegativeCycleCert, NetworkClass, Schedule, TimepointId, Weight,
};
use crate::mpg::{
    project, synthesize_player0, synthesize_player1, value_iteration, GameSolution, MeanPayoffGame, MpgError, Player,
    QueuePolicy, SolveStats,
};
use crate::stn::{bellman_ford, ShortestPaths};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("network mixes multi-head and multi-tail hyperarcs; deciding its consistency is NP-complete and not supported")]
    MixedNetwork,
    #[error("arc {0} is multi-tail; reverse the network first")]
    MultiTailArc(ArcId),
    #[error("timepoint {0} is the tail of no hyperarc")]
    SinkTimepoint(TimepointId),
    #[error("network is inconsistent")]
    Inconsistent(Box<NegativeCycleCert>),
    #[error("network is consistent")]
    Consistent,
    #[error(transparent)]
    Game(#[from] MpgError),
}

/// Which game node stands for a timepoint or a hyperarc.
///
/// Timepoint `v` is Player 0 node `v`; hyperarc `a` is Player 1 node
/// `n + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionMap {
    timepoints: usize,
    arcs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameNode {
    Timepoint(TimepointId),
    Arc(ArcId),
}

impl ReductionMap {
    pub fn timepoint_count(&self) -> usize {
        self.timepoints
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.timepoints + self.arcs
    }

    pub fn timepoint_node(&self, v: TimepointId) -> usize {
        v.0
    }

    pub fn arc_node(&self, a: ArcId) -> usize {
        self.timepoints + a.0
    }

    /// Panics if `node` is not a node of the reduced game.
    pub fn node(&self, node: usize) -> GameNode {
        assert!(node < self.node_count(), "node {node} outside the reduced game");
        if node < self.timepoints {
            GameNode::Timepoint(TimepointId(node))
        } else {
            GameNode::Arc(ArcId(node - self.timepoints))
        }
    }
}

/// The game `G_H`: timepoints belong to Player 0, hyperarcs to Player 1.
/// Every hyperarc `A` contributes `(t_A, A, 0)` and `(A, h, w_A(h))` for
/// each head `h`.
///
/// Requires a network without multi-tail arcs in which every timepoint
/// tails some arc.
pub fn hytn_to_mpg(network: &Hytn) -> Result<(MeanPayoffGame, ReductionMap), SolverError> {
    let map = ReductionMap {
        timepoints: network.order(),
        arcs: network.arcs().len(),
    };
    let mut owners = vec![Player::Zero; map.timepoints];
    owners.resize(map.node_count(), Player::One);
    let mut tails = vec![false; map.timepoints];
    let mut arcs = Vec::with_capacity(map.arcs + network.size());
    for (i, arc) in network.arcs().iter().enumerate() {
        if arc.kind() == ArcKind::MultiTail {
            return Err(SolverError::MultiTailArc(ArcId(i)));
        }
        let node = map.arc_node(ArcId(i));
        tails[arc.pivot().0] = true;
        arcs.push((arc.pivot().0, node, 0));
        arcs.extend(arc.ends().iter().map(|&(h, w)| (node, h.0, w)));
    }
    if let Some(v) = tails.iter().position(|&t| !t) {
        return Err(SolverError::SinkTimepoint(TimepointId(v)));
    }
    Ok((MeanPayoffGame::new(owners, arcs)?, map))
}

/// The network `H_G` whose consistency is equivalent to Player 1 winning
/// `game` from every node: a Player 1 node becomes a multi-head arc over its
/// successors, a Player 0 arc a standard arc.
pub fn mpg_to_hytn(game: &MeanPayoffGame) -> Hytn {
    let mut arcs = Vec::new();
    for u in 0..game.node_count() {
        match game.owner(u) {
            Player::One => {
                let heads: Vec<_> = game.successors(u).collect();
                arcs.push(Hyperarc::multi_head(u, &heads));
            }
            Player::Zero => arcs.extend(game.successors(u).map(|(v, w)| Hyperarc::standard(u, v, w))),
        }
    }
    Hytn::new(game.node_count(), arcs).expect("a valid game yields a valid network")
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Consistent(Schedule),
    Inconsistent(NegativeCycleCert),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent(_))
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

/// Solver configuration. The free functions of this module use the default.
#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub policy: QueuePolicy,
    /// Shrink certificates to the part reachable from one node.
    pub minimize_certificates: bool,
}

impl Solver {
    pub fn new(policy: QueuePolicy) -> Self {
        Solver {
            policy,
            minimize_certificates: false,
        }
    }

    pub fn minimize_certificates(mut self, yes: bool) -> Self {
        self.minimize_certificates = yes;
        self
    }

    /// Decides consistency. With [`QueuePolicy::LifoEarlyStop`] the run stops
    /// at the first timepoint found to be lost.
    pub fn check_consistency(&self, network: &Hytn) -> Result<(bool, SolveStats), SolverError> {
        let prepared = Prepared::new(network)?;
        let (game, map) = hytn_to_mpg(&prepared.core)?;
        let watch: Vec<usize> = (0..map.timepoint_count()).collect();
        let sol = value_iteration(&game, self.policy, &watch);
        let consistent = !sol.stats.early_stopped && (0..game.node_count()).all(|v| !sol.measure.is_top(v));
        Ok((consistent, sol.stats))
    }

    /// A schedule read off the least progress measure.
    pub fn compute_schedule(&self, network: &Hytn) -> Result<(Schedule, SolveStats), SolverError> {
        let run = self.full_run(network)?;
        match run.schedule() {
            Some(s) => Ok((s, run.solution.stats)),
            None => Err(SolverError::Inconsistent(Box::new(run.certificate(self.minimize_certificates)?))),
        }
    }

    /// A schedule obtained from Player 1's strategy: potentials of the
    /// projected game computed by Bellman-Ford.
    pub fn compute_schedule_via_projection(&self, network: &Hytn) -> Result<(Schedule, SolveStats), SolverError> {
        let run = self.full_run(network)?;
        if !run.consistent() {
            return Err(SolverError::Inconsistent(Box::new(run.certificate(self.minimize_certificates)?)));
        }
        let strategy = synthesize_player1(&run.game, &run.solution.measure)?;
        let graph = project(&run.game, &strategy);
        let source = graph.order();
        let graph = graph.with_virtual_source(0..run.prepared.core.order());
        let potential = match bellman_ford(&graph, source) {
            Ok(ShortestPaths::Feasible(p)) => p,
            _ => unreachable!("projection on a winning strategy is conservative"),
        };
        let core = &potential.values()[..run.prepared.core.order()];
        Ok((run.prepared.extend_schedule(core), run.solution.stats))
    }

    /// A negative cycle built from Player 0's winning strategy on its
    /// winning region.
    pub fn compute_negative_cycle(&self, network: &Hytn) -> Result<(NegativeCycleCert, SolveStats), SolverError> {
        let run = self.full_run(network)?;
        if run.consistent() {
            return Err(SolverError::Consistent);
        }
        Ok((run.certificate(self.minimize_certificates)?, run.solution.stats))
    }

    /// Schedule or certificate, whichever exists.
    pub fn solve(&self, network: &Hytn) -> Result<Solution, SolverError> {
        let run = self.full_run(network)?;
        let verdict = match run.schedule() {
            Some(s) => Verdict::Consistent(s),
            None => Verdict::Inconsistent(run.certificate(self.minimize_certificates)?),
        };
        Ok(Solution {
            verdict,
            stats: run.solution.stats,
        })
    }

    fn full_run<'a>(&self, network: &'a Hytn) -> Result<FullRun<'a>, SolverError> {
        let prepared = Prepared::new(network)?;
        let (game, map) = hytn_to_mpg(&prepared.core)?;
        let solution = value_iteration(&game, self.policy.to_completion(), &[]);
        Ok(FullRun {
            prepared,
            game,
            map,
            solution,
        })
    }
}

pub fn check_consistency(network: &Hytn) -> Result<(bool, SolveStats), SolverError> {
    Solver::default().check_consistency(network)
}

pub fn compute_schedule(network: &Hytn) -> Result<(Schedule, SolveStats), SolverError> {
    Solver::default().compute_schedule(network)
}

pub fn compute_schedule_via_projection(network: &Hytn) -> Result<(Schedule, SolveStats), SolverError> {
    Solver::default().compute_schedule_via_projection(network)
}

pub fn compute_negative_cycle(network: &Hytn) -> Result<(NegativeCycleCert, SolveStats), SolverError> {
    Solver::default().compute_negative_cycle(network)
}

pub fn solve(network: &Hytn) -> Result<Solution, SolverError> {
    Solver::default().solve(network)
}

struct FullRun<'a> {
    prepared: Prepared<'a>,
    game: MeanPayoffGame,
    map: ReductionMap,
    solution: GameSolution,
}

impl FullRun<'_> {
    fn consistent(&self) -> bool {
        (0..self.game.node_count()).all(|v| !self.solution.measure.is_top(v))
    }

    fn schedule(&self) -> Option<Schedule> {
        if !self.consistent() {
            return None;
        }
        let core: Vec<Weight> = (0..self.prepared.core.order())
            .map(|v| self.solution.measure.get(v).finite().expect("consistent run"))
            .collect();
        Some(self.prepared.extend_schedule(&core))
    }

    fn certificate(&self, minimize: bool) -> Result<NegativeCycleCert, SolverError> {
        let keep: Vec<bool> = (0..self.game.node_count()).map(|v| self.solution.measure.is_top(v)).collect();
        let (sub, nodes) = self.game.induced(&keep)?;
        let strategy = synthesize_player0(&sub)?;
        // Arc chosen by every losing timepoint, in core ids.
        let mut chosen: Vec<Option<usize>> = vec![None; self.prepared.core.order()];
        for (local, next) in strategy.iter() {
            let GameNode::Timepoint(v) = self.map.node(nodes[local]) else {
                continue;
            };
            let GameNode::Arc(a) = self.map.node(nodes[next]) else {
                unreachable!("timepoints only lead to hyperarcs");
            };
            chosen[v.0] = Some(a.0);
        }
        let mut members: Vec<usize> = (0..chosen.len()).filter(|&v| chosen[v].is_some()).collect();
        if minimize {
            members = self.closure(members[0], &chosen);
        }
        Ok(NegativeCycleCert::new(
            members.iter().map(|&v| TimepointId(self.prepared.timepoints[v])),
            members.iter().map(|&v| ArcId(self.prepared.arcs[chosen[v].unwrap()])),
        ))
    }

    /// Timepoints reachable from `start` by following chosen arcs to all
    /// their heads.
    fn closure(&self, start: usize, chosen: &[Option<usize>]) -> Vec<usize> {
        let mut seen = vec![false; chosen.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let arc = &self.prepared.core.arcs()[chosen[v].unwrap()];
            for &(h, _) in arc.ends() {
                if !seen[h.0] {
                    seen[h.0] = true;
                    stack.push(h.0);
                }
            }
        }
        (0..chosen.len()).filter(|&v| seen[v]).collect()
    }
}

/// A network brought into the shape the reduction needs: multi-tail
/// networks reversed, then timepoints tailing no arc stripped repeatedly.
struct Prepared<'a> {
    reversed: bool,
    work: Cow<'a, Hytn>,
    core: Hytn,
    /// Original id of each core timepoint and arc.
    timepoints: Vec<usize>,
    arcs: Vec<usize>,
    /// Stripped timepoints in removal order, each with the arcs that lost it
    /// as a head at that moment.
    stripped: Vec<(usize, Vec<usize>)>,
}

impl<'a> Prepared<'a> {
    fn new(network: &'a Hytn) -> Result<Self, SolverError> {
        let (reversed, work) = match network.classify() {
            NetworkClass::Mixed => return Err(SolverError::MixedNetwork),
            NetworkClass::MultiTailOnly => (true, Cow::Owned(reverse_network(network))),
            _ => (false, Cow::Borrowed(network)),
        };
        let n = work.order();
        let arcs = work.arcs();
        let mut alive_arc = vec![true; arcs.len()];
        let mut alive_node = vec![true; n];
        let mut out_count = vec![0usize; n];
        let mut heads_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, arc) in arcs.iter().enumerate() {
            out_count[arc.pivot().0] += 1;
            for &(h, _) in arc.ends() {
                heads_of[h.0].push(i);
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| out_count[v] == 0).collect();
        let mut stripped = Vec::new();
        while let Some(v) = stack.pop() {
            alive_node[v] = false;
            let mut killed = Vec::new();
            for &a in &heads_of[v] {
                if !alive_arc[a] {
                    continue;
                }
                alive_arc[a] = false;
                killed.push(a);
                let t = arcs[a].pivot().0;
                out_count[t] -= 1;
                if out_count[t] == 0 {
                    stack.push(t);
                }
            }
            stripped.push((v, killed));
        }

        let timepoints: Vec<usize> = (0..n).filter(|&v| alive_node[v]).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in timepoints.iter().enumerate() {
            local[v] = i;
        }
        let kept: Vec<usize> = (0..arcs.len()).filter(|&a| alive_arc[a]).collect();
        let core_arcs = kept
            .iter()
            .map(|&a| {
                let arc = &arcs[a];
                let ends: Vec<(usize, Weight)> = arc.ends().iter().map(|&(h, w)| (local[h.0], w)).collect();
                Hyperarc::multi_head(local[arc.pivot().0], &ends)
            })
            .collect();
        let core = Hytn::new(timepoints.len(), core_arcs).expect("renumbering keeps the network valid");
        Ok(Prepared {
            reversed,
            work,
            core,
            timepoints,
            arcs: kept,
            stripped,
        })
    }

    /// Extends a schedule of the core to the whole network.
    fn extend_schedule(&self, core: &[Weight]) -> Schedule {
        let arcs = self.work.arcs();
        let mut s = vec![0; self.work.order()];
        for (i, &v) in self.timepoints.iter().enumerate() {
            s[v] = core[i];
        }
        for (v, killed) in self.stripped.iter().rev() {
            s[*v] = killed
                .iter()
                .map(|&a| {
                    let arc = &arcs[a];
                    let w = arc.ends().iter().find(|e| e.0 .0 == *v).unwrap().1;
                    s[arc.pivot().0] + w
                })
                .min()
                .unwrap_or(0);
        }
        let s = Schedule::new(s);
        if self.reversed {
            s.negated()
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_negative_cycle, verify_schedule, HytnBuilder};

    fn two_cycle(w: Weight) -> Hytn {
        HytnBuilder::new(2).standard(0, 1, w).standard(1, 0, 0).build().unwrap()
    }

    #[test]
    fn reduction_sizes() {
        let h = HytnBuilder::new(3)
            .multi_head(0, &[(1, 2), (2, -1)])
            .standard(1, 0, 0)
            .standard(2, 1, 4)
            .build()
            .unwrap();
        let (g, map) = hytn_to_mpg(&h).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.arc_count(), 3 + 4);
        assert_eq!(map.node(4), GameNode::Arc(ArcId(1)));
        assert_eq!(map.arc_node(ArcId(2)), 5);
        assert_eq!(g.owner(map.timepoint_node(TimepointId(2))), Player::Zero);
    }

    #[test]
    fn reduction_preconditions() {
        let h = HytnBuilder::new(3).standard(0, 1, 0).standard(1, 0, 0).build().unwrap();
        assert_eq!(hytn_to_mpg(&h).unwrap_err(), SolverError::SinkTimepoint(TimepointId(2)));
        let h = HytnBuilder::new(3).multi_tail(0, &[(1, 0), (2, 0)]).build().unwrap();
        assert_eq!(hytn_to_mpg(&h).unwrap_err(), SolverError::MultiTailArc(ArcId(0)));
        let h = HytnBuilder::new(3)
            .multi_tail(0, &[(1, 0), (2, 0)])
            .multi_head(0, &[(1, 0), (2, 0)])
            .build()
            .unwrap();
        assert_eq!(check_consistency(&h).unwrap_err(), SolverError::MixedNetwork);
    }

    #[test]
    fn two_arc_cycles() {
        let (ok, _) = check_consistency(&two_cycle(0)).unwrap();
        assert!(ok);
        let (ok, _) = check_consistency(&two_cycle(-1)).unwrap();
        assert!(!ok);
        let (cert, _) = compute_negative_cycle(&two_cycle(-1)).unwrap();
        assert_eq!(cert.nodes(), &[TimepointId(0), TimepointId(1)]);
        assert_eq!(cert.arcs(), &[ArcId(0), ArcId(1)]);
        assert!(verify_negative_cycle(&two_cycle(-1), &cert));
        assert_eq!(compute_negative_cycle(&two_cycle(3)).unwrap_err(), SolverError::Consistent);
        assert!(matches!(compute_schedule(&two_cycle(-1)), Err(SolverError::Inconsistent(_))));
    }

    #[test]
    fn single_timepoint() {
        let h = Hytn::empty(1);
        let (s, stats) = compute_schedule(&h).unwrap();
        assert_eq!(s.values(), &[0]);
        assert_eq!(stats.lift_count, 0);
    }

    #[test]
    fn sinks_are_rescheduled() {
        // 2 and 3 are sinks behind a consistent cycle; 3 only becomes one
        // after 2 is stripped.
        let h = HytnBuilder::new(4)
            .standard(0, 1, -2)
            .standard(1, 0, 5)
            .multi_head(0, &[(2, -7), (3, 4)])
            .standard(3, 2, -1)
            .build()
            .unwrap();
        let prepared = Prepared::new(&h).unwrap();
        assert_eq!(prepared.core.order(), 2);
        assert_eq!(prepared.stripped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 3]);
        for solver in [Solver::new(QueuePolicy::Fifo), Solver::default()] {
            let (s, _) = solver.compute_schedule(&h).unwrap();
            assert!(verify_schedule(&h, &s).unwrap(), "{s:?}");
            let (s, _) = solver.compute_schedule_via_projection(&h).unwrap();
            assert!(verify_schedule(&h, &s).unwrap(), "{s:?}");
        }
    }

    #[test]
    fn multi_tail_networks_are_reversed() {
        // s(0) <= max(s(1) + 1, s(2) - 3) with s(1) = s(0) + 2 pinned by a
        // standard pair, so the max is satisfied by the first tail.
        let h = HytnBuilder::new(3)
            .multi_tail(0, &[(1, 1), (2, -3)])
            .standard(0, 1, 2)
            .standard(1, 0, -2)
            .standard(0, 2, 0)
            .build()
            .unwrap();
        assert_eq!(h.classify(), NetworkClass::MultiTailOnly);
        let sol = solve(&h).unwrap();
        let Verdict::Consistent(s) = sol.verdict else { panic!("expected consistent") };
        assert!(verify_schedule(&h, &s).unwrap());

        let bad = HytnBuilder::new(3)
            .multi_tail(0, &[(1, -1), (2, -1)])
            .standard(0, 1, 0)
            .standard(0, 2, 0)
            .build()
            .unwrap();
        let sol = solve(&bad).unwrap();
        let Verdict::Inconsistent(cert) = sol.verdict else { panic!("expected inconsistent") };
        assert!(verify_negative_cycle(&bad, &cert));
    }

    #[test]
    fn certificate_through_a_losing_escape() {
        // 0 may go to 1 or 2; both close negative cycles.
        let h = HytnBuilder::new(3)
            .multi_head(0, &[(1, 0), (2, 0)])
            .standard(1, 0, -1)
            .standard(2, 1, 0)
            .build()
            .unwrap();
        let (cert, _) = compute_negative_cycle(&h).unwrap();
        assert_eq!(cert.nodes().len(), 3);
        assert!(verify_negative_cycle(&h, &cert));
        let (small, _) = Solver::default().minimize_certificates(true).compute_negative_cycle(&h).unwrap();
        assert!(verify_negative_cycle(&h, &small));
        assert!(small.nodes().len() <= 3);
    }

    #[test]
    fn mpg_round_trip() {
        use crate::mpg::MeanPayoffGame;
        let g = MeanPayoffGame::new(vec![Player::One, Player::Zero], vec![(0, 1, 0), (1, 0, 0)]).unwrap();
        let h = mpg_to_hytn(&g);
        assert_eq!(h.arcs().len(), 2);
        assert!(h.arcs().iter().all(|a| a.kind() == ArcKind::Standard));
        assert!(check_consistency(&h).unwrap().0);
        let g = MeanPayoffGame::new(vec![Player::One, Player::Zero], vec![(0, 1, -1), (1, 0, 0)]).unwrap();
        assert!(!check_consistency(&mpg_to_hytn(&g)).unwrap().0);
    }
}
