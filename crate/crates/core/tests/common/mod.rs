//! Oracles shared by the integration suites.

#![allow(dead_code)]

use hytn::model::{Hyperarc, Hytn, Schedule, Weight};
use hytn::mpg::{Energy, MeanPayoffGame, Player, ProgressMeasure};
use hytn::stn::DistanceGraph;
use rand::Rng;

/// Checks the two progress-measure inequalities directly: a Player 0 node
/// dominates `f(u) - w` for every successor, a Player 1 node for some
/// successor, and a ⊤ successor forces ⊤ where it cannot be avoided.
pub fn inequalities_hold(game: &MeanPayoffGame, f: &ProgressMeasure) -> bool {
    if f.len() != game.node_count() {
        return false;
    }
    (0..game.node_count()).all(|v| {
        let Energy::Finite(fv) = f.get(v) else { return true };
        if fv < 0 {
            return false;
        }
        let mut ok = game.successors(v).map(|(u, w)| match f.get(u) {
            Energy::Top => false,
            Energy::Finite(fu) => fv >= fu - w,
        });
        match game.owner(v) {
            Player::Zero => ok.all(|b| b),
            Player::One => ok.any(|b| b),
        }
    })
}

/// Distance graph of a network with standard arcs only.
pub fn stn_graph(network: &Hytn) -> DistanceGraph {
    let arcs = network.arcs().iter().map(|a| {
        let (h, w) = a.ends()[0];
        (a.pivot().index(), h.index(), w)
    });
    DistanceGraph::new(network.order(), arcs).unwrap()
}

/// Schedule satisfaction computed straight from the constraint semantics.
pub fn satisfied(network: &Hytn, s: &[Weight]) -> bool {
    network.arcs().iter().all(|a| arc_satisfied(a, s))
}

fn arc_satisfied(a: &Hyperarc, s: &[Weight]) -> bool {
    use hytn::model::ArcKind::*;
    let p = s[a.pivot().index()];
    let ends = a.ends().iter().map(|&(v, w)| (s[v.index()], w));
    match a.kind() {
        Standard | MultiHead => ends.map(|(sv, w)| sv - w).min().is_some_and(|m| p >= m),
        MultiTail => ends.map(|(sv, w)| sv + w).max().is_some_and(|m| p <= m),
    }
}

pub fn random_schedule(n: usize, spread: Weight, rng: &mut impl Rng) -> Schedule {
    Schedule::new((0..n).map(|_| rng.random_range(-spread..=spread)).collect())
}
