use crate::model::Weight;
use crate::stn::DistanceGraph;

use super::value_iteration::{value_iteration, ProgressMeasure, QueuePolicy};
use super::{MeanPayoffGame, MpgError, Player};

/// A positional strategy: one successor for every node of `player`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy {
    player: Player,
    choice: Vec<Option<usize>>,
}

impl PositionalStrategy {
    /// Checks that `choice` picks an out-neighbour for exactly the nodes of
    /// `player`.
    pub fn new(game: &MeanPayoffGame, player: Player, choice: Vec<Option<usize>>) -> Result<Self, MpgError> {
        if choice.len() != game.node_count() {
            return Err(MpgError::InvalidStrategy(choice.len().min(game.node_count())));
        }
        for (v, c) in choice.iter().enumerate() {
            let ok = match (game.owner(v) == player, c) {
                (true, Some(u)) => game.arc_weight(v, *u).is_some(),
                (false, None) => true,
                _ => false,
            };
            if !ok {
                return Err(MpgError::InvalidStrategy(v));
            }
        }
        Ok(PositionalStrategy { player, choice })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// The successor chosen at `v`, if `v` belongs to the strategy's player.
    pub fn get(&self, v: usize) -> Option<usize> {
        self.choice.get(v).copied().flatten()
    }

    /// `(node, successor)` pairs in node order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice.iter().enumerate().filter_map(|(v, c)| c.map(|u| (v, u)))
    }
}

/// Strategy for Player 1 read off a progress measure: every Player 1 node
/// moves to the successor needing the least energy, ties broken by input
/// order. Fails on a Player 1 node with value ⊤.
pub fn synthesize_player1(game: &MeanPayoffGame, f: &ProgressMeasure) -> Result<PositionalStrategy, MpgError> {
    let mut choice = vec![None; game.node_count()];
    for (v, slot) in choice.iter_mut().enumerate() {
        if game.owner(v) != Player::One {
            continue;
        }
        if f.is_top(v) {
            return Err(MpgError::TopNode(v));
        }
        let best = game
            .successors(v)
            .filter_map(|(u, w)| f.get(u).finite().map(|x| (x.saturating_sub(w).max(0), u)))
            .min_by_key(|&(need, _)| need);
        match best {
            Some((_, u)) => *slot = Some(u),
            None => return Err(MpgError::TopNode(v)),
        }
    }
    Ok(PositionalStrategy { player: Player::One, choice })
}

/// Winning strategy for Player 0 on a game where Player 0 wins from every
/// node.
///
/// Solves the dual game with owners swapped and weights `-n*w - 1`: a
/// simple cycle has negative weight exactly when its rescaled weight is
/// non-negative, so the maximizer's strategy there wins the original game.
/// Fails with [`MpgError::NotWinning`] if some node is won by Player 1.
pub fn synthesize_player0(game: &MeanPayoffGame) -> Result<PositionalStrategy, MpgError> {
    let n = game.node_count() as Weight;
    let owners = game.owners().iter().map(|p| p.opponent()).collect();
    let arcs = game
        .arcs()
        .iter()
        .map(|&(t, h, w)| {
            let scaled = n.checked_mul(w).and_then(|x| x.checked_neg()).and_then(|x| x.checked_sub(1));
            scaled.map(|x| (t, h, x)).ok_or(MpgError::Overflow)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dual = MeanPayoffGame::new_unbounded(owners, arcs)?;
    let sol = value_iteration(&dual, QueuePolicy::Lifo, &[]);
    if let Some(v) = (0..dual.node_count()).find(|&v| sol.measure.is_top(v)) {
        return Err(MpgError::NotWinning(v));
    }
    let strategy = synthesize_player1(&dual, &sol.measure)?;
    Ok(PositionalStrategy {
        player: Player::Zero,
        choice: strategy.choice,
    })
}

/// The solitaire game left when the strategy's player is bound to its
/// choices, as a distance graph.
///
/// # Panics
///
/// Panics if `strategy` was built for a game with a different node count.
pub fn project(game: &MeanPayoffGame, strategy: &PositionalStrategy) -> DistanceGraph {
    assert_eq!(strategy.choice.len(), game.node_count(), "strategy built for another game");
    let arcs = game
        .arcs()
        .iter()
        .copied()
        .filter(|&(t, h, _)| game.owner(t) != strategy.player || strategy.choice[t] == Some(h));
    DistanceGraph::new(game.node_count(), arcs).expect("game arcs form a valid distance graph")
}
