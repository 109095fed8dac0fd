//! Mean payoff games and their pseudo-polynomial solver.
//!
//! Player 0 wins a play when the mean weight of its cycle is negative,
//! Player 1 when it is non-negative. [`value_iteration`] computes the least
//! energy progress measure; nodes where it stays finite are won by Player 1.

mod brute;
mod game;
mod strategy;
mod value_iteration;

use thiserror::Error;

use crate::model::Weight;

pub use brute::{brute_force_values, BRUTE_FORCE_LIMIT};
pub use game::{MeanPayoffGame, Player};
pub use strategy::{project, synthesize_player0, synthesize_player1, PositionalStrategy};
pub use value_iteration::{
    value_iteration, value_iteration_with, Energy, GameSolution, IterationOptions, ParsePolicyError, ProgressMeasure,
    QueuePolicy, SolveStats,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpgError {
    #[error("node {node} out of range for a game with {order} nodes")]
    NodeOutOfRange { node: usize, order: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("parallel arcs from {0} to {1}")]
    ParallelArc(usize, usize),
    #[error("node {0} has no outgoing arc")]
    DeadEnd(usize),
    #[error("weight {0} exceeds the supported range")]
    WeightOutOfRange(Weight),
    #[error("node {0} has infinite energy")]
    TopNode(usize),
    #[error("node {0} is not won by player 0")]
    NotWinning(usize),
    #[error("strategy is not valid for this game at node {0}")]
    InvalidStrategy(usize),
    #[error("rescaled weights overflow")]
    Overflow,
    #[error("{0} strategy combinations exceed the brute-force limit")]
    TooLarge(u128),
}
