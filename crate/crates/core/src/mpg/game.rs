use std::collections::HashSet;
use std::fmt;

use crate::model::{Weight, MAX_ABS_WEIGHT};

use super::MpgError;

/// The two players. `Zero` wins a play whose cycle has negative mean
/// weight; `One` wins otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Player::Zero => 0,
            Player::One => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A mean payoff game: a weighted digraph whose nodes are owned by one of
/// the two players. Every node has at least one outgoing arc; there are no
/// self-loops and no parallel arcs.
///
/// Adjacency is kept in compressed form in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanPayoffGame {
    owners: Vec<Player>,
    arcs: Vec<(usize, usize, Weight)>,
    out_offsets: Vec<usize>,
    out_arcs: Vec<usize>,
    in_offsets: Vec<usize>,
    in_arcs: Vec<usize>,
    max_weight: Weight,
}

impl MeanPayoffGame {
    pub fn new(owners: Vec<Player>, arcs: Vec<(usize, usize, Weight)>) -> Result<Self, MpgError> {
        if let Some(&(_, _, w)) = arcs.iter().find(|a| a.2.abs() > MAX_ABS_WEIGHT) {
            return Err(MpgError::WeightOutOfRange(w));
        }
        Self::new_unbounded(owners, arcs)
    }

    /// Same validation as [`new`](Self::new) minus the weight range, for
    /// internally rescaled games.
    pub(crate) fn new_unbounded(owners: Vec<Player>, arcs: Vec<(usize, usize, Weight)>) -> Result<Self, MpgError> {
        let n = owners.len();
        let mut pairs = HashSet::with_capacity(arcs.len());
        let mut out_degree = vec![0usize; n];
        let mut in_degree = vec![0usize; n];
        for &(t, h, _) in &arcs {
            for v in [t, h] {
                if v >= n {
                    return Err(MpgError::NodeOutOfRange { node: v, order: n });
                }
            }
            if t == h {
                return Err(MpgError::SelfLoop(t));
            }
            if !pairs.insert((t, h)) {
                return Err(MpgError::ParallelArc(t, h));
            }
            out_degree[t] += 1;
            in_degree[h] += 1;
        }
        if let Some(v) = out_degree.iter().position(|&d| d == 0) {
            return Err(MpgError::DeadEnd(v));
        }
        let (out_offsets, out_arcs) = bucket(&out_degree, arcs.iter().map(|a| a.0));
        let (in_offsets, in_arcs) = bucket(&in_degree, arcs.iter().map(|a| a.1));
        let max_weight = arcs.iter().map(|a| a.2.abs()).max().unwrap_or(0);
        Ok(MeanPayoffGame {
            owners,
            arcs,
            out_offsets,
            out_arcs,
            in_offsets,
            in_arcs,
            max_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.owners.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owners[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owners
    }

    pub fn arcs(&self) -> &[(usize, usize, Weight)] {
        &self.arcs
    }

    /// `W`, the largest absolute arc weight.
    pub fn max_weight(&self) -> Weight {
        self.max_weight
    }

    /// Outgoing arcs of `v` as `(head, weight)`, in input order.
    pub fn successors(&self, v: usize) -> impl Iterator<Item = (usize, Weight)> + '_ {
        self.out_arcs[self.out_offsets[v]..self.out_offsets[v + 1]]
            .iter()
            .map(move |&a| (self.arcs[a].1, self.arcs[a].2))
    }

    /// Incoming arcs of `v` as `(tail, weight)`, in input order.
    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = (usize, Weight)> + '_ {
        self.in_arcs[self.in_offsets[v]..self.in_offsets[v + 1]]
            .iter()
            .map(move |&a| (self.arcs[a].0, self.arcs[a].2))
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn arc_weight(&self, tail: usize, head: usize) -> Option<Weight> {
        self.successors(tail).find(|&(h, _)| h == head).map(|(_, w)| w)
    }

    /// The subgame induced by the nodes with `keep[v]` set. Returns the game
    /// and the original index of every kept node. Fails if a kept node
    /// loses all its successors.
    pub fn induced(&self, keep: &[bool]) -> Result<(MeanPayoffGame, Vec<usize>), MpgError> {
        let kept: Vec<usize> = (0..self.node_count()).filter(|&v| keep[v]).collect();
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &v) in kept.iter().enumerate() {
            local[v] = i;
        }
        let owners = kept.iter().map(|&v| self.owners[v]).collect();
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(t, h, _)| keep[t] && keep[h])
            .map(|&(t, h, w)| (local[t], local[h], w))
            .collect();
        let game = Self::new_unbounded(owners, arcs).map_err(|e| match e {
            MpgError::DeadEnd(v) => MpgError::DeadEnd(kept[v]),
            e => e,
        })?;
        Ok((game, kept))
    }
}

fn bucket(degree: &[usize], keys: impl Iterator<Item = usize>) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = Vec::with_capacity(degree.len() + 1);
    offsets.push(0);
    for &d in degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut fill = offsets.clone();
    let mut items = vec![0; *offsets.last().unwrap()];
    for (i, k) in keys.enumerate() {
        items[fill[k]] = i;
        fill[k] += 1;
    }
    (offsets, items)
}
