//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`;
//! instance `i` of a batch uses stream `i` of that generator, so a batch
//! can be produced in any order or in parallel with identical output.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{verify_schedule, Hyperarc, Hytn, Schedule, Weight, MAX_ABS_WEIGHT};
use crate::mpg::{MeanPayoffGame, Player};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("out-degree {out_degree} needs more than {n} nodes")]
    OutDegree { out_degree: usize, n: usize },
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("max weight must be in 1..={MAX_ABS_WEIGHT}, got {0}")]
    MaxWeight(Weight),
    #[error("hyperarc fraction {0} is not in [0, 1]")]
    Fraction(f64),
    #[error("literal {literal} in clause {clause} is outside 1..={vars}")]
    Literal { clause: usize, literal: i32, vars: usize },
    #[error("{0} variables exceed the brute-force limit of 20")]
    TooManyVariables(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RandomGame,
    SlowFamily,
    Sat3,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::RandomGame => "random",
            Family::SlowFamily => "slow",
            Family::Sat3 => "sat3",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Family::RandomGame),
            "slow" => Ok(Family::SlowFamily),
            "sat3" => Ok(Family::Sat3),
            _ => Err(format!("unknown family `{s}` (expected random, slow or sat3)")),
        }
    }
}

/// Parameters of a generated instance.
///
/// `n` is the node count for random networks and the variable count for
/// 3-SAT encodings; the slow family only reads `max_weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub max_weight: Weight,
    pub hyper_fraction: f64,
    pub out_degree: usize,
    /// Clause count for [`Family::Sat3`].
    pub clauses: usize,
    pub seed: u64,
    /// Stream of the seeded generator, usually the instance index.
    pub stream: u64,
}

impl GenSpec {
    pub fn random(n: usize, max_weight: Weight, hyper_fraction: f64, out_degree: usize, seed: u64) -> Self {
        GenSpec {
            family: Family::RandomGame,
            n,
            max_weight,
            hyper_fraction,
            out_degree,
            clauses: 0,
            seed,
            stream: 0,
        }
    }

    pub fn slow(max_weight: Weight) -> Self {
        GenSpec {
            family: Family::SlowFamily,
            n: 6,
            max_weight,
            hyper_fraction: 0.0,
            out_degree: 0,
            clauses: 0,
            seed: 0,
            stream: 0,
        }
    }

    pub fn sat3(vars: usize, clauses: usize, seed: u64) -> Self {
        GenSpec {
            family: Family::Sat3,
            n: vars,
            max_weight: 1,
            hyper_fraction: 0.0,
            out_degree: 3,
            clauses,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Generates the instance described by `spec`. For [`Family::Sat3`] the
/// formula is returned alongside its encoding.
pub fn generate(spec: &GenSpec) -> Result<(Hytn, Option<CnfFormula>), GenError> {
    match spec.family {
        Family::RandomGame => Ok((gen_random(spec)?, None)),
        Family::SlowFamily => Ok((gen_slow_family(spec.max_weight)?, None)),
        Family::Sat3 => {
            let phi = CnfFormula::random(spec.n, spec.clauses, &mut spec.rng())?;
            Ok((encode_3sat(&phi), Some(phi)))
        }
    }
}

/// A random multi-head network. Every node draws `out_degree` distinct
/// successors with weights uniform on `[-W, W]`. With probability
/// `hyper_fraction` its first `k` successors form one multi-head arc, `k`
/// uniform on `2..=out_degree`; all other successors become standard arcs.
pub fn gen_random(spec: &GenSpec) -> Result<Hytn, GenError> {
    let (n, deg, w) = (spec.n, spec.out_degree, spec.max_weight);
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    if deg >= n || deg == 0 {
        return Err(GenError::OutDegree { out_degree: deg, n });
    }
    check_weight(w)?;
    if !(0.0..=1.0).contains(&spec.hyper_fraction) {
        return Err(GenError::Fraction(spec.hyper_fraction));
    }
    let mut rng = spec.rng();
    let mut arcs = Vec::with_capacity(n * deg);
    for v in 0..n {
        let heads: Vec<(usize, Weight)> = sample(&mut rng, n - 1, deg)
            .into_iter()
            .map(|i| (if i >= v { i + 1 } else { i }, rng.random_range(-w..=w)))
            .collect();
        let bundle = if deg >= 2 && rng.random_bool(spec.hyper_fraction) {
            rng.random_range(2..=deg)
        } else {
            0
        };
        if bundle > 0 {
            arcs.push(Hyperarc::multi_head(v, &heads[..bundle]));
        }
        arcs.extend(heads[bundle..].iter().map(|&(h, w)| Hyperarc::standard(v, h, w)));
    }
    Ok(Hytn::new(n, arcs).expect("generated arcs are valid"))
}

fn check_weight(w: Weight) -> Result<(), GenError> {
    if (1..=MAX_ABS_WEIGHT).contains(&w) {
        Ok(())
    } else {
        Err(GenError::MaxWeight(w))
    }
}

/// A random game with `n` nodes, each owned by either player with equal
/// probability and with `out_degree` distinct successors, weights uniform
/// on `[-W, W]`.
pub fn gen_random_game(n: usize, out_degree: usize, max_weight: Weight, rng: &mut impl Rng) -> Result<MeanPayoffGame, GenError> {
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    if out_degree >= n || out_degree == 0 {
        return Err(GenError::OutDegree { out_degree, n });
    }
    check_weight(max_weight)?;
    let owners = (0..n)
        .map(|_| if rng.random_bool(0.5) { Player::One } else { Player::Zero })
        .collect();
    let mut arcs = Vec::with_capacity(n * out_degree);
    for v in 0..n {
        for i in sample(rng, n - 1, out_degree) {
            let u = if i >= v { i + 1 } else { i };
            arcs.push((v, u, rng.random_range(-max_weight..=max_weight)));
        }
    }
    Ok(MeanPayoffGame::new(owners, arcs).expect("generated game is valid"))
}

/// The six-timepoint network on which value iteration needs a number of
/// lifts proportional to `W`. It is consistent, with schedule
/// `(0, 0, 1, 0, -W, -W)`.
pub fn gen_slow_family(w: Weight) -> Result<Hytn, GenError> {
    check_weight(w)?;
    let arcs = vec![
        Hyperarc::multi_head(0, &[(1, 0), (3, 0)]),
        Hyperarc::multi_head(1, &[(2, 0), (3, 0)]),
        Hyperarc::standard(2, 1, -1),
        Hyperarc::standard(3, 4, -w),
        Hyperarc::standard(4, 5, 0),
        Hyperarc::standard(5, 4, 0),
    ];
    Ok(Hytn::new(6, arcs).expect("slow family is valid"))
}

/// A 3-CNF formula over variables `1..=vars`; literal `-i` is the negation
/// of variable `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self, GenError> {
        for (j, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > vars {
                    return Err(GenError::Literal { clause: j, literal: lit, vars });
                }
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    /// `clauses` clauses of three literals drawn uniformly, with replacement.
    pub fn random(vars: usize, clauses: usize, rng: &mut impl Rng) -> Result<Self, GenError> {
        if vars == 0 {
            return Err(GenError::TooFewNodes(0));
        }
        let clauses = (0..clauses)
            .map(|_| {
                [(); 3].map(|_| {
                    let v = rng.random_range(1..=vars as i32);
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
            })
            .collect();
        Ok(CnfFormula { vars, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// Truth value under `assignment`, where bit `i - 1` is variable `i`.
    pub fn evaluate(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let value = assignment >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    }
}

/// Node of the encoding for the reference point `z`.
pub const SAT_ZERO: usize = 0;

/// Node of literal `lit` in [`encode_3sat`]: `x_i` is `2i - 1`, its
/// negation `2i`.
pub fn literal_node(lit: i32) -> usize {
    let i = lit.unsigned_abs() as usize;
    if lit > 0 {
        2 * i - 1
    } else {
        2 * i
    }
}

/// Node of clause `j` (0-based) in the encoding of a formula with `vars`
/// variables.
pub fn clause_node(vars: usize, j: usize) -> usize {
    1 + 2 * vars + j
}

/// The mixed network that is consistent exactly when `phi` is satisfiable.
///
/// Variable gadgets pin `x_i` and its negation to `{0, 1}` with exactly one
/// of them at 1; the clause gadget pins `C_j` to 1 and asks that some
/// literal of the clause reaches it. Repeated literals in a clause are
/// merged.
pub fn encode_3sat(phi: &CnfFormula) -> Hytn {
    let z = SAT_ZERO;
    let mut arcs = Vec::new();
    for i in 1..=phi.vars as i32 {
        let (x, nx) = (literal_node(i), literal_node(-i));
        arcs.push(Hyperarc::standard(z, x, 1));
        arcs.push(Hyperarc::standard(x, z, 0));
        arcs.push(Hyperarc::standard(z, nx, 1));
        arcs.push(Hyperarc::standard(nx, z, 0));
        arcs.push(Hyperarc::multi_tail(z, &[(x, -1), (nx, -1)]));
        arcs.push(Hyperarc::multi_head(z, &[(x, 0), (nx, 0)]));
    }
    for (j, clause) in phi.clauses.iter().enumerate() {
        let c = clause_node(phi.vars, j);
        arcs.push(Hyperarc::standard(z, c, 1));
        arcs.push(Hyperarc::standard(c, z, -1));
        let mut tails: Vec<(usize, Weight)> = clause.iter().map(|&l| (literal_node(l), 0)).collect();
        tails.sort_unstable();
        tails.dedup();
        arcs.push(Hyperarc::multi_tail(c, &tails));
    }
    Hytn::new(1 + 2 * phi.vars + phi.clauses.len(), arcs).expect("gadgets are valid")
}

/// Whether `network = encode_3sat(phi)` has a feasible schedule of the
/// canonical shape: `z = 0`, every clause node at 1, and each literal pair
/// at `(1, 0)` or `(0, 1)`. Tries all `2^n` shapes.
pub fn sat_oracle(network: &Hytn, phi: &CnfFormula) -> Result<bool, GenError> {
    if phi.vars > 20 {
        return Err(GenError::TooManyVariables(phi.vars));
    }
    let mut s = vec![1 as Weight; network.order()];
    s[SAT_ZERO] = 0;
    for assignment in 0u64..1 << phi.vars {
        for i in 1..=phi.vars {
            let value = (assignment >> (i - 1) & 1) as Weight;
            s[literal_node(i as i32)] = value;
            s[literal_node(-(i as i32))] = 1 - value;
        }
        let schedule = Schedule::new(s.clone());
        if verify_schedule(network, &schedule).unwrap_or(false) {
            return Ok(true);
        }
    }
    Ok(false)
}
