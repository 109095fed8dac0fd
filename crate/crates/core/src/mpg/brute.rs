use num_rational::Ratio;

use super::{MeanPayoffGame, MpgError, Player};

/// Largest number of positional strategy pairs [`brute_force_values`]
/// will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Exact game values by enumerating every pair of positional strategies.
///
/// For each start node the value is the max over Player 1 strategies of the
/// min over Player 0 strategies of the mean weight of the cycle the play
/// ends in. The min-max is computed as well and must agree.
pub fn brute_force_values(game: &MeanPayoffGame) -> Result<Vec<Ratio<i64>>, MpgError> {
    let n = game.node_count();
    let succ: Vec<Vec<(usize, i64)>> = (0..n).map(|v| game.successors(v).collect()).collect();
    let zero: Vec<usize> = (0..n).filter(|&v| game.owner(v) == Player::Zero).collect();
    let one: Vec<usize> = (0..n).filter(|&v| game.owner(v) == Player::One).collect();
    let count = |nodes: &[usize]| nodes.iter().map(|&v| succ[v].len() as u128).product::<u128>();
    let total = count(&zero).saturating_mul(count(&one));
    if total > BRUTE_FORCE_LIMIT {
        return Err(MpgError::TooLarge(total));
    }

    let mut choice = vec![0usize; n];
    let mut scratch = Scratch::new(n);
    let mut means = vec![Ratio::from_integer(0); n];

    let mut max_min: Vec<Option<Ratio<i64>>> = vec![None; n];
    for_each_assignment(&one, &succ, &mut choice, &mut |choice| {
        let mut inner: Vec<Option<Ratio<i64>>> = vec![None; n];
        let mut choice = choice.to_vec();
        for_each_assignment(&zero, &succ, &mut choice, &mut |choice| {
            scratch.cycle_means(&succ, choice, &mut means);
            fold(&mut inner, &means, |a, b| a.min(b));
        });
        let inner: Vec<_> = inner.into_iter().map(Option::unwrap).collect();
        fold(&mut max_min, &inner, |a, b| a.max(b));
    });

    let mut min_max: Vec<Option<Ratio<i64>>> = vec![None; n];
    for_each_assignment(&zero, &succ, &mut choice, &mut |choice| {
        let mut inner: Vec<Option<Ratio<i64>>> = vec![None; n];
        let mut choice = choice.to_vec();
        for_each_assignment(&one, &succ, &mut choice, &mut |choice| {
            scratch.cycle_means(&succ, choice, &mut means);
            fold(&mut inner, &means, |a, b| a.max(b));
        });
        let inner: Vec<_> = inner.into_iter().map(Option::unwrap).collect();
        fold(&mut min_max, &inner, |a, b| a.min(b));
    });

    let values: Vec<Ratio<i64>> = max_min.into_iter().map(Option::unwrap).collect();
    let dual: Vec<Ratio<i64>> = min_max.into_iter().map(Option::unwrap).collect();
    assert_eq!(values, dual, "positional determinacy violated");
    Ok(values)
}

fn fold(acc: &mut [Option<Ratio<i64>>], xs: &[Ratio<i64>], pick: impl Fn(Ratio<i64>, Ratio<i64>) -> Ratio<i64>) {
    for (a, &x) in acc.iter_mut().zip(xs) {
        *a = Some(a.map_or(x, |a| pick(a, x)));
    }
}

/// Calls `visit` once per assignment of a successor index to every node of
/// `nodes`, leaving other entries of `choice` untouched.
fn for_each_assignment(
    nodes: &[usize],
    succ: &[Vec<(usize, i64)>],
    choice: &mut [usize],
    visit: &mut dyn FnMut(&[usize]),
) {
    for &v in nodes {
        choice[v] = 0;
    }
    loop {
        visit(choice);
        let mut i = 0;
        loop {
            if i == nodes.len() {
                return;
            }
            let v = nodes[i];
            choice[v] += 1;
            if choice[v] < succ[v].len() {
                break;
            }
            choice[v] = 0;
            i += 1;
        }
    }
}

struct Scratch {
    // Position of a node on the current walk, or usize::MAX.
    position: Vec<usize>,
    walk: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            position: vec![usize::MAX; n],
            walk: Vec::with_capacity(n),
        }
    }

    fn cycle_means(&mut self, succ: &[Vec<(usize, i64)>], choice: &[usize], out: &mut [Ratio<i64>]) {
        for (start, slot) in out.iter_mut().enumerate() {
            self.walk.clear();
            let mut v = start;
            while self.position[v] == usize::MAX {
                self.position[v] = self.walk.len();
                self.walk.push(v);
                v = succ[v][choice[v]].0;
            }
            let cycle = &self.walk[self.position[v]..];
            let weight: i64 = cycle.iter().map(|&u| succ[u][choice[u]].1).sum();
            *slot = Ratio::new(weight, cycle.len() as i64);
            for &u in &self.walk {
                self.position[u] = usize::MAX;
            }
        }
    }
}
