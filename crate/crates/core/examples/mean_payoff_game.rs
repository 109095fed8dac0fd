//! Solves a small mean payoff game directly and cross-checks it against
//! exhaustive enumeration.

use hytn::mpg::{
    brute_force_values, synthesize_player0, synthesize_player1, value_iteration, MeanPayoffGame, Player,
    QueuePolicy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use Player::{One, Zero};
    let game = MeanPayoffGame::new(
        vec![Zero, One, Zero, One, Zero],
        vec![
            (0, 1, 2),
            (0, 3, -1),
            (1, 0, -3),
            (1, 2, 1),
            (2, 1, 0),
            (3, 4, -2),
            (4, 3, 1),
            (4, 0, 4),
        ],
    )?;

    let solution = value_iteration(&game, QueuePolicy::Lifo, &[]);
    for (v, e) in solution.measure.iter().enumerate() {
        println!("f({v}) = {e:?}");
    }
    println!("W0 = {:?}, W1 = {:?}", solution.w0(), solution.w1());

    let values = brute_force_values(&game)?;
    println!("mean payoff values: {}", values.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "));

    // Each winning region is closed under the opponent's moves, so the
    // strategies can be built on the induced subgames.
    let w0 = solution.w0();
    let mut keep = vec![false; game.node_count()];
    w0.iter().for_each(|&v| keep[v] = true);
    let (sub0, map0) = game.induced(&keep)?;
    let s0 = synthesize_player0(&sub0)?;
    println!("player 0 on W0: {:?}", s0.iter().map(|(u, v)| (map0[u], map0[v])).collect::<Vec<_>>());

    let keep: Vec<bool> = keep.iter().map(|k| !k).collect();
    let (sub1, map1) = game.induced(&keep)?;
    let f1 = value_iteration(&sub1, QueuePolicy::Lifo, &[]).measure;
    let s1 = synthesize_player1(&sub1, &f1)?;
    println!("player 1 on W1: {:?}", s1.iter().map(|(u, v)| (map1[u], map1[v])).collect::<Vec<_>>());
    Ok(())
}
