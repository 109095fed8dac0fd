mod common;

use hytn::gen::{gen_random_game, generate, GenSpec};
use hytn::io::{parse_hytn, serialize_hytn, write_hytn};
use hytn::model::{reverse_network, verify_negative_cycle, verify_schedule, ArcKind, NetworkClass, Schedule};
use hytn::mpg::{
    brute_force_values, project, synthesize_player0, synthesize_player1, value_iteration, MeanPayoffGame,
    QueuePolicy,
};
use hytn::solver::{check_consistency, hytn_to_mpg, solve, Solver, Verdict};
use hytn::stn::{stn_consistency, DistanceGraph};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{inequalities_hold, random_schedule, satisfied, stn_graph};

fn small_game(seed: u64, n: usize, deg: usize, w: i64) -> MeanPayoffGame {
    gen_random_game(n, deg.min(n - 1), w, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn policy() -> impl Strategy<Value = QueuePolicy> {
    prop::sample::select(QueuePolicy::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn value_iteration_matches_enumeration(seed in any::<u64>(), n in 2usize..=7, deg in 1usize..=3, w in 1i64..=10, p in policy()) {
        let game = small_game(seed, n, deg, w);
        let values = brute_force_values(&game).unwrap();
        let sol = value_iteration(&game, p.to_completion(), &[]);
        prop_assert!(inequalities_hold(&game, &sol.measure));
        for (v, val) in values.iter().enumerate() {
            prop_assert_eq!(sol.measure.is_top(v), *val < Ratio::from_integer(0), "node {}", v);
        }
    }

    #[test]
    fn every_policy_reaches_the_same_fixpoint(seed in any::<u64>(), n in 2usize..=40, w in 1i64..=50) {
        let game = small_game(seed, n, 3, w);
        let first = value_iteration(&game, QueuePolicy::Fifo, &[]).measure;
        for p in [QueuePolicy::Lifo, QueuePolicy::MaxPriority] {
            prop_assert_eq!(&value_iteration(&game, p, &[]).measure, &first);
        }
        prop_assert!(inequalities_hold(&game, &first));
    }

    #[test]
    fn solve_returns_exactly_one_witness(seed in any::<u64>(), n in 2usize..=60, w in 1i64..=30, deg in 1usize..=3, reverse in any::<bool>()) {
        let spec = GenSpec::random(n, w, 0.3, deg.min(n - 1), seed);
        let mut network = generate(&spec).unwrap().0;
        if reverse {
            network = reverse_network(&network);
        }
        let sol = solve(&network).unwrap();
        match &sol.verdict {
            Verdict::Consistent(s) => {
                prop_assert!(verify_schedule(&network, s).unwrap());
                prop_assert!(satisfied(&network, s.values()));
            }
            Verdict::Inconsistent(c) => prop_assert!(verify_negative_cycle(&network, c)),
        }
        prop_assert_eq!(check_consistency(&network).unwrap().0, sol.verdict.is_consistent());
        let via_projection = Solver::default().compute_schedule_via_projection(&network);
        prop_assert_eq!(via_projection.is_ok(), sol.verdict.is_consistent());
        if let Ok((s, _)) = via_projection {
            prop_assert!(satisfied(&network, s.values()));
        }
    }

    #[test]
    fn reversal_negates_schedules(seed in any::<u64>(), n in 2usize..=30, spread in 1i64..=40) {
        let network = generate(&GenSpec::random(n, 20, 0.5, 3.min(n - 1), seed)).unwrap().0;
        let reversed = reverse_network(&network);
        prop_assert_eq!(reverse_network(&reversed), network.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..5 {
            let s = random_schedule(n, spread, &mut rng);
            prop_assert_eq!(verify_schedule(&network, &s).unwrap(), verify_schedule(&reversed, &s.negated()).unwrap());
        }
    }

    #[test]
    fn standard_networks_agree_with_bellman_ford(seed in any::<u64>(), n in 2usize..=80, w in 1i64..=40, deg in 1usize..=4) {
        let network = generate(&GenSpec::random(n, w, 0.0, deg.min(n - 1), seed)).unwrap().0;
        prop_assert_eq!(network.classify(), NetworkClass::StandardOnly);
        let expected = stn_consistency(&stn_graph(&network)).is_consistent();
        prop_assert_eq!(check_consistency(&network).unwrap().0, expected);
    }

    #[test]
    fn canonical_text_round_trips(seed in any::<u64>(), n in 2usize..=40, frac in 0.0f64..=1.0, reverse in any::<bool>()) {
        let mut network = generate(&GenSpec::random(n, 99, frac, 3.min(n - 1), seed)).unwrap().0;
        if reverse {
            network = reverse_network(&network);
        }
        let text = serialize_hytn(&network);
        let parsed = parse_hytn(&text).unwrap();
        prop_assert_eq!(serialize_hytn(&parsed), text);
        prop_assert_eq!(parse_hytn(&write_hytn(&network)).unwrap(), network);
    }

    #[test]
    fn synthesized_strategies_are_winning(seed in any::<u64>(), n in 2usize..=12, w in 1i64..=10) {
        let game = small_game(seed, n, 2, w);
        let sol = value_iteration(&game, QueuePolicy::Lifo, &[]);
        let nodes = game.node_count() as i64;
        if sol.player1_wins_everywhere() {
            let s1 = synthesize_player1(&game, &sol.measure).unwrap();
            prop_assert!(stn_consistency(&project(&game, &s1)).is_consistent());
        }
        if sol.w1().is_empty() {
            // Every cycle of the projection must be negative: with weights
            // -((n + 1) w + 1) that means no negative cycle at all.
            let s0 = synthesize_player0(&game).unwrap();
            let g = project(&game, &s0);
            let flipped = DistanceGraph::new(g.order(), g.arcs().iter().map(|&(t, h, w)| (t, h, -((nodes + 1) * w + 1)))).unwrap();
            prop_assert!(stn_consistency(&flipped).is_consistent());
        }
    }

    #[test]
    fn schedules_respect_the_reduction(seed in any::<u64>(), n in 2usize..=40) {
        let network = generate(&GenSpec::random(n, 25, 0.2, 2.min(n - 1), seed)).unwrap().0;
        let (game, map) = hytn_to_mpg(&network).unwrap();
        prop_assert_eq!(game.node_count(), n + network.arcs().len());
        let full = value_iteration(&game, QueuePolicy::Lifo, &[]);
        prop_assert!(inequalities_hold(&game, &full.measure));
        if full.player1_wins_everywhere() {
            let s = Schedule::new((0..n).map(|v| full.measure.get(map.timepoint_node(hytn::model::TimepointId(v))).finite().unwrap()).collect());
            prop_assert!(satisfied(&network, s.values()));
        }
    }
}

#[test]
fn hyperarc_share_is_binomial() {
    for (frac, seed) in [(0.1, 1), (0.25, 2), (0.5, 3), (0.9, 4)] {
        let n = 4000;
        let network = generate(&GenSpec::random(n, 10, frac, 3, seed)).unwrap().0;
        let hyper = network.arcs().iter().filter(|a| a.kind() == ArcKind::MultiHead).count() as f64;
        let mean = n as f64 * frac;
        let sd = (mean * (1.0 - frac)).sqrt();
        assert!((hyper - mean).abs() <= 5.0 * sd, "frac {frac}: {hyper} hyperarcs, expected {mean} +- {sd}");
    }
}
