//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use hytn::bench::{run_bench, BenchConfig};
use hytn::cli;
use hytn::fixtures::{workflow, workflow_schedule};
use hytn::gen::{encode_3sat, gen_random_game, gen_slow_family, generate, sat_oracle, CnfFormula, GenSpec};
use hytn::io::serialize_schedule;
use hytn::model::{reverse_network, verify_negative_cycle, verify_schedule, Hytn, NetworkClass, Schedule};
use hytn::mpg::{brute_force_values, value_iteration, QueuePolicy};
use hytn::solver::{hytn_to_mpg, Solver, SolverError, Verdict};
use hytn::stn::stn_consistency;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{inequalities_hold, random_schedule, satisfied, stn_graph};

static FIXPOINT_RUNS: AtomicUsize = AtomicUsize::new(0);
static FIXPOINT_FAILURES: AtomicUsize = AtomicUsize::new(0);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

/// Runs value iteration to completion on the game of `network` and records
/// whether the progress-measure inequalities hold.
fn record_fixpoint(network: &Hytn) {
    let Ok((game, _)) = hytn_to_mpg(network) else { return };
    let sol = value_iteration(&game, QueuePolicy::Lifo, &[]);
    FIXPOINT_RUNS.fetch_add(1, Ordering::Relaxed);
    if !(sol.is_complete() && inequalities_hold(&game, &sol.measure)) {
        FIXPOINT_FAILURES.fetch_add(1, Ordering::Relaxed);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let network = workflow();
    let solver = Solver::default();
    let (consistent, _) = solver.check_consistency(&network).map_err(|e| e.to_string())?;
    ensure(consistent, || "fixture reported inconsistent".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let net = dir.path().join("workflow.hytn");
    let sched = dir.path().join("ref.sched");
    std::fs::write(&net, hytn::fixtures::WORKFLOW_TEXT).map_err(|e| e.to_string())?;
    std::fs::write(&sched, serialize_schedule(&workflow_schedule())).map_err(|e| e.to_string())?;
    let args = ["hytn", "verify", net.to_str().unwrap(), "--schedule", sched.to_str().unwrap()];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(args, &mut out, &mut err);
    ensure(code == 0, || format!("verify --schedule exited {code}: {}", String::from_utf8_lossy(&err)))?;

    let (pm, _) = solver.compute_schedule(&network).map_err(|e| e.to_string())?;
    let (proj, _) = solver.compute_schedule_via_projection(&network).map_err(|e| e.to_string())?;
    for (name, s) in [("progress measure", &pm), ("projection", &proj)] {
        ensure(verify_schedule(&network, s) == Ok(true), || format!("{name} schedule fails"))?;
    }
    record_fixpoint(&network);
    Ok(format!("pm {:?}", pm.values()))
}

fn ac2() -> Outcome {
    let mut params = ChaCha8Rng::seed_from_u64(2);
    let solver = Solver::default();
    let (mut yes, mut no) = (0, 0);
    for i in 0..1000u64 {
        let n = params.random_range(2..=200);
        let w = params.random_range(1..=100);
        let deg = params.random_range(1..=3usize).min(n - 1);
        let mut network = generate(&GenSpec::random(n, w, 0.1, deg, 2).with_stream(i)).map_err(|e| e.to_string())?.0;
        if i % 2 == 1 {
            network = reverse_network(&network);
        }
        let sol = solver.solve(&network).map_err(|e| format!("instance {i}: {e}"))?;
        let schedule_ok = match solver.compute_schedule(&network) {
            Ok((s, _)) => verify_schedule(&network, &s) == Ok(true) && satisfied(&network, s.values()),
            Err(SolverError::Inconsistent(_)) => false,
            Err(e) => return Err(format!("instance {i}: {e}")),
        };
        let cert_ok = match solver.compute_negative_cycle(&network) {
            Ok((c, _)) => verify_negative_cycle(&network, &c),
            Err(SolverError::Consistent) => false,
            Err(e) => return Err(format!("instance {i}: {e}")),
        };
        ensure(schedule_ok != cert_ok, || format!("instance {i}: schedule {schedule_ok}, certificate {cert_ok}"))?;
        ensure(sol.verdict.is_consistent() == schedule_ok, || format!("instance {i}: solve disagrees"))?;
        if schedule_ok {
            yes += 1;
        } else {
            no += 1;
        }
        if i % 2 == 0 {
            record_fixpoint(&network);
        }
    }
    Ok(format!("{yes} consistent, {no} inconsistent, all witnessed"))
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut w0_nodes = 0;
    for i in 0..500 {
        let n = rng.random_range(2..=8);
        let deg = rng.random_range(1..=3usize).min(n - 1);
        let game = gen_random_game(n, deg, rng.random_range(1..=20), &mut rng).map_err(|e| e.to_string())?;
        // Enumeration panics if max-min and min-max ever differ.
        let values = brute_force_values(&game).map_err(|e| format!("game {i}: {e}"))?;
        let sol = value_iteration(&game, QueuePolicy::ALL[i % 4].to_completion(), &[]);
        FIXPOINT_RUNS.fetch_add(1, Ordering::Relaxed);
        if !inequalities_hold(&game, &sol.measure) {
            FIXPOINT_FAILURES.fetch_add(1, Ordering::Relaxed);
        }
        for (v, val) in values.iter().enumerate() {
            let lost = *val < Ratio::from_integer(0);
            ensure(sol.measure.is_top(v) == lost, || format!("game {i} node {v}: value {val}"))?;
            w0_nodes += lost as usize;
        }
    }
    Ok(format!("500 games agree, {w0_nodes} nodes won by player 0"))
}

fn ac4() -> Outcome {
    let mut params = ChaCha8Rng::seed_from_u64(4);
    let solver = Solver::default();
    let mut consistent = 0;
    for i in 0..1000u64 {
        let n = params.random_range(2..=150);
        let deg = params.random_range(1..=4usize).min(n - 1);
        let w = params.random_range(1..=100);
        let network = generate(&GenSpec::random(n, w, 0.0, deg, 4).with_stream(i)).map_err(|e| e.to_string())?.0;
        ensure(network.classify() == NetworkClass::StandardOnly, || format!("instance {i} has hyperarcs"))?;
        let expected = stn_consistency(&stn_graph(&network)).is_consistent();
        let got = solver.check_consistency(&network).map_err(|e| e.to_string())?.0;
        ensure(got == expected, || format!("instance {i}: pipeline {got}, Bellman-Ford {expected}"))?;
        consistent += got as usize;
        if i % 4 == 0 {
            record_fixpoint(&network);
        }
    }
    Ok(format!("1000 agree, {consistent} consistent"))
}

fn ac5() -> Outcome {
    let mut params = ChaCha8Rng::seed_from_u64(5);
    let solver = Solver::default();
    let (mut feasible, mut total) = (0, 0);
    for i in 0..500u64 {
        let n = params.random_range(2..=60);
        let deg = params.random_range(1..=3usize).min(n - 1);
        let network = generate(&GenSpec::random(n, 20, 0.5, deg, 5).with_stream(i)).map_err(|e| e.to_string())?.0;
        let reversed = reverse_network(&network);
        let mut samples: Vec<Schedule> = Vec::new();
        if let Ok((s, _)) = solver.compute_schedule(&network) {
            for _ in 0..4 {
                let v = params.random_range(0..n);
                let mut t = s.values().to_vec();
                t[v] += params.random_range(-3..=3);
                samples.push(Schedule::new(t));
            }
            samples.push(s);
        } else {
            samples.extend((0..5).map(|_| random_schedule(n, 30, &mut params)));
        }
        for s in &samples {
            let a = verify_schedule(&network, s).map_err(|e| e.to_string())?;
            let b = verify_schedule(&reversed, &s.negated()).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("instance {i}: {a} vs {b} for {:?}", s.values()))?;
            feasible += a as usize;
            total += 1;
        }
    }
    Ok(format!("{total} schedules agree, {feasible} feasible"))
}

fn ac6() -> Outcome {
    let weights: Vec<i64> = (8..=16).map(|k| 1 << k).collect();
    let mut report = Vec::new();
    for policy in QueuePolicy::ALL {
        let solver = Solver::new(policy);
        let mut lifts = Vec::new();
        for &w in &weights {
            let network = gen_slow_family(w).map_err(|e| e.to_string())?;
            let (ok, stats) = solver.check_consistency(&network).map_err(|e| e.to_string())?;
            ensure(ok, || format!("slow family W={w} inconsistent"))?;
            lifts.push(stats.lift_count as f64);
        }
        let xs: Vec<f64> = weights.iter().map(|&w| w as f64).collect();
        let (a, b, r2) = linear_fit(&xs, &lifts);
        ensure(r2 >= 0.99, || format!("{policy}: R^2 {r2}"))?;
        for pair in lifts.windows(2) {
            let ratio = pair[1] / pair[0];
            ensure((1.8..=2.2).contains(&ratio), || format!("{policy}: ratio {ratio} in {lifts:?}"))?;
        }
        report.push(format!("{policy} {a:.3}W{b:+.0} R2={r2:.6}"));
    }
    Ok(report.join("; "))
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (a, b, 1.0 - ss_res / ss_tot)
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2] as f64
    } else {
        (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0
    }
}

fn ac7() -> Outcome {
    let config = BenchConfig {
        spec: GenSpec::random(10_000, 1000, 0.1, 3, 7),
        count: 120,
        policy: QueuePolicy::default(),
        compare_policies: true,
        witness: false,
    };
    let rows = run_bench(&config).map_err(|e| e.to_string())?;
    let mut per_policy = vec![Vec::new(); 4];
    let mut inconsistent = 0;
    for chunk in rows.chunks(4) {
        let verdict = chunk[0].consistent;
        ensure(chunk.iter().all(|r| r.consistent == verdict), || format!("instance {}: policies disagree", chunk[0].id))?;
        if !verdict {
            inconsistent += 1;
            for (k, r) in chunk.iter().enumerate() {
                per_policy[k].push(r.lifts);
            }
        }
    }
    ensure(inconsistent >= 100, || format!("only {inconsistent} inconsistent instances"))?;
    let medians: Vec<f64> = per_policy.into_iter().map(median).collect();
    let at = |p: QueuePolicy| medians[QueuePolicy::ALL.iter().position(|&q| q == p).unwrap()];
    let (stop, fifo) = (at(QueuePolicy::LifoEarlyStop), at(QueuePolicy::Fifo));
    ensure(stop <= fifo, || format!("median lifts lifo-stop {stop} > fifo {fifo}"))?;
    for i in 0..10u64 {
        record_fixpoint(&generate(&config.spec.clone().with_stream(i)).map_err(|e| e.to_string())?.0);
    }
    let summary: Vec<String> = QueuePolicy::ALL.iter().zip(&medians).map(|(p, m)| format!("{p}={m}")).collect();
    Ok(format!("{inconsistent} inconsistent, median lifts {}", summary.join(" ")))
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sat = 0;
    for i in 0..200 {
        let vars = rng.random_range(3..=10);
        let clauses = rng.random_range(1..=20);
        let phi = CnfFormula::random(vars, clauses, &mut rng).map_err(|e| e.to_string())?;
        let network = encode_3sat(&phi);
        ensure(network.order() == 1 + 2 * vars + clauses, || {
            format!("formula {i}: {} timepoints for n={vars}, m={clauses}", network.order())
        })?;
        let truth = (0..1u64 << vars).any(|a| phi.evaluate(a));
        let got = sat_oracle(&network, &phi).map_err(|e| e.to_string())?;
        ensure(got == truth, || format!("formula {i}: oracle {got}, truth table {truth}"))?;
        sat += truth as usize;
    }
    Ok(format!("200 formulas agree, {sat} satisfiable"))
}

fn ac9() -> Outcome {
    let network = generate(&GenSpec::random(100_000, 1000, 0.1, 3, 9)).map_err(|e| e.to_string())?.0;
    let start = Instant::now();
    let sol = Solver::default().solve(&network).map_err(|e| e.to_string())?;
    let verified = match &sol.verdict {
        Verdict::Consistent(s) => verify_schedule(&network, s) == Ok(true),
        Verdict::Inconsistent(c) => verify_negative_cycle(&network, c),
    };
    ensure(verified, || "witness failed verification".into())?;
    let kind = if sol.verdict.is_consistent() { "schedule" } else { "negative cycle" };
    Ok(format!("{kind} verified in {:.2?}, {} lifts", start.elapsed(), sol.stats.lift_count))
}

fn ac10() -> Outcome {
    let runs = FIXPOINT_RUNS.load(Ordering::Relaxed);
    let failures = FIXPOINT_FAILURES.load(Ordering::Relaxed);
    ensure(runs > 0, || "no runs recorded".into())?;
    ensure(failures == 0, || format!("{failures} of {runs} runs violate the inequalities"))?;
    Ok(format!("{runs} completed runs satisfy both inequalities"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 fixture fidelity", ac1, Some(Duration::from_secs(1))),
        ("AC2 dichotomy", ac2, Some(Duration::from_secs(60))),
        ("AC3 oracle equivalence", ac3, Some(Duration::from_secs(60))),
        ("AC4 STN degeneration", ac4, None),
        ("AC5 inter-reducibility", ac5, None),
        ("AC6 linear slow family", ac6, Some(Duration::from_secs(120))),
        ("AC7 queue policies", ac7, Some(Duration::from_secs(600))),
        ("AC8 3-SAT gadget", ac8, None),
        ("AC9 scale smoke test", ac9, Some(Duration::from_secs(300))),
        ("AC10 fixpoint soundness", ac10, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
