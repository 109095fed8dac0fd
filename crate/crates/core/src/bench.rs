//! Batch runs over generated instances, reported as CSV rows.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::gen::{generate, sat_oracle, Family, GenError, GenSpec};
use crate::model::{verify_negative_cycle, verify_schedule, Hytn, Weight};
use crate::mpg::QueuePolicy;
use crate::solver::{Solver, SolverError, Verdict};

pub const CSV_HEADER: [&str; 10] = ["id", "n", "m", "W", "class", "verdict", "lifts", "policy", "ms", "seed"];

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "HYTN_THREADS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("instance {id}: {source}")]
    Solve { id: usize, source: SolverError },
    #[error("instance {id}: witness failed verification")]
    Witness { id: usize },
    #[error("invalid {THREADS_VAR}: {0}")]
    Threads(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Instance `i` is generated from this spec with stream `i`. For the
    /// slow family instance `i` uses weight `(i + 1) * max_weight`.
    pub spec: GenSpec,
    pub count: usize,
    pub policy: QueuePolicy,
    /// Run every instance under all four policies.
    pub compare_policies: bool,
    /// Produce and verify a schedule or certificate instead of only
    /// deciding consistency.
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub id: usize,
    pub n: usize,
    pub m: usize,
    pub max_weight: Weight,
    pub class: &'static str,
    pub consistent: bool,
    pub lifts: u64,
    /// `None` for instances decided without value iteration.
    pub policy: Option<QueuePolicy>,
    pub ms: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn verdict(&self) -> &'static str {
        if self.consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    }

    fn record(&self) -> [String; 10] {
        [
            self.id.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.max_weight.to_string(),
            self.class.to_string(),
            self.verdict().to_string(),
            self.lifts.to_string(),
            self.policy.map_or("-", QueuePolicy::as_str).to_string(),
            format!("{:.3}", self.ms),
            self.seed.to_string(),
        ]
    }
}

/// Worker count from [`THREADS_VAR`], if set.
pub fn thread_cap() -> Result<Option<usize>, BenchError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(BenchError::Threads(v)),
        },
    }
}

/// Runs the batch on a worker pool. Rows come back in instance order, and
/// for each instance in [`QueuePolicy::ALL`] order when comparing policies.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| BenchError::Threads(e.to_string()))?;
    let per_instance: Vec<Result<Vec<BenchRow>, BenchError>> =
        pool.install(|| (0..config.count).into_par_iter().map(|i| run_instance(config, i)).collect());
    let mut rows = Vec::new();
    for r in per_instance {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn instance_spec(config: &BenchConfig, id: usize) -> GenSpec {
    let mut spec = config.spec.clone().with_stream(id as u64);
    if spec.family == Family::SlowFamily {
        spec.max_weight = config.spec.max_weight.saturating_mul(id as Weight + 1);
    }
    spec
}

fn run_instance(config: &BenchConfig, id: usize) -> Result<Vec<BenchRow>, BenchError> {
    let spec = instance_spec(config, id);
    let (network, formula) = generate(&spec)?;
    let base = BenchRow {
        id,
        n: network.order(),
        m: network.size(),
        max_weight: network.max_abs_weight(),
        class: network.classify().as_str(),
        consistent: false,
        lifts: 0,
        policy: None,
        ms: 0.0,
        seed: spec.seed,
    };
    if let Some(phi) = formula {
        let start = Instant::now();
        let consistent = sat_oracle(&network, &phi)?;
        return Ok(vec![BenchRow {
            consistent,
            ms: start.elapsed().as_secs_f64() * 1e3,
            ..base
        }]);
    }
    let policies: Vec<QueuePolicy> = if config.compare_policies {
        QueuePolicy::ALL.to_vec()
    } else {
        vec![config.policy]
    };
    policies
        .into_iter()
        .map(|policy| {
            let start = Instant::now();
            let (consistent, lifts) = decide(&network, policy, config.witness).map_err(|e| match e {
                DecideError::Solve(source) => BenchError::Solve { id, source },
                DecideError::Witness => BenchError::Witness { id },
            })?;
            Ok(BenchRow {
                consistent,
                lifts,
                policy: Some(policy),
                ms: start.elapsed().as_secs_f64() * 1e3,
                ..base.clone()
            })
        })
        .collect()
}

enum DecideError {
    Solve(SolverError),
    Witness,
}

fn decide(network: &Hytn, policy: QueuePolicy, witness: bool) -> Result<(bool, u64), DecideError> {
    let solver = Solver::new(policy);
    if !witness {
        let (ok, stats) = solver.check_consistency(network).map_err(DecideError::Solve)?;
        return Ok((ok, stats.lift_count));
    }
    let solution = solver.solve(network).map_err(DecideError::Solve)?;
    let verified = match &solution.verdict {
        Verdict::Consistent(s) => verify_schedule(network, s).unwrap_or(false),
        Verdict::Inconsistent(c) => verify_negative_cycle(network, c),
    };
    if !verified {
        return Err(DecideError::Witness);
    }
    Ok((solution.verdict.is_consistent(), solution.stats.lift_count))
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(spec: GenSpec, count: usize) -> BenchConfig {
        BenchConfig {
            spec,
            count,
            policy: QueuePolicy::LifoEarlyStop,
            compare_policies: false,
            witness: false,
        }
    }

    #[test]
    fn slow_rows_grow_with_weight() {
        let rows = run_bench(&config(GenSpec::slow(100), 4)).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.max_weight).collect::<Vec<_>>(), vec![100, 200, 300, 400]);
        assert!(rows.windows(2).all(|w| w[0].lifts < w[1].lifts));
        assert!(rows.iter().all(|r| r.consistent));
    }

    #[test]
    fn csv_layout_is_stable() {
        let mut cfg = config(GenSpec::random(30, 20, 0.1, 3, 5), 3);
        cfg.compare_policies = true;
        let rows = run_bench(&cfg).unwrap();
        assert_eq!(rows.len(), 12);
        for chunk in rows.chunks(4) {
            assert!(chunk.iter().all(|r| r.consistent == chunk[0].consistent && r.id == chunk[0].id));
        }
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("id,n,m,W,class,verdict,lifts,policy,ms,seed\n0,30,"));
        assert_eq!(text.lines().count(), 13);
    }

    #[test]
    fn sat_rows_use_the_oracle() {
        let rows = run_bench(&config(GenSpec::sat3(3, 4, 9), 2)).unwrap();
        assert!(rows.iter().all(|r| r.class == "mixed" && r.policy.is_none() && r.n == 1 + 6 + 4));
    }
}
