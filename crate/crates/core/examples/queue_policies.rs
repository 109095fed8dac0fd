//! Compares the four queue policies on a batch of random instances.
//!
//! Usage: `queue_policies [n] [count]`

use hytn::bench::{run_bench, BenchConfig};
use hytn::gen::GenSpec;
use hytn::mpg::QueuePolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(2000), |a| a.parse())?;
    let count: usize = args.next().map_or(Ok(8), |a| a.parse())?;

    let config = BenchConfig {
        spec: GenSpec::random(n, 1000, 0.1, 3, 42),
        count,
        policy: QueuePolicy::default(),
        compare_policies: true,
        witness: false,
    };
    let rows = run_bench(&config)?;

    for policy in QueuePolicy::ALL {
        let mine: Vec<_> = rows.iter().filter(|r| r.policy == Some(policy)).collect();
        let lifts: u64 = mine.iter().map(|r| r.lifts).sum();
        let ms: f64 = mine.iter().map(|r| r.ms).sum();
        let inconsistent = mine.iter().filter(|r| !r.consistent).count();
        println!(
            "{:<13} total lifts {:>10}  total ms {:>9.1}  inconsistent {}/{}",
            policy.as_str(),
            lifts,
            ms,
            inconsistent,
            mine.len()
        );
    }
    Ok(())
}
