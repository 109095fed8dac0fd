//! An inconsistent network and the negative cycle that proves it.

use hytn::io::serialize_certificate;
use hytn::model::{verify_negative_cycle, HytnBuilder};
use hytn::solver::{solve, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 0 must come at least 5 after one of {1, 2}, and both 1 and 2 at
    // least 3 after 0.
    let network = HytnBuilder::new(3)
        .multi_head(0, &[(1, -5), (2, -5)])
        .standard(1, 0, -3)
        .standard(2, 0, -3)
        .build()?;

    let solution = solve(&network)?;
    match &solution.verdict {
        Verdict::Consistent(s) => println!("consistent: {:?}", s.values()),
        Verdict::Inconsistent(cert) => {
            println!("inconsistent after {} lifts", solution.stats.lift_count);
            print!("{}", serialize_certificate(&network, cert));
            println!("certificate verifies: {}", verify_negative_cycle(&network, cert));
        }
    }
    Ok(())
}
