//! Lift counts on the slow family grow linearly with the weight bound.

use hytn::gen::gen_slow_family;
use hytn::mpg::QueuePolicy;
use hytn::solver::Solver;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>10} {:>10}", "W", "lifo", "fifo");
    for k in 8..=14 {
        let w = 1i64 << k;
        let network = gen_slow_family(w)?;
        let lifo = Solver::new(QueuePolicy::Lifo).check_consistency(&network)?.1;
        let fifo = Solver::new(QueuePolicy::Fifo).check_consistency(&network)?.1;
        println!("{w:>8} {:>10} {:>10}", lifo.lift_count, fifo.lift_count);
    }
    Ok(())
}
