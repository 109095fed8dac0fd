//! Encodes a 3-CNF formula as a mixed network and decides it.

use hytn::gen::{encode_3sat, sat_oracle, CnfFormula};
use hytn::io::write_hytn;
use hytn::solver::check_consistency;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (x1 | x2 | !x3) & (!x1 | x3 | x2) & (!x2 | !x3 | x1)
    let phi = CnfFormula::new(3, vec![[1, 2, -3], [-1, 3, 2], [-2, -3, 1]])?;
    let network = encode_3sat(&phi);
    println!("class {}, {} timepoints", network.classify().as_str(), network.order());
    print!("{}", write_hytn(&network));

    let satisfiable = (0..1u64 << phi.vars()).any(|a| phi.evaluate(a));
    println!("truth table: {satisfiable}");
    println!("gadget consistent: {}", sat_oracle(&network, &phi)?);

    // The game pipeline only handles one kind of hyperarc.
    match check_consistency(&network) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("solver: {e}"),
    }
    Ok(())
}
