//! Checks the bundled workflow network and prints a schedule from each
//! extraction method.

use hytn::fixtures::{workflow, workflow_schedule};
use hytn::io::serialize_schedule;
use hytn::model::verify_schedule;
use hytn::solver::{compute_schedule, compute_schedule_via_projection, check_consistency};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let network = workflow();
    println!(
        "{} timepoints, {} hyperarcs, size {}, class {}",
        network.order(),
        network.arcs().len(),
        network.size(),
        network.classify().as_str()
    );

    let (consistent, stats) = check_consistency(&network)?;
    println!("consistent: {consistent} ({} lifts)", stats.lift_count);

    let reference = workflow_schedule();
    println!("reference schedule verifies: {}", verify_schedule(&network, &reference)?);

    let (pm, _) = compute_schedule(&network)?;
    println!("from the progress measure:\n{}", serialize_schedule(&pm));
    let (proj, _) = compute_schedule_via_projection(&network)?;
    println!("from the projection:\n{}", serialize_schedule(&proj));
    assert!(verify_schedule(&network, &pm)? && verify_schedule(&network, &proj)?);
    Ok(())
}
