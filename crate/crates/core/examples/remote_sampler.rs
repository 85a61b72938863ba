//! Submit a QUBO to an annealer endpoint over the wire protocol. A mock
//! server stands in for the real backend; energies are re-validated
//! locally on receipt.

use std::time::Duration;

use qubo_testgen::qubo::build_metric_objective;
use qubo_testgen::solvers::remote::{submit_remote, MockBackend, MockFaults, MockServer};
use qubo_testgen::solvers::AnnealParams;

fn main() -> qubo_testgen::Result<()> {
    let server = MockServer::spawn(
        MockBackend::Sa(AnnealParams {
            num_reads: 50,
            sweeps: 200,
            seed: 4,
            ..Default::default()
        }),
        MockFaults::default(),
    )?;
    println!("mock annealer listening on {}", server.addr());

    let q = build_metric_objective(&[0.31, 0.32], 0.63)?;
    let set = submit_remote(&q, 50, server.addr(), Duration::from_secs(5))?;
    println!(
        "received {} samples, access time {:.6} s",
        set.samples.len(),
        set.solver_time
    );
    for s in &set.samples {
        println!(
            "  {:?}  energy {:.4}  seen {}x",
            s.selection.bits, s.energy, s.occurrences
        );
    }
    Ok(())
}
