//! Build a tiny effectiveness-targeting QUBO and solve it exactly and with
//! simulated annealing.

use qubo_testgen::qubo::{build_metric_objective, energy, Selection};
use qubo_testgen::solvers::{solve_exact, solve_sa, AnnealParams};

fn main() -> qubo_testgen::Result<()> {
    // Two data points with effectiveness 0.31 and 0.32; the target sum is
    // their total, so selecting both is optimal.
    let q = build_metric_objective(&[0.31, 0.32], 0.63)?;

    println!("all assignments:");
    for bits in [[0u8, 0], [1, 0], [0, 1], [1, 1]] {
        let e = energy(&q, &Selection::new(bits.to_vec()))?;
        println!("  x = {bits:?}  energy = {e:.4}");
    }

    let exact = solve_exact(&q)?;
    println!(
        "exact minimum: {:?} at {:.4}",
        exact.best().selection.bits,
        exact.best().energy
    );

    let sa = solve_sa(
        &q,
        &AnnealParams {
            num_reads: 20,
            sweeps: 100,
            seed: 1,
            ..Default::default()
        },
    )?;
    println!(
        "sa best:       {:?} at {:.4} ({} distinct states seen)",
        sa.best().selection.bits,
        sa.best().energy,
        sa.samples.len()
    );
    Ok(())
}
