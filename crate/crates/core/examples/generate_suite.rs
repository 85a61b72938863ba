//! Phase 1: generate a seed suite of bounded, rate-limited trajectories.

use qubo_testgen::seed;
use qubo_testgen::trajectory::{generate_suite, SignalSpec};

fn main() -> qubo_testgen::Result<()> {
    // Accelerator pedal: 10 s at 100 Hz, position in [0,1], slew <= 2 /s.
    let spec = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 10.0, 0.01)?;
    let mut rng = seed::rng(42, "suite", 0);
    let suite = generate_suite(&spec, 5, 10, &mut rng)?;

    for case in &suite.cases {
        let v = &case.input.values;
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let max_step = v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        println!(
            "{}: {} samples, range [{min:.3}, {max:.3}], max step {max_step:.5} (limit {:.5})",
            case.id,
            v.len(),
            spec.max_step()
        );
    }
    Ok(())
}
