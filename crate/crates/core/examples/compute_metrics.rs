//! Score every data point of a suite with effectiveness and diversity
//! metrics, comparing a faulty implementation against the reference engine.

use qubo_testgen::metrics::collect_metrics;
use qubo_testgen::seed;
use qubo_testgen::sut::{apply_fault, simulate, FaultOperator, FaultSpec, ParamTarget, PlantModel};
use qubo_testgen::trajectory::{generate_suite, SignalSpec, Trajectory};

fn main() -> qubo_testgen::Result<()> {
    let spec = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 5.0, 0.01)?;
    let mut rng = seed::rng(7, "suite", 0);
    let suite = generate_suite(&spec, 4, 8, &mut rng)?;

    let reference = PlantModel::engine();
    // The implementation injects 4% too much fuel (0.2 mL at full pedal).
    let implementation = apply_fault(
        &reference,
        &FaultSpec {
            id: "gain-slip".into(),
            operator: FaultOperator::ArithmeticReplacement {
                param: ParamTarget::Gain,
                scale: 1.04,
            },
        },
    )?;

    let expected: Vec<Trajectory> = suite
        .cases
        .iter()
        .map(|c| simulate(&reference, c))
        .collect::<qubo_testgen::Result<_>>()?;
    let observed: Vec<Trajectory> = suite
        .cases
        .iter()
        .map(|c| simulate(&implementation, c))
        .collect::<qubo_testgen::Result<_>>()?;

    let out_spec = reference.output_spec(&spec)?;
    let m = collect_metrics(&suite, &observed, &expected, 0, 50, &out_spec)?;
    // Print every 50th row of the first case's metric table.
    for (i, line) in m.to_table().lines().enumerate() {
        if i == 0 || (i - 1) % 50 == 0 {
            println!("{line}");
        }
    }
    Ok(())
}
