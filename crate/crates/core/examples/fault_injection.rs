//! Build a seeded fault corpus for the engine model and check which
//! variants a single test case catches under the epsilon oracle.

use qubo_testgen::sut::{apply_fault, conformance, generate_fault_corpus, simulate, PlantModel};
use qubo_testgen::trajectory::{fit_trajectory, SignalSpec, TestCase};

fn main() -> qubo_testgen::Result<()> {
    let spec = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 5.0, 0.01)?;
    // A ramp up to full pedal and back down.
    let input = fit_trajectory(&[(0.0, 0.0), (2.5, 1.0), (5.0, 0.1)], &spec)?;
    let case = TestCase::new("ramp", input);

    let reference = PlantModel::engine();
    let expected = simulate(&reference, &case)?;
    let corpus = generate_fault_corpus(&reference, 2, spec.n_samples(), 9)?;

    let epsilon = 0.1;
    let mut caught = 0;
    for fault in &corpus {
        let variant = apply_fault(&reference, fault)?;
        let observed = simulate(&variant, &case)?;
        let verdict = conformance(&observed, &expected, epsilon)?;
        if !verdict.pass {
            caught += 1;
        }
        println!(
            "{:<10} max distance {:.4}  {}",
            fault.id,
            verdict.max_distance,
            if verdict.pass { "pass (missed)" } else { "FAIL (detected)" }
        );
    }
    println!("detected {caught}/{} variants", corpus.len());
    Ok(())
}
