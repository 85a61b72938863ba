//! Phase 3: mutate a selected data point (biased by its effectiveness
//! correlation) and re-embed it smoothly into the trajectory.

use qubo_testgen::metrics::MetricSeries;
use qubo_testgen::mutate::{apply_mutations, plan_mutations};
use qubo_testgen::qubo::Selection;
use qubo_testgen::seed;
use qubo_testgen::trajectory::{generate_suite, SignalSpec};

fn main() -> qubo_testgen::Result<()> {
    let spec = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 5.0, 0.01)?;
    let mut rng = seed::rng(11, "suite", 0);
    let suite = generate_suite(&spec, 1, 8, &mut rng)?;
    let case = &suite.cases[0];
    let n = case.input.len();

    // Synthetic metrics: effectiveness tracks the signal, so the
    // correlation is strongly positive and the mutation pushes upward.
    let metrics = MetricSeries {
        case_id: case.id.clone(),
        effectiveness: case.input.values.iter().map(|v| 0.8 * v).collect(),
        input_diversity: vec![0.0; n],
        output_diversity: vec![0.0; n],
    };

    let selection = Selection::from_indices(n, &[n / 2]);
    let plan = plan_mutations(case, &selection, &metrics, 50, 100)?;
    for p in &plan.points {
        println!(
            "index {}: value {:.3}, correlation {:+.3} -> mutated value {:.3}",
            p.index,
            case.input.values[p.index],
            p.correlation,
            p.mutated_value
        );
    }

    let mutated = apply_mutations(case, &plan)?;
    let k = n / 2;
    println!("around the mutation (every 25th sample):");
    for i in (k.saturating_sub(125)..=(k + 125).min(n - 1)).step_by(25) {
        println!(
            "  t = {:>5.2}  before {:.3}  after {:.3}",
            i as f64 * spec.sample_period,
            case.input.values[i],
            mutated.input.values[i]
        );
    }
    for note in &mutated.provenance {
        println!("feasibility note: {note}");
    }
    Ok(())
}
