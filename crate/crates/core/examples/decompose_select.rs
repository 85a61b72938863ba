//! Phase 2 end to end: split a long trajectory into sub-problems sized for
//! a qubit budget, solve each, and merge into one final selection.

use qubo_testgen::decompose::{decompose_and_select, plan_subproblems, DecompositionConfig};
use qubo_testgen::metrics::collect_metrics;
use qubo_testgen::qubo::Weights;
use qubo_testgen::seed;
use qubo_testgen::solvers::{AnnealParams, SaSampler};
use qubo_testgen::sut::{apply_fault, simulate, FaultOperator, FaultSpec, ParamTarget, PlantModel};
use qubo_testgen::trajectory::{generate_suite, SignalSpec, Trajectory};

fn main() -> qubo_testgen::Result<()> {
    let spec = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 5.0, 0.01)?;
    let mut rng = seed::rng(3, "suite", 0);
    let suite = generate_suite(&spec, 3, 8, &mut rng)?;

    let reference = PlantModel::engine();
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
    let metric = collect_metrics(&suite, &observed, &expected, 0, 50, &out_spec)?;

    let cfg = DecompositionConfig {
        m: 4,
        n: 16,
        coverage: 0.5,
        seed: 0,
    };
    let plans = plan_subproblems(metric.len(), &cfg)?;
    for w in 0..cfg.m {
        let rounds: Vec<_> = plans.iter().filter(|p| p.slice_index == w).collect();
        println!(
            "window {} = [{}, {}): {} sampling rounds of {} points",
            w,
            rounds[0].window.0,
            rounds[0].window.1,
            rounds.len(),
            rounds[0].sampled_indices.len()
        );
    }

    let sampler = SaSampler {
        params: AnnealParams {
            num_reads: 20,
            sweeps: 200,
            seed: 5,
            ..Default::default()
        },
    };
    let selection = decompose_and_select(&metric, &Weights::default(), spec.sample_period, &cfg, &sampler)?;
    println!(
        "selected {} data points: {:?}",
        selection.count(),
        selection.selected_indices()
    );
    Ok(())
}
