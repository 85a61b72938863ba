//! Run a small end-to-end campaign: generate, select (SA vs random),
//! mutate, and measure fault detection over a seeded corpus.

use qubo_testgen::decompose::DecompositionConfig;
use qubo_testgen::experiment::{run_campaign, summary_table, CampaignConfig, Heuristic};
use qubo_testgen::solvers::AnnealParams;
use qubo_testgen::trajectory::SignalSpec;

fn main() -> qubo_testgen::Result<()> {
    let signal = SignalSpec::new("pedal", 0.0, 1.0, 2.0, 2.0, 0.01)?;
    let mut cfg = CampaignConfig::new(signal);
    // Shrunk from the paper-scale defaults so the example finishes fast.
    cfg.suite_size = 4;
    cfg.control_points = 6;
    cfg.repeats = 3;
    cfg.heuristics = vec![Heuristic::SimulatedAnnealing, Heuristic::Random];
    cfg.decomposition = DecompositionConfig {
        m: 4,
        n: 16,
        coverage: 0.5,
        seed: 0,
    };
    cfg.anneal = AnnealParams {
        num_reads: 10,
        sweeps: 100,
        ..Default::default()
    };
    cfg.faults_per_type = 3;
    cfg.random_draws = 200;
    cfg.window_radius = 20;
    cfg.smoothing_radius = 30;
    cfg.suite_cap = 8;

    let report = run_campaign(&cfg)?;
    print!("{}", summary_table(&report));
    for t in &report.timings {
        println!(
            "timing {} r{}: total {:.2}s (metrics {:.2}, solve {:.2}, mutate {:.2}, embed {:.2})",
            t.heuristic, t.repeat, t.total, t.metrics, t.solve, t.mutate, t.embed_simulation
        );
    }
    Ok(())
}
