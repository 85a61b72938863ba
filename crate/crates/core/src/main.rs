//! Thin CLI over the library: one subcommand per pipeline stage plus the
//! full campaign and the qubit-growth study.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use qubo_testgen::decompose::{decompose_and_select, DecompositionConfig};
use qubo_testgen::embed::{embed_study, embed_study_table};
use qubo_testgen::error::{Error, Result};
use qubo_testgen::experiment::{run_campaign, write_report, CampaignConfig};
use qubo_testgen::metrics::{collect_metrics, MetricSeries};
use qubo_testgen::mutate::{apply_mutations, plan_mutations};
use qubo_testgen::qubo::{build_selection_qubo, Selection, Weights};
use qubo_testgen::seed;
use qubo_testgen::solvers::remote::RemoteSampler;
use qubo_testgen::solvers::{
    AnnealParams, EvoSampler, ExactSampler, QuboSampler, RandomSampler, SaSampler,
};
use qubo_testgen::sut::{apply_fault, simulate, FaultOperator, FaultSpec, ParamTarget, PlantModel};
use qubo_testgen::trajectory::{generate_suite, SignalSpec, TestSuite, Trajectory};

#[derive(Parser)]
#[command(name = "qtg", about = "QUBO-guided test case generation for CPS models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seed test suite from a signal spec.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 50)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        control_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute per-case adequacy metrics against a reference model.
    Metrics {
        #[arg(long)]
        suite: PathBuf,
        /// "engine" or "tracker:<tau>,<gain>".
        #[arg(long, default_value = "engine")]
        model: String,
        /// Gain scale of the implementation model the metrics compare
        /// against.
        #[arg(long, default_value_t = 1.04)]
        implementation_gain_scale: f64,
        #[arg(long, default_value_t = 50)]
        window_radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Identify data points by minimizing the selection QUBO per case.
    Select {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, value_parser = ["exact", "sa", "evo", "random", "remote"])]
        heuristic: String,
        /// Sub-problem count for decomposed solving.
        #[arg(long, default_value_t = 8)]
        m: usize,
        /// Data points per sub-problem.
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        coverage: f64,
        /// JSON weights file; defaults used when omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        sample_period: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// host:port, required for the remote heuristic.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mutate the selected data points of each case.
    Mutate {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        selection: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value_t = 50)]
        window_radius: usize,
        #[arg(long, default_value_t = 100)]
        smoothing_radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full three-phase campaign from a config file.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Physical-qubit growth study over a list of problem sizes.
    EmbedStudy {
        /// Comma-separated sizes; items may be ranges like "5..40" or
        /// "5..40:5" (inclusive, optional step).
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_vec_pretty(value)?)?;
    Ok(())
}

fn parse_model(s: &str) -> Result<PlantModel> {
    if s == "engine" {
        return Ok(PlantModel::engine());
    }
    if let Some(params) = s.strip_prefix("tracker:") {
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() == 2 {
            let tau: f64 = parts[0].trim().parse().map_err(|_| bad_model(s))?;
            let gain: f64 = parts[1].trim().parse().map_err(|_| bad_model(s))?;
            return PlantModel::tracker(tau, gain);
        }
    }
    Err(bad_model(s))
}

fn bad_model(s: &str) -> Error {
    Error::Config(format!(
        "unknown model '{s}'; expected \"engine\" or \"tracker:<tau>,<gain>\""
    ))
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let mut sizes = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some((range, step)) = split_range(item)? {
            let (lo, hi) = range;
            let mut k = lo;
            while k <= hi {
                sizes.push(k);
                k += step;
            }
        } else {
            sizes.push(item.parse().map_err(|_| bad_sizes(s))?);
        }
    }
    if sizes.is_empty() {
        return Err(bad_sizes(s));
    }
    Ok(sizes)
}

type RangeStep = ((usize, usize), usize);

fn split_range(item: &str) -> Result<Option<RangeStep>> {
    let Some((lo, rest)) = item.split_once("..") else {
        return Ok(None);
    };
    let (hi, step) = match rest.split_once(':') {
        Some((hi, step)) => (hi, step.parse().map_err(|_| bad_sizes(item))?),
        None => (rest, 1),
    };
    if step == 0 {
        return Err(bad_sizes(item));
    }
    let lo: usize = lo.trim().parse().map_err(|_| bad_sizes(item))?;
    let hi: usize = hi.trim().parse().map_err(|_| bad_sizes(item))?;
    Ok(Some(((lo, hi), step)))
}

fn bad_sizes(s: &str) -> Error {
    Error::Config(format!("could not parse sizes '{s}'"))
}

/// Per-case selection export: case id plus the chosen indices.
#[derive(serde::Serialize, serde::Deserialize)]
struct CaseSelection {
    case_id: String,
    trajectory_len: usize,
    selected_indices: Vec<usize>,
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            spec,
            size,
            seed: master,
            control_points,
            out,
        } => {
            let spec: SignalSpec = read_json(&spec)?;
            let mut rng = seed::rng(master, "suite", 0);
            let suite = generate_suite(&spec, size, control_points, &mut rng)?;
            write_json(&out, &suite)?;
            eprintln!("wrote {} cases to {}", suite.len(), out.display());
        }
        Command::Metrics {
            suite,
            model,
            implementation_gain_scale,
            window_radius,
            out,
        } => {
            let suite: TestSuite = read_json(&suite)?;
            let reference = parse_model(&model)?;
            let implementation = apply_fault(
                &reference,
                &FaultSpec {
                    id: "implementation-gain-slip".into(),
                    operator: FaultOperator::ArithmeticReplacement {
                        param: ParamTarget::Gain,
                        scale: implementation_gain_scale,
                    },
                },
            )?;
            let expected: Vec<Trajectory> = suite
                .cases
                .iter()
                .map(|c| simulate(&reference, c))
                .collect::<Result<_>>()?;
            let observed: Vec<Trajectory> = suite
                .cases
                .iter()
                .map(|c| simulate(&implementation, c))
                .collect::<Result<_>>()?;
            let out_spec = reference.output_spec(&suite.cases[0].input.spec)?;
            let all: Vec<MetricSeries> = (0..suite.len())
                .map(|i| collect_metrics(&suite, &observed, &expected, i, window_radius, &out_spec))
                .collect::<Result<_>>()?;
            write_json(&out, &all)?;
            eprintln!("wrote metrics for {} cases to {}", all.len(), out.display());
        }
        Command::Select {
            metrics,
            heuristic,
            m,
            n,
            coverage,
            weights,
            sample_period,
            seed: master,
            endpoint,
            out,
        } => {
            let all: Vec<MetricSeries> = read_json(&metrics)?;
            let weights: Weights = match weights {
                Some(path) => read_json(&path)?,
                None => Weights::default(),
            };
            let sampler: Box<dyn QuboSampler> = match heuristic.as_str() {
                "exact" => Box::new(ExactSampler),
                "sa" => Box::new(SaSampler {
                    params: AnnealParams {
                        seed: master,
                        ..Default::default()
                    },
                }),
                "evo" => Box::new(EvoSampler {
                    pop: 20,
                    generations: 50,
                    seed: master,
                }),
                "random" => Box::new(RandomSampler {
                    draws: 1000,
                    seed: master,
                }),
                "remote" => {
                    let raw = endpoint
                        .ok_or_else(|| Error::Config("--endpoint required for remote".into()))?;
                    let endpoint: SocketAddr = raw
                        .parse()
                        .map_err(|e| Error::Config(format!("bad endpoint '{raw}': {e}")))?;
                    Box::new(RemoteSampler {
                        endpoint,
                        reads: 100,
                        timeout: Duration::from_secs(30),
                    })
                }
                other => return Err(Error::Config(format!("unknown heuristic '{other}'"))),
            };
            let mut selections = Vec::with_capacity(all.len());
            for metric in &all {
                let selection = if matches!(heuristic.as_str(), "evo" | "random") {
                    // Baselines take the whole trajectory as one problem.
                    let indices: Vec<usize> = (0..metric.len()).collect();
                    let times: Vec<f64> =
                        indices.iter().map(|&i| i as f64 * sample_period).collect();
                    let instance =
                        build_selection_qubo(metric, &indices, &times, &weights, None)?;
                    sampler.sample(&instance.qubo)?.best().selection.clone()
                } else {
                    let cfg = DecompositionConfig {
                        m,
                        n,
                        coverage,
                        seed: master,
                    };
                    decompose_and_select(metric, &weights, sample_period, &cfg, sampler.as_ref())?
                };
                selections.push(CaseSelection {
                    case_id: metric.case_id.clone(),
                    trajectory_len: metric.len(),
                    selected_indices: selection.selected_indices(),
                });
            }
            write_json(&out, &selections)?;
            eprintln!("wrote selections for {} cases to {}", selections.len(), out.display());
        }
        Command::Mutate {
            suite,
            selection,
            metrics,
            window_radius,
            smoothing_radius,
            out,
        } => {
            let suite: TestSuite = read_json(&suite)?;
            let selections: Vec<CaseSelection> = read_json(&selection)?;
            let all_metrics: Vec<MetricSeries> = read_json(&metrics)?;
            let mut mutated_cases = Vec::with_capacity(suite.len());
            for case in &suite.cases {
                let sel = selections
                    .iter()
                    .find(|s| s.case_id == case.id)
                    .ok_or_else(|| Error::Config(format!("no selection for case '{}'", case.id)))?;
                let metric = all_metrics
                    .iter()
                    .find(|m| m.case_id == case.id)
                    .ok_or_else(|| Error::Config(format!("no metrics for case '{}'", case.id)))?;
                let selection =
                    Selection::from_indices(case.input.len(), &sel.selected_indices);
                let plan =
                    plan_mutations(case, &selection, metric, window_radius, smoothing_radius)?;
                let mut mutated = apply_mutations(case, &plan)?;
                mutated.id = format!("{}-mut", case.id);
                mutated_cases.push(mutated);
            }
            let mutated = TestSuite::new(mutated_cases)?;
            write_json(&out, &mutated)?;
            eprintln!("wrote {} mutated cases to {}", mutated.len(), out.display());
        }
        Command::Campaign { config, out } => {
            let cfg: CampaignConfig = read_json(&config)?;
            let report = run_campaign(&cfg)?;
            write_report(&report, &out)?;
            eprintln!("wrote report to {}", out.display());
        }
        Command::EmbedStudy { sizes, out } => {
            let sizes = parse_sizes(&sizes)?;
            let rows = embed_study(&sizes)?;
            if let Some(parent) = out.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&out, embed_study_table(&rows))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
