//! Campaign orchestration: generate seed suites, identify data points per
//! heuristic, mutate, and evaluate every resulting suite against a fault
//! corpus. Reports fault detection (PFD), timing splits, and pairwise
//! rank-sum comparisons.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::decompose::{decompose_and_select, DecompositionConfig};
use crate::embed::{build_chimera, embed_clique, embedding_stats};
use crate::error::{Error, Result};
use crate::metrics::{collect_metrics, effectiveness_series, MetricSeries};
use crate::mutate::{apply_mutations, plan_mutations};
use crate::qubo::{build_selection_qubo, Selection, Weights};
use crate::seed;
use crate::solvers::remote::RemoteSampler;
use crate::solvers::{AnnealParams, EvoSampler, QuboSampler, RandomSampler, SaSampler};
use crate::sut::{
    apply_fault, conformance, generate_fault_corpus, simulate, FaultOperator, FaultSpec,
    ParamTarget, PlantModel,
};
use crate::trajectory::{generate_suite, SignalSpec, TestCase, TestSuite, Trajectory};

/// Selection strategies compared by the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    QuantumRemote,
    SimulatedAnnealing,
    Evolutionary,
    Random,
}

impl Heuristic {
    pub fn name(&self) -> &'static str {
        match self {
            Heuristic::QuantumRemote => "quantum_remote",
            Heuristic::SimulatedAnnealing => "simulated_annealing",
            Heuristic::Evolutionary => "evolutionary",
            Heuristic::Random => "random",
        }
    }

    /// Size-limited samplers run on decomposed sub-problems; the baselines
    /// take the entire trajectory as one problem.
    pub fn uses_decomposition(&self) -> bool {
        matches!(self, Heuristic::QuantumRemote | Heuristic::SimulatedAnnealing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub signal: SignalSpec,
    pub suite_size: usize,
    pub control_points: usize,
    pub weights: Weights,
    pub decomposition: DecompositionConfig,
    pub heuristics: Vec<Heuristic>,
    pub repeats: usize,
    pub epsilon: f64,
    pub master_seed: u64,
    /// Reference plant (the specification model).
    pub model: PlantModel,
    /// Fault defining the implementation model that metrics are computed
    /// against.
    pub implementation_fault: FaultSpec,
    pub faults_per_type: usize,
    pub anneal: AnnealParams,
    pub evo_population: usize,
    pub evo_generations: usize,
    pub random_draws: usize,
    /// Diversity/correlation window radius, samples.
    pub window_radius: usize,
    /// Mutation smoothing radius, samples.
    pub smoothing_radius: usize,
    /// Mutated suites are appended, then truncated to this many cases
    /// keeping the highest summed effectiveness.
    pub suite_cap: usize,
    /// Endpoint for the quantum_remote heuristic, "host:port".
    pub remote_endpoint: Option<String>,
    pub remote_timeout_secs: u64,
}

impl CampaignConfig {
    /// Paper-scale defaults for a given input signal.
    pub fn new(signal: SignalSpec) -> Self {
        Self {
            signal,
            suite_size: 50,
            control_points: 10,
            weights: Weights::default(),
            decomposition: DecompositionConfig::default(),
            heuristics: vec![Heuristic::SimulatedAnnealing, Heuristic::Random],
            repeats: 10,
            epsilon: 0.1,
            master_seed: 0,
            model: PlantModel::engine(),
            implementation_fault: FaultSpec {
                id: "implementation-gain-slip".into(),
                operator: FaultOperator::ArithmeticReplacement {
                    param: ParamTarget::Gain,
                    scale: 1.04,
                },
            },
            faults_per_type: 10,
            anneal: AnnealParams::default(),
            evo_population: 20,
            evo_generations: 50,
            random_draws: 1000,
            window_radius: 50,
            smoothing_radius: 100,
            suite_cap: 50,
            remote_endpoint: None,
            remote_timeout_secs: 30,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.weights.validate()?;
        if self.heuristics.is_empty() {
            return Err(Error::Config("at least one heuristic required".into()));
        }
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.suite_size < 2 {
            return Err(Error::Config("suite_size must be >= 2 for diversity".into()));
        }
        if self.suite_cap < 1 {
            return Err(Error::Config("suite_cap must be >= 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be > 0".into()));
        }
        if self.heuristics.contains(&Heuristic::QuantumRemote) && self.remote_endpoint.is_none() {
            return Err(Error::Config(
                "quantum_remote heuristic needs remote_endpoint".into(),
            ));
        }
        Ok(())
    }
}

/// One (heuristic, repeat) cell's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub heuristic: Heuristic,
    pub repeat: usize,
    /// Percentage of fault variants detected by the mutated suite.
    pub pfd: f64,
    /// Detection flag per corpus fault, in corpus order.
    pub detections: Vec<bool>,
    /// Median over cases of the max effectiveness against gain-type
    /// variants, for the mutated suite.
    pub mutated_gain_effect_median: f64,
    /// Same statistic for the unmutated seed suite of this repeat.
    pub seed_gain_effect_median: f64,
    pub suite_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub heuristic: Heuristic,
    pub repeat: usize,
    pub result: std::result::Result<CellResult, String>,
}

/// Wall-clock split for one cell, seconds. Splits sum to `total`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CellTiming {
    pub heuristic: String,
    pub repeat: usize,
    pub metrics: f64,
    pub solve: f64,
    pub mutate: f64,
    pub embed_simulation: f64,
    pub remote_access: f64,
    pub other: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicSummary {
    pub heuristic: Heuristic,
    pub median_pfd: f64,
    pub q1_pfd: f64,
    pub q3_pfd: f64,
    pub completed_repeats: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub fault_ids: Vec<String>,
    pub cells: Vec<CellRecord>,
    pub summaries: Vec<HeuristicSummary>,
    /// Two-sided rank-sum p-values keyed "heuristic_a/heuristic_b".
    pub rank_sum_p: BTreeMap<String, f64>,
    /// Wall-clock accounting; excluded from the deterministic summary.
    pub timings: Vec<CellTiming>,
}

fn sampler_for(cfg: &CampaignConfig, heuristic: Heuristic, repeat: usize) -> Result<Box<dyn QuboSampler>> {
    let cell_seed = seed::derive(cfg.master_seed, heuristic.name(), repeat as u64);
    Ok(match heuristic {
        Heuristic::SimulatedAnnealing => Box::new(SaSampler {
            params: AnnealParams {
                seed: cell_seed,
                ..cfg.anneal.clone()
            },
        }),
        Heuristic::Evolutionary => Box::new(EvoSampler {
            pop: cfg.evo_population,
            generations: cfg.evo_generations,
            seed: cell_seed,
        }),
        Heuristic::Random => Box::new(RandomSampler {
            draws: cfg.random_draws,
            seed: cell_seed,
        }),
        Heuristic::QuantumRemote => {
            let raw = cfg
                .remote_endpoint
                .as_ref()
                .ok_or_else(|| Error::Config("remote endpoint missing".into()))?;
            let endpoint: SocketAddr = raw
                .parse()
                .map_err(|e| Error::Config(format!("bad remote endpoint '{raw}': {e}")))?;
            Box::new(RemoteSampler {
                endpoint,
                reads: cfg.anneal.num_reads,
                timeout: Duration::from_secs(cfg.remote_timeout_secs),
            })
        }
    })
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn quartiles(values: &mut [f64]) -> (f64, f64, f64) {
    values.sort_by(f64::total_cmp);
    let q = |f: f64| -> f64 {
        if values.is_empty() {
            return f64::NAN;
        }
        let pos = f * (values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        values[lo] + (pos - lo as f64) * (values[hi] - values[lo])
    };
    (q(0.25), q(0.5), q(0.75))
}

/// Percentage of fault variants with at least one failing case.
pub fn pfd(
    suite: &TestSuite,
    variants: &[PlantModel],
    reference: &PlantModel,
    epsilon: f64,
) -> Result<f64> {
    let (detected, total) = detection_flags(suite, variants, reference, epsilon)
        .map(|flags| (flags.iter().filter(|&&d| d).count(), flags.len()))?;
    Ok(100.0 * detected as f64 / total as f64)
}

/// Per-variant detection flags (the PFD numerator, unaggregated).
pub fn detection_flags(
    suite: &TestSuite,
    variants: &[PlantModel],
    reference: &PlantModel,
    epsilon: f64,
) -> Result<Vec<bool>> {
    if suite.is_empty() || variants.is_empty() {
        return Err(Error::Config("pfd needs a non-empty suite and corpus".into()));
    }
    let expected: Vec<Trajectory> = suite
        .cases
        .iter()
        .map(|c| simulate(reference, c))
        .collect::<Result<_>>()?;
    let mut flags = Vec::with_capacity(variants.len());
    for variant in variants {
        let mut detected = false;
        for (case, exp) in suite.cases.iter().zip(&expected) {
            let obs = simulate(variant, case)?;
            if !conformance(&obs, exp, epsilon)?.pass {
                detected = true;
                break;
            }
        }
        flags.push(detected);
    }
    Ok(flags)
}

/// Two-sided Mann-Whitney U p-value, normal approximation with tie
/// correction. Fully tied samples give p = 1.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::InsufficientData(
            "rank-sum test needs at least 3 observations per sample".into(),
        ));
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0usize))
        .chain(b.iter().map(|&v| (v, 1usize)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Midranks plus the tie-correction term sum(t^3 - t).
    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0; // ranks are 1-based
        for p in &pooled[i..j] {
            if p.1 == 0 {
                rank_sum_a += midrank;
            }
        }
        tie_term += t * t * t - t;
        i = j;
    }

    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    let mu = na * nb / 2.0;
    let nf = n as f64;
    let variance = na * nb / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if variance <= 0.0 {
        return Ok(1.0);
    }
    // Continuity correction toward the mean.
    let z = ((u - mu).abs() - 0.5).max(0.0) / variance.sqrt();
    if z == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * (1.0 - normal_cdf(z))).clamp(0.0, 1.0))
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf polynomial
/// (absolute error < 1.5e-7).
fn normal_cdf(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = sign * (1.0 - poly * (-x * x).exp());
    0.5 * (1.0 + erf)
}

struct RepeatContext {
    suite: TestSuite,
    metrics: Vec<MetricSeries>,
    seed_gain_effect_median: f64,
    metrics_time: f64,
}

fn gain_effect_median(
    suite: &TestSuite,
    gain_variants: &[PlantModel],
    reference: &PlantModel,
) -> Result<f64> {
    let out_spec = reference.output_spec(&suite.cases[0].input.spec)?;
    let mut per_case: Vec<f64> = Vec::with_capacity(suite.len());
    for case in &suite.cases {
        let expected = simulate(reference, case)?;
        let mut max_e = 0.0f64;
        for variant in gain_variants {
            let observed = simulate(variant, case)?;
            let series = effectiveness_series(&observed, &expected, &out_spec)?;
            max_e = series.iter().fold(max_e, |m, &v| m.max(v));
        }
        per_case.push(max_e);
    }
    Ok(median(&mut per_case))
}

fn prepare_repeat(
    cfg: &CampaignConfig,
    repeat: usize,
    gain_variants: &[PlantModel],
) -> Result<RepeatContext> {
    let mut rng = seed::rng(cfg.master_seed, "suite", repeat as u64);
    let suite = generate_suite(&cfg.signal, cfg.suite_size, cfg.control_points, &mut rng)?;

    let started = Instant::now();
    let reference = &cfg.model;
    let implementation = apply_fault(reference, &cfg.implementation_fault)?;
    let expected: Vec<Trajectory> = suite
        .cases
        .iter()
        .map(|c| simulate(reference, c))
        .collect::<Result<_>>()?;
    let observed: Vec<Trajectory> = suite
        .cases
        .iter()
        .map(|c| simulate(&implementation, c))
        .collect::<Result<_>>()?;
    let out_spec = reference.output_spec(&cfg.signal)?;
    let metrics: Vec<MetricSeries> = (0..suite.len())
        .map(|i| collect_metrics(&suite, &observed, &expected, i, cfg.window_radius, &out_spec))
        .collect::<Result<_>>()?;
    let metrics_time = started.elapsed().as_secs_f64();

    let seed_gain_effect_median = gain_effect_median(&suite, gain_variants, reference)?;
    Ok(RepeatContext {
        suite,
        metrics,
        seed_gain_effect_median,
        metrics_time,
    })
}

/// Identify data points for one case under the given heuristic.
fn select_for_case(
    cfg: &CampaignConfig,
    heuristic: Heuristic,
    repeat: usize,
    metric: &MetricSeries,
    sampler: &dyn QuboSampler,
) -> Result<Selection> {
    if heuristic.uses_decomposition() {
        let dec = DecompositionConfig {
            seed: seed::derive(cfg.master_seed, "decompose", repeat as u64),
            ..cfg.decomposition.clone()
        };
        decompose_and_select(metric, &cfg.weights, cfg.signal.sample_period, &dec, sampler)
    } else {
        // Baselines take the entire trajectory as one problem.
        let n = metric.len();
        let indices: Vec<usize> = (0..n).collect();
        let times: Vec<f64> = indices
            .iter()
            .map(|&i| i as f64 * cfg.signal.sample_period)
            .collect();
        let instance = build_selection_qubo(metric, &indices, &times, &cfg.weights, None)?;
        let set = sampler.sample(&instance.qubo)?;
        Ok(set.best().selection.clone())
    }
}

fn summed_effectiveness(case: &TestCase, cfg: &CampaignConfig) -> Result<f64> {
    let reference = &cfg.model;
    let implementation = apply_fault(reference, &cfg.implementation_fault)?;
    let expected = simulate(reference, case)?;
    let observed = simulate(&implementation, case)?;
    let out_spec = reference.output_spec(&case.input.spec)?;
    Ok(effectiveness_series(&observed, &expected, &out_spec)?
        .iter()
        .sum())
}

/// Append mutated cases, then truncate to the cap keeping the highest
/// summed effectiveness (stable on ties, original order preserved).
fn enrich_and_cap(
    originals: &TestSuite,
    mutated: Vec<TestCase>,
    cfg: &CampaignConfig,
) -> Result<TestSuite> {
    let mut combined: Vec<TestCase> = originals.cases.clone();
    combined.extend(mutated);
    if combined.len() > cfg.suite_cap {
        let mut scored: Vec<(usize, f64)> = combined
            .iter()
            .enumerate()
            .map(|(i, c)| Ok((i, summed_effectiveness(c, cfg)?)))
            .collect::<Result<_>>()?;
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut keep: Vec<usize> = scored[..cfg.suite_cap].iter().map(|(i, _)| *i).collect();
        keep.sort_unstable();
        let mut kept = Vec::with_capacity(cfg.suite_cap);
        for (i, case) in combined.into_iter().enumerate() {
            if keep.binary_search(&i).is_ok() {
                kept.push(case);
            }
        }
        combined = kept;
    }
    TestSuite::new(combined)
}

fn run_cell(
    cfg: &CampaignConfig,
    heuristic: Heuristic,
    repeat: usize,
    ctx: &RepeatContext,
    corpus: &[PlantModel],
    gain_variants: &[PlantModel],
    timing: &mut CellTiming,
) -> Result<CellResult> {
    let cell_start = Instant::now();
    let sampler = sampler_for(cfg, heuristic, repeat)?;

    // Stand-in for hardware embedding: build the topology and clique
    // embedding for the sub-problem size this heuristic would submit.
    if heuristic.uses_decomposition() {
        let embed_start = Instant::now();
        let n = cfg.decomposition.n.max(1);
        let topo = build_chimera(n.div_ceil(4))?;
        let e = embed_clique(n, &topo)?;
        let _ = embedding_stats(&e);
        timing.embed_simulation = embed_start.elapsed().as_secs_f64();
    }

    let solve_start = Instant::now();
    let mut selections = Vec::with_capacity(ctx.suite.len());
    for metric in &ctx.metrics {
        selections.push(select_for_case(cfg, heuristic, repeat, metric, sampler.as_ref())?);
    }
    timing.solve = solve_start.elapsed().as_secs_f64();

    let mutate_start = Instant::now();
    let mut mutated_cases = Vec::new();
    for ((case, metric), selection) in ctx.suite.cases.iter().zip(&ctx.metrics).zip(&selections) {
        let plan = plan_mutations(case, selection, metric, cfg.window_radius, cfg.smoothing_radius)?;
        if plan.points.is_empty() {
            continue;
        }
        let mut mutated = apply_mutations(case, &plan)?;
        mutated.id = format!("{}-mut", case.id);
        mutated_cases.push(mutated);
    }
    let suite = enrich_and_cap(&ctx.suite, mutated_cases, cfg)?;
    timing.mutate = mutate_start.elapsed().as_secs_f64();

    let detections = detection_flags(&suite, corpus, &cfg.model, cfg.epsilon)?;
    let pfd_value = 100.0 * detections.iter().filter(|&&d| d).count() as f64
        / detections.len() as f64;
    let mutated_gain = gain_effect_median(&suite, gain_variants, &cfg.model)?;

    timing.metrics = ctx.metrics_time;
    let wall = cell_start.elapsed().as_secs_f64();
    timing.other = (wall - timing.solve - timing.mutate - timing.embed_simulation).max(0.0);
    timing.total = timing.metrics
        + timing.solve
        + timing.mutate
        + timing.embed_simulation
        + timing.remote_access
        + timing.other;

    Ok(CellResult {
        heuristic,
        repeat,
        pfd: pfd_value,
        detections,
        mutated_gain_effect_median: mutated_gain,
        seed_gain_effect_median: ctx.seed_gain_effect_median,
        suite_len: suite.len(),
    })
}

/// Run the full three-phase campaign over every (heuristic, repeat) cell.
/// A failing cell is recorded and the campaign continues.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let faults = generate_fault_corpus(
        &cfg.model,
        cfg.faults_per_type,
        cfg.signal.n_samples(),
        cfg.master_seed,
    )?;
    let corpus: Vec<PlantModel> = faults
        .iter()
        .map(|f| apply_fault(&cfg.model, f))
        .collect::<Result<_>>()?;
    let gain_variants: Vec<PlantModel> = faults
        .iter()
        .zip(&corpus)
        .filter(|(f, _)| f.is_gain_fault())
        .map(|(_, m)| m.clone())
        .collect();

    let mut cells = Vec::new();
    let mut timings = Vec::new();
    for repeat in 0..cfg.repeats {
        let ctx = prepare_repeat(cfg, repeat, &gain_variants)?;
        for &heuristic in &cfg.heuristics {
            let mut timing = CellTiming {
                heuristic: heuristic.name().to_string(),
                repeat,
                ..Default::default()
            };
            let result = run_cell(cfg, heuristic, repeat, &ctx, &corpus, &gain_variants, &mut timing)
                .map_err(|e| e.to_string());
            cells.push(CellRecord {
                heuristic,
                repeat,
                result,
            });
            timings.push(timing);
        }
    }

    // Per-heuristic PFD summaries over completed repeats.
    let mut summaries = Vec::new();
    let mut pfds_by_heuristic: BTreeMap<Heuristic, Vec<f64>> = BTreeMap::new();
    for &heuristic in &cfg.heuristics {
        let mut pfds: Vec<f64> = cells
            .iter()
            .filter(|c| c.heuristic == heuristic)
            .filter_map(|c| c.result.as_ref().ok().map(|r| r.pfd))
            .collect();
        let completed = pfds.len();
        let (q1, q2, q3) = if pfds.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            quartiles(&mut pfds)
        };
        summaries.push(HeuristicSummary {
            heuristic,
            median_pfd: q2,
            q1_pfd: q1,
            q3_pfd: q3,
            completed_repeats: completed,
        });
        pfds_by_heuristic.insert(heuristic, pfds);
    }

    let mut rank_sum_p = BTreeMap::new();
    for (i, &a) in cfg.heuristics.iter().enumerate() {
        for &b in &cfg.heuristics[i + 1..] {
            let (sa, sb) = (&pfds_by_heuristic[&a], &pfds_by_heuristic[&b]);
            if sa.len() >= 3 && sb.len() >= 3 {
                rank_sum_p.insert(format!("{}/{}", a.name(), b.name()), rank_sum_test(sa, sb)?);
            }
        }
    }

    Ok(ExperimentReport {
        fault_ids: faults.iter().map(|f| f.id.clone()).collect(),
        cells,
        summaries,
        rank_sum_p,
        timings,
    })
}

/// Deterministic fixed-decimal summary table (no timing data).
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut out = String::from("heuristic,repeat,pfd,suite_len,mutated_gain_effect_median,seed_gain_effect_median,status\n");
    for cell in &report.cells {
        match &cell.result {
            Ok(r) => out.push_str(&format!(
                "{},{},{:.6},{},{:.6},{:.6},ok\n",
                cell.heuristic.name(),
                cell.repeat,
                r.pfd,
                r.suite_len,
                r.mutated_gain_effect_median,
                r.seed_gain_effect_median
            )),
            Err(e) => out.push_str(&format!(
                "{},{},,,,,\"error: {}\"\n",
                cell.heuristic.name(),
                cell.repeat,
                e.replace('"', "'")
            )),
        }
    }
    out.push('\n');
    out.push_str("heuristic,median_pfd,q1_pfd,q3_pfd,completed_repeats\n");
    for s in &report.summaries {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{}\n",
            s.heuristic.name(),
            s.median_pfd,
            s.q1_pfd,
            s.q3_pfd,
            s.completed_repeats
        ));
    }
    out.push('\n');
    out.push_str("comparison,rank_sum_p\n");
    for (pair, p) in &report.rank_sum_p {
        out.push_str(&format!("{pair},{p:.6}\n"));
    }
    out
}

/// Write the report directory: a deterministic summary (table + JSON of
/// all seed-determined results) plus separate wall-clock timing detail.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.csv"), summary_table(report))?;

    #[derive(Serialize)]
    struct DeterministicView<'a> {
        fault_ids: &'a [String],
        cells: &'a [CellRecord],
        summaries: &'a [HeuristicSummary],
        rank_sum_p: &'a BTreeMap<String, f64>,
    }
    let view = DeterministicView {
        fault_ids: &report.fault_ids,
        cells: &report.cells,
        summaries: &report.summaries,
        rank_sum_p: &report.rank_sum_p,
    };
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_vec_pretty(&view)?,
    )?;
    std::fs::write(
        dir.join("timings.json"),
        serde_json::to_vec_pretty(&report.timings)?,
    )?;
    Ok(())
}
