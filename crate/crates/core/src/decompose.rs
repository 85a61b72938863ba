//! Sub-problem decomposition: tile a trajectory into windows, sample
//! qubit-budget-sized index sets per window, solve each sub-QUBO, and merge
//! the sub-solutions with a final selection round.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricSeries;
use crate::qubo::{build_selection_qubo, Selection, Weights};
use crate::seed;
use crate::solvers::QuboSampler;

/// One sub-problem: its window and the global indices it selects from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubProblemPlan {
    pub slice_index: usize,
    /// Half-open index interval [lo, hi) into the trajectory.
    pub window: (usize, usize),
    pub sampled_indices: Vec<usize>,
}

/// Decomposition parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    /// Number of windows (M).
    pub m: usize,
    /// Data points per sub-QUBO (N).
    pub n: usize,
    /// Fraction of each window's indices that must appear in some round.
    pub coverage: f64,
    pub seed: u64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            m: 8,
            n: 40,
            coverage: 0.5,
            seed: 0,
        }
    }
}

/// Tile [0, traj_len) into M equal-width (+-1) windows and sample rounds of
/// up to N distinct indices per window until the coverage fraction is met.
/// Every round appends one plan for its window.
pub fn plan_subproblems(traj_len: usize, cfg: &DecompositionConfig) -> Result<Vec<SubProblemPlan>> {
    if cfg.m < 1 || cfg.n < 1 {
        return Err(Error::Config("m and n must be >= 1".into()));
    }
    if cfg.m > traj_len {
        return Err(Error::Config(format!(
            "m = {} exceeds trajectory length {traj_len}",
            cfg.m
        )));
    }
    if cfg.n > traj_len {
        return Err(Error::Config(format!(
            "sub-problem size n = {} exceeds trajectory length {traj_len}",
            cfg.n
        )));
    }
    if !(cfg.coverage > 0.0 && cfg.coverage <= 1.0) {
        return Err(Error::Config(format!(
            "coverage must be in (0, 1], got {}",
            cfg.coverage
        )));
    }

    let mut plans = Vec::new();
    let base = traj_len / cfg.m;
    let remainder = traj_len % cfg.m;
    let mut lo = 0usize;
    for w in 0..cfg.m {
        let width = base + usize::from(w < remainder);
        let hi = lo + width;
        let per_round = cfg.n.min(width);
        let required = ((cfg.coverage * width as f64).ceil() as usize).clamp(1, width);

        let mut rng = seed::rng(cfg.seed, "plan-window", w as u64);
        let mut covered = vec![false; width];
        let mut covered_count = 0usize;
        let pool: Vec<usize> = (lo..hi).collect();
        let mut rounds = 0usize;
        while covered_count < required {
            rounds += 1;
            if rounds > 10_000 {
                return Err(Error::Config(
                    "coverage not reached within 10000 sampling rounds".into(),
                ));
            }
            let mut sampled: Vec<usize> = pool
                .choose_multiple(&mut rng, per_round)
                .copied()
                .collect();
            sampled.sort_unstable();
            for &idx in &sampled {
                if !covered[idx - lo] {
                    covered[idx - lo] = true;
                    covered_count += 1;
                }
            }
            plans.push(SubProblemPlan {
                slice_index: w,
                window: (lo, hi),
                sampled_indices: sampled,
            });
        }
        lo = hi;
    }
    Ok(plans)
}

fn times_of(indices: &[usize], sample_period: f64) -> Vec<f64> {
    indices.iter().map(|&i| i as f64 * sample_period).collect()
}

/// Solve every sub-problem with the given sampler. The effectiveness target
/// of each sub-QUBO is the local sum over its sampled points.
pub fn solve_subproblems(
    plans: &[SubProblemPlan],
    metric: &MetricSeries,
    weights: &Weights,
    sample_period: f64,
    solver: &dyn QuboSampler,
) -> Result<Vec<Selection>> {
    let mut selections = Vec::with_capacity(plans.len());
    for (plan_idx, plan) in plans.iter().enumerate() {
        let times = times_of(&plan.sampled_indices, sample_period);
        let run = || -> Result<Selection> {
            let instance =
                build_selection_qubo(metric, &plan.sampled_indices, &times, weights, None)?;
            let set = solver.sample(&instance.qubo)?;
            set.validate(&instance.qubo, 1e-9)?;
            Ok(set.best().selection.clone())
        };
        match run() {
            Ok(sel) => selections.push(sel),
            Err(e) => {
                return Err(Error::SubProblem {
                    solver: solver.name().to_string(),
                    plan: plan_idx,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(selections)
}

/// Merge sub-solutions: take the union of globally-indexed selected points
/// and run a final selection round over it (recursively decomposing unions
/// larger than the capacity). Returns a global selection over the full
/// trajectory length.
pub fn merge_subsolutions(
    selections: &[Selection],
    plans: &[SubProblemPlan],
    metric: &MetricSeries,
    weights: &Weights,
    sample_period: f64,
    solver: &dyn QuboSampler,
    capacity: usize,
) -> Result<Selection> {
    if selections.is_empty() {
        return Err(Error::Config("merge needs at least one sub-solution".into()));
    }
    if selections.len() != plans.len() {
        return Err(Error::Shape("selections and plans lengths differ".into()));
    }
    let traj_len = metric.len();
    let mut union: std::collections::BTreeSet<usize> = Default::default();
    for (sel, plan) in selections.iter().zip(plans) {
        for (local, &global) in plan.sampled_indices.iter().enumerate() {
            if sel.bits[local] == 1 {
                union.insert(global);
            }
        }
    }
    let union: Vec<usize> = union.into_iter().collect();
    if union.is_empty() {
        return Ok(Selection::zeros(traj_len));
    }
    // The final round targets the whole-problem effectiveness sum so the
    // merge QUBO is the direct formulation restricted to the union.
    let ef_target: f64 = metric.effectiveness.iter().sum();
    let final_indices = reduce_union(
        &union, metric, weights, sample_period, solver, capacity, ef_target, 0,
    )?;
    Ok(Selection::from_indices(traj_len, &final_indices))
}

fn reduce_union(
    union: &[usize],
    metric: &MetricSeries,
    weights: &Weights,
    sample_period: f64,
    solver: &dyn QuboSampler,
    capacity: usize,
    ef_target: f64,
    depth: usize,
) -> Result<Vec<usize>> {
    if depth > 32 {
        return Err(Error::Config("merge recursion depth exceeded".into()));
    }
    if union.len() <= capacity {
        let times = times_of(union, sample_period);
        let instance = build_selection_qubo(metric, union, &times, weights, Some(ef_target))?;
        let set = solver.sample(&instance.qubo)?;
        set.validate(&instance.qubo, 1e-9)?;
        let best = &set.best().selection;
        return Ok(union
            .iter()
            .enumerate()
            .filter_map(|(local, &global)| (best.bits[local] == 1).then_some(global))
            .collect());
    }

    // Too large for one round: tile the union into capacity-sized chunks,
    // solve each locally, and recurse on the surviving points.
    let mut survivors = Vec::new();
    for chunk in union.chunks(capacity) {
        let times = times_of(chunk, sample_period);
        let instance = build_selection_qubo(metric, chunk, &times, weights, None)?;
        let set = solver.sample(&instance.qubo)?;
        set.validate(&instance.qubo, 1e-9)?;
        let best = &set.best().selection;
        survivors.extend(
            chunk
                .iter()
                .enumerate()
                .filter_map(|(local, &global)| (best.bits[local] == 1).then_some(global)),
        );
    }
    if survivors.len() >= union.len() {
        // No progress; keep the highest-effectiveness points within capacity.
        survivors.sort_by(|&a, &b| {
            metric.effectiveness[b]
                .total_cmp(&metric.effectiveness[a])
                .then_with(|| a.cmp(&b))
        });
        survivors.truncate(capacity);
        survivors.sort_unstable();
    }
    reduce_union(
        &survivors, metric, weights, sample_period, solver, capacity, ef_target, depth + 1,
    )
}

/// Full Phase-2 pipeline for one case: plan, solve, merge.
pub fn decompose_and_select(
    metric: &MetricSeries,
    weights: &Weights,
    sample_period: f64,
    cfg: &DecompositionConfig,
    solver: &dyn QuboSampler,
) -> Result<Selection> {
    let plans = plan_subproblems(metric.len(), cfg)?;
    let selections = solve_subproblems(&plans, metric, weights, sample_period, solver)?;
    merge_subsolutions(
        &selections,
        &plans,
        metric,
        weights,
        sample_period,
        solver,
        cfg.n,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::build_selection_qubo;
    use crate::solvers::ExactSampler;
    use rand::Rng;

    fn metric_of(ef: Vec<f64>) -> MetricSeries {
        let n = ef.len();
        MetricSeries {
            case_id: "t".into(),
            effectiveness: ef,
            input_diversity: vec![0.0; n],
            output_diversity: vec![0.0; n],
        }
    }

    fn random_metric(n: usize, seed: u64) -> MetricSeries {
        let mut rng = seed::rng(seed, "metric", 0);
        MetricSeries {
            case_id: "t".into(),
            effectiveness: (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
            input_diversity: (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
            output_diversity: (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
        }
    }

    #[test]
    fn degenerate_plan_contains_every_index() {
        let cfg = DecompositionConfig {
            m: 1,
            n: 12,
            coverage: 1.0,
            seed: 0,
        };
        let plans = plan_subproblems(12, &cfg).unwrap();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].window, (0, 12));
        assert_eq!(plans[0].sampled_indices, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn two_windows_tile_evenly() {
        let cfg = DecompositionConfig {
            m: 2,
            n: 10,
            coverage: 0.1,
            seed: 1,
        };
        let plans = plan_subproblems(100, &cfg).unwrap();
        assert!(plans.iter().any(|p| p.window == (0, 50)));
        assert!(plans.iter().any(|p| p.window == (50, 100)));
        for p in &plans {
            assert!(p.sampled_indices.iter().all(|&i| i >= p.window.0 && i < p.window.1));
            assert!(p.sampled_indices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn coverage_sweep_matches_counting_bound() {
        // m=8, n=40, coverage 0.5 on length 1000: 125-wide windows,
        // every plan holds 40 indices, union covers >= 63 per window.
        let cfg = DecompositionConfig {
            m: 8,
            n: 40,
            coverage: 0.5,
            seed: 42,
        };
        let plans = plan_subproblems(1000, &cfg).unwrap();
        for w in 0..8 {
            let window_plans: Vec<_> = plans.iter().filter(|p| p.slice_index == w).collect();
            let mut union = std::collections::BTreeSet::new();
            for p in &window_plans {
                assert_eq!(p.sampled_indices.len(), 40);
                assert_eq!(p.window.1 - p.window.0, 125);
                union.extend(p.sampled_indices.iter().copied());
            }
            assert!(union.len() >= 63, "window {w} covered only {}", union.len());
        }
    }

    #[test]
    fn n_larger_than_trajectory_is_a_config_error() {
        let cfg = DecompositionConfig {
            m: 1,
            n: 20,
            coverage: 1.0,
            seed: 0,
        };
        assert!(matches!(plan_subproblems(10, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn planning_is_deterministic() {
        let cfg = DecompositionConfig {
            m: 4,
            n: 10,
            coverage: 0.7,
            seed: 5,
        };
        assert_eq!(plan_subproblems(200, &cfg).unwrap(), plan_subproblems(200, &cfg).unwrap());
    }

    #[test]
    fn all_zero_metrics_select_nothing() {
        let metric = metric_of(vec![0.0; 10]);
        let plans = plan_subproblems(
            10,
            &DecompositionConfig {
                m: 1,
                n: 10,
                coverage: 1.0,
                seed: 0,
            },
        )
        .unwrap();
        let sels =
            solve_subproblems(&plans, &metric, &Weights::default(), 0.01, &ExactSampler).unwrap();
        assert_eq!(sels[0].count(), 0);
    }

    #[test]
    fn identical_plans_give_identical_selections() {
        let metric = random_metric(12, 3);
        let plan = SubProblemPlan {
            slice_index: 0,
            window: (0, 12),
            sampled_indices: (0..12).collect(),
        };
        let plans = vec![plan.clone(), plan];
        let sels =
            solve_subproblems(&plans, &metric, &Weights::default(), 1.0, &ExactSampler).unwrap();
        assert_eq!(sels[0], sels[1]);
    }

    #[test]
    fn single_subproblem_merge_is_identity() {
        let metric = random_metric(10, 7);
        let plans = plan_subproblems(
            10,
            &DecompositionConfig {
                m: 1,
                n: 10,
                coverage: 1.0,
                seed: 0,
            },
        )
        .unwrap();
        let weights = Weights::default();
        let sels = solve_subproblems(&plans, &metric, &weights, 1.0, &ExactSampler).unwrap();
        let merged =
            merge_subsolutions(&sels, &plans, &metric, &weights, 1.0, &ExactSampler, 10).unwrap();
        assert_eq!(merged.selected_indices(), sels[0].selected_indices());
    }

    #[test]
    fn degenerate_pipeline_equals_direct_solve() {
        for seed in 0..20 {
            let metric = random_metric(12, 100 + seed);
            let weights = Weights::default();
            let sample_period = 1.0; // indices 1 s apart, d_min = 2 s bites
            let cfg = DecompositionConfig {
                m: 1,
                n: 12,
                coverage: 1.0,
                seed,
            };
            let pipeline =
                decompose_and_select(&metric, &weights, sample_period, &cfg, &ExactSampler)
                    .unwrap();

            let indices: Vec<usize> = (0..12).collect();
            let times: Vec<f64> = indices.iter().map(|&i| i as f64 * sample_period).collect();
            let instance =
                build_selection_qubo(&metric, &indices, &times, &weights, None).unwrap();
            let direct = ExactSampler.sample(&instance.qubo).unwrap();
            assert_eq!(
                pipeline.bits, direct.best().selection.bits,
                "seed {seed}: pipeline diverged from direct solve"
            );
        }
    }

    #[test]
    fn merge_enforces_proximity_between_subsolutions() {
        // Two windows each select one point; the points are 1 s apart, which
        // violates d_min = 2 s, so the final round must drop one.
        let mut metric = metric_of(vec![0.0; 4]);
        metric.effectiveness = vec![0.0, 0.9, 0.85, 0.0];
        let plans = vec![
            SubProblemPlan {
                slice_index: 0,
                window: (0, 2),
                sampled_indices: vec![0, 1],
            },
            SubProblemPlan {
                slice_index: 1,
                window: (2, 4),
                sampled_indices: vec![2, 3],
            },
        ];
        // Light count weight so the lone strong point in each window wins.
        let weights = Weights {
            w_ef: 1.0,
            w_id: 0.0,
            w_od: 0.0,
            w_num: 0.05,
            ..Weights::default()
        };
        let sels = solve_subproblems(&plans, &metric, &weights, 1.0, &ExactSampler).unwrap();
        assert_eq!(sels[0].selected_indices(), vec![1]);
        assert_eq!(sels[1].selected_indices(), vec![0]); // local index of 2
        let merged =
            merge_subsolutions(&sels, &plans, &metric, &weights, 1.0, &ExactSampler, 4).unwrap();
        let picked = merged.selected_indices();
        assert_eq!(picked.len(), 1, "proximity violation survived: {picked:?}");
    }

    #[test]
    fn far_apart_strong_points_survive_merge() {
        let mut metric = metric_of(vec![0.0; 10]);
        metric.effectiveness[1] = 0.95;
        metric.effectiveness[8] = 0.9;
        let plans = plan_subproblems(
            10,
            &DecompositionConfig {
                m: 2,
                n: 5,
                coverage: 1.0,
                seed: 0,
            },
        )
        .unwrap();
        let weights = Weights {
            w_ef: 1.0,
            w_id: 0.0,
            w_od: 0.0,
            w_num: 0.05,
            ..Weights::default()
        };
        let sample_period = 1.0;
        let sels = solve_subproblems(&plans, &metric, &weights, sample_period, &ExactSampler)
            .unwrap();
        let merged = merge_subsolutions(
            &sels,
            &plans,
            &metric,
            &weights,
            sample_period,
            &ExactSampler,
            5,
        )
        .unwrap();
        assert_eq!(merged.selected_indices(), vec![1, 8]);
    }

    #[test]
    fn empty_union_yields_empty_selection() {
        let metric = metric_of(vec![0.0; 6]);
        let plans = plan_subproblems(
            6,
            &DecompositionConfig {
                m: 1,
                n: 6,
                coverage: 1.0,
                seed: 0,
            },
        )
        .unwrap();
        let sels = vec![Selection::zeros(6)];
        let merged = merge_subsolutions(
            &sels,
            &plans,
            &metric,
            &Weights::default(),
            0.01,
            &ExactSampler,
            6,
        )
        .unwrap();
        assert_eq!(merged.count(), 0);
    }

    #[test]
    fn final_selection_only_contains_planned_indices() {
        let metric = random_metric(30, 9);
        let cfg = DecompositionConfig {
            m: 3,
            n: 6,
            coverage: 0.4,
            seed: 2,
        };
        let plans = plan_subproblems(30, &cfg).unwrap();
        let weights = Weights::default();
        let sels = solve_subproblems(&plans, &metric, &weights, 0.5, &ExactSampler).unwrap();
        let merged =
            merge_subsolutions(&sels, &plans, &metric, &weights, 0.5, &ExactSampler, 6).unwrap();
        let planned: std::collections::BTreeSet<usize> = plans
            .iter()
            .flat_map(|p| p.sampled_indices.iter().copied())
            .collect();
        for idx in merged.selected_indices() {
            assert!(planned.contains(&idx));
        }
    }
}
