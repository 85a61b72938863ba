//! Mutation of selected data points: correlation-biased value generation
//! plus smooth re-embedding into the surrounding trajectory region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Selection;
use crate::metrics::MetricSeries;
use crate::trajectory::{fit_trajectory, slice_bounds, SignalSpec, TestCase, Trajectory};

/// One planned point mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPoint {
    pub index: usize,
    pub correlation: f64,
    pub mutated_value: f64,
}

/// All planned mutations for one test case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationPlan {
    pub case_id: String,
    pub points: Vec<PlannedPoint>,
    pub smoothing_radius: usize,
}

/// Pearson correlation between a window of signal values and the matching
/// effectiveness values. Zero-variance windows yield 0 by definition.
pub fn correlation(window_values: &[f64], window_effectiveness: &[f64]) -> Result<f64> {
    if window_values.len() != window_effectiveness.len() {
        return Err(Error::Shape("correlation windows differ in length".into()));
    }
    let n = window_values.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least 2 points".into(),
        ));
    }
    let nf = n as f64;
    let mean_v = window_values.iter().sum::<f64>() / nf;
    let mean_e = window_effectiveness.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_v = 0.0;
    let mut var_e = 0.0;
    for (v, e) in window_values.iter().zip(window_effectiveness) {
        let dv = v - mean_v;
        let de = e - mean_e;
        cov += dv * de;
        var_v += dv * dv;
        var_e += de * de;
    }
    if var_v == 0.0 || var_e == 0.0 {
        return Ok(0.0);
    }
    Ok((cov / (var_v.sqrt() * var_e.sqrt())).clamp(-1.0, 1.0))
}

/// Bias a value toward r_max (c > 0) or r_min (c < 0): normalize to the
/// unit interval, raise to the power 1 - c, rescale. 0^0 is taken as 1 so
/// c = 1 always maps to r_max.
pub fn mutate_point(value: f64, c: f64, spec: &SignalSpec) -> Result<f64> {
    if value < spec.r_min || value > spec.r_max {
        return Err(Error::Spec(format!(
            "value {value} outside [{}, {}]",
            spec.r_min, spec.r_max
        )));
    }
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::Spec(format!("correlation {c} outside [-1, 1]")));
    }
    let u = (value - spec.r_min) / spec.range();
    let exponent = 1.0 - c;
    let biased = if u == 0.0 && exponent == 0.0 {
        1.0
    } else {
        u.powf(exponent)
    };
    Ok((biased * spec.range() + spec.r_min).clamp(spec.r_min, spec.r_max))
}

/// Build the mutation plan for one case from the globally selected indices.
pub fn plan_mutations(
    case: &TestCase,
    selection: &Selection,
    metrics: &MetricSeries,
    window_radius: usize,
    smoothing_radius: usize,
) -> Result<MutationPlan> {
    let spec = &case.input.spec;
    let n = case.input.len();
    if selection.bits.len() != n || metrics.len() != n {
        return Err(Error::Shape(format!(
            "selection/metrics length must match the {n}-sample trajectory"
        )));
    }
    let mut points = Vec::new();
    for index in selection.selected_indices() {
        let (lo, hi) = slice_bounds(n, index, window_radius);
        let c = correlation(
            &case.input.values[lo..hi],
            &metrics.effectiveness[lo..hi],
        )?;
        let mutated_value = mutate_point(case.input.values[index], c, spec)?;
        points.push(PlannedPoint {
            index,
            correlation: c,
            mutated_value,
        });
    }
    Ok(MutationPlan {
        case_id: case.id.clone(),
        points,
        smoothing_radius,
    })
}

/// Apply a mutation plan: set each planned value and re-interpolate the
/// surrounding smoothing region so the result stays bounded and
/// rate-limited. Infeasible targets are pulled to the closest reachable
/// value, with the adjustment noted in the case's provenance.
pub fn apply_mutations(case: &TestCase, plan: &MutationPlan) -> Result<TestCase> {
    let spec = case.input.spec.clone();
    let n = case.input.len();
    let mut values = case.input.values.clone();
    let mut provenance = case.provenance.clone();
    let radius = plan.smoothing_radius;
    let dt = spec.sample_period;

    for point in &plan.points {
        if point.index >= n {
            return Err(Error::Shape(format!(
                "planned index {} out of range {n}",
                point.index
            )));
        }
        let (lo, hi_excl) = slice_bounds(n, point.index, radius);
        let hi = hi_excl - 1;

        // Reachable band at the mutated index, anchored on the untouched
        // region boundaries.
        let mut band_lo = spec.r_min;
        let mut band_hi = spec.r_max;
        if point.index > lo {
            let reach = spec.max_rate * (point.index - lo) as f64 * dt;
            band_lo = band_lo.max(values[lo] - reach);
            band_hi = band_hi.min(values[lo] + reach);
        } else if point.index > 0 {
            // Mutation at the region's left edge: respect the neighbor step.
            let reach = spec.max_step();
            band_lo = band_lo.max(values[point.index - 1] - reach);
            band_hi = band_hi.min(values[point.index - 1] + reach);
        }
        if hi > point.index {
            let reach = spec.max_rate * (hi - point.index) as f64 * dt;
            band_lo = band_lo.max(values[hi] - reach);
            band_hi = band_hi.min(values[hi] + reach);
        } else if point.index + 1 < n {
            let reach = spec.max_step();
            band_lo = band_lo.max(values[point.index + 1] - reach);
            band_hi = band_hi.min(values[point.index + 1] + reach);
        }
        let target = point.mutated_value.clamp(spec.r_min, spec.r_max);
        let feasible = target.clamp(band_lo, band_hi);
        if (feasible - target).abs() > 1e-12 {
            provenance.push(format!(
                "index {}: mutated value {:.6} pulled to {:.6} to satisfy the rate limit",
                point.index, target, feasible
            ));
        }

        if lo == hi {
            values[point.index] = feasible;
            continue;
        }

        // Re-interpolate the region through (boundary, mutated, boundary).
        let width = hi - lo;
        let local_spec = SignalSpec::new(
            &spec.name,
            spec.r_min,
            spec.r_max,
            spec.max_rate,
            width as f64 * dt,
            dt,
        )?;
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(3);
        knots.push((0.0, if point.index == lo { feasible } else { values[lo] }));
        if point.index > lo && point.index < hi {
            knots.push(((point.index - lo) as f64 * dt, feasible));
        }
        knots.push((
            width as f64 * dt,
            if point.index == hi { feasible } else { values[hi] },
        ));
        let local = fit_trajectory(&knots, &local_spec)?;
        values[lo..=hi].copy_from_slice(&local.values);
    }

    let mut out = case.clone();
    out.input = Trajectory::new(spec, values)?;
    out.provenance = provenance;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::trajectory::generate_suite;

    fn fuel_spec() -> SignalSpec {
        SignalSpec::new("pedal", 0.0, 5.0, 100.0, 10.0, 0.01).unwrap()
    }

    #[test]
    fn perfect_linear_correlations() {
        let v = vec![0.1, 0.4, 0.9, 1.3];
        let pos: Vec<f64> = v.iter().map(|x| 2.0 * x + 3.0).collect();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((correlation(&v, &pos).unwrap() - 1.0).abs() < 1e-12);
        assert!((correlation(&v, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_gives_zero() {
        assert_eq!(correlation(&[1.0, 1.0, 1.0], &[0.1, 0.5, 0.9]).unwrap(), 0.0);
        assert_eq!(correlation(&[0.1, 0.5, 0.9], &[2.0, 2.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn short_windows_are_insufficient() {
        assert!(matches!(
            correlation(&[1.0], &[1.0]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn mutate_point_identities() {
        let spec = fuel_spec();
        // u = 0.5
        let v = 2.5;
        assert_eq!(mutate_point(v, 1.0, &spec).unwrap(), 5.0);
        assert!((mutate_point(v, 0.0, &spec).unwrap() - v).abs() < 1e-12);
        assert!((mutate_point(v, -1.0, &spec).unwrap() - 1.25).abs() < 1e-12);
        // Unit-interval endpoints.
        assert_eq!(mutate_point(0.0, 0.5, &spec).unwrap(), 0.0);
        assert_eq!(mutate_point(0.0, 1.0, &spec).unwrap(), 5.0);
        assert_eq!(mutate_point(5.0, -0.7, &spec).unwrap(), 5.0);
    }

    #[test]
    fn mutate_point_is_monotone_in_correlation() {
        let spec = fuel_spec();
        for &v in &[0.5, 1.0, 2.5, 4.9] {
            let mut prev = f64::NEG_INFINITY;
            for step in 0..=40 {
                let c = -1.0 + step as f64 * 0.05;
                let out = mutate_point(v, c, &spec).unwrap();
                assert!(out >= prev - 1e-12, "v={v} c={c}");
                assert!((spec.r_min..=spec.r_max).contains(&out));
                prev = out;
            }
        }
    }

    fn flat_case(spec: &SignalSpec, v: f64) -> TestCase {
        TestCase::new(
            "flat",
            Trajectory::new(spec.clone(), vec![v; spec.n_samples()]).unwrap(),
        )
    }

    fn uniform_metrics(case: &TestCase, e: f64) -> MetricSeries {
        let n = case.input.len();
        MetricSeries {
            case_id: case.id.clone(),
            effectiveness: vec![e; n],
            input_diversity: vec![0.0; n],
            output_diversity: vec![0.0; n],
        }
    }

    #[test]
    fn empty_selection_gives_empty_plan_and_identity() {
        let spec = fuel_spec();
        let case = flat_case(&spec, 2.0);
        let metrics = uniform_metrics(&case, 0.3);
        let selection = Selection::zeros(case.input.len());
        let plan = plan_mutations(&case, &selection, &metrics, 50, 100).unwrap();
        assert!(plan.points.is_empty());
        let out = apply_mutations(&case, &plan).unwrap();
        assert_eq!(out, case);
    }

    #[test]
    fn edge_index_plans_with_clamped_window() {
        let spec = fuel_spec();
        let case = flat_case(&spec, 2.0);
        let metrics = uniform_metrics(&case, 0.3);
        let selection = Selection::from_indices(case.input.len(), &[0]);
        let plan = plan_mutations(&case, &selection, &metrics, 50, 100).unwrap();
        assert_eq!(plan.points.len(), 1);
        assert_eq!(plan.points[0].correlation, 0.0);
    }

    #[test]
    fn single_mutation_is_local_and_exact() {
        let spec = fuel_spec();
        let case = flat_case(&spec, 2.0);
        let plan = MutationPlan {
            case_id: case.id.clone(),
            points: vec![PlannedPoint {
                index: 500,
                correlation: 1.0,
                mutated_value: 5.0,
            }],
            smoothing_radius: 100,
        };
        let out = apply_mutations(&case, &plan).unwrap();
        assert!((out.input.values[500] - 5.0).abs() < 1e-9);
        for k in 0..out.input.len() {
            if !(400..=600).contains(&k) {
                assert_eq!(out.input.values[k], case.input.values[k], "index {k}");
            }
        }
        assert!(out.provenance.is_empty());
    }

    #[test]
    fn infeasible_mutation_is_pulled_and_recorded() {
        // Rate 1.0 over radius 100 at dt 0.01 reaches only +/- 1.0 from the
        // boundary; a jump from 0 to 5 needs 5x that.
        let spec = SignalSpec::new("s", 0.0, 5.0, 1.0, 10.0, 0.01).unwrap();
        let case = flat_case(&spec, 0.0);
        let plan = MutationPlan {
            case_id: case.id.clone(),
            points: vec![PlannedPoint {
                index: 500,
                correlation: 1.0,
                mutated_value: 5.0,
            }],
            smoothing_radius: 100,
        };
        let out = apply_mutations(&case, &plan).unwrap();
        assert!((out.input.values[500] - 1.0).abs() < 1e-9);
        assert_eq!(out.provenance.len(), 1);
        Trajectory::new(spec, out.input.values.clone()).unwrap();
    }

    #[test]
    fn edge_mutation_keeps_invariants() {
        let spec = SignalSpec::new("s", 0.0, 5.0, 2.0, 10.0, 0.01).unwrap();
        let case = flat_case(&spec, 1.0);
        for index in [0usize, 1000] {
            let plan = MutationPlan {
                case_id: case.id.clone(),
                points: vec![PlannedPoint {
                    index,
                    correlation: 1.0,
                    mutated_value: 5.0,
                }],
                smoothing_radius: 100,
            };
            let out = apply_mutations(&case, &plan).unwrap();
            Trajectory::new(spec.clone(), out.input.values.clone()).unwrap();
        }
    }

    #[test]
    fn thousand_seeded_mutations_stay_valid_and_local() {
        let spec = SignalSpec::new("pedal", 0.0, 1.0, 0.5, 5.0, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let radius = 40;
        for round in 0..1000u64 {
            let suite = generate_suite(&spec, 1, 5, &mut rng).unwrap();
            let case = &suite.cases[0];
            let n = case.input.len();
            use rand::Rng;
            let index = rng.gen_range(0..n);
            let c = rng.gen_range(-1.0..=1.0);
            let mutated_value = mutate_point(case.input.values[index], c, &spec).unwrap();
            let plan = MutationPlan {
                case_id: case.id.clone(),
                points: vec![PlannedPoint {
                    index,
                    correlation: c,
                    mutated_value,
                }],
                smoothing_radius: radius,
            };
            let out = apply_mutations(case, &plan).unwrap();
            Trajectory::new(spec.clone(), out.input.values.clone())
                .unwrap_or_else(|e| panic!("round {round}: {e}"));
            for k in 0..n {
                if k + radius < index || k > index + radius {
                    assert_eq!(out.input.values[k], case.input.values[k]);
                }
            }
        }
    }
}
