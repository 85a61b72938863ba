//! Per-data-point adequacy metrics: effectiveness, input diversity, and
//! output diversity, all normalised into [0,1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{slice_bounds, SignalSpec, TestSuite, Trajectory};

/// The three adequacy series for one test case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub case_id: String,
    pub effectiveness: Vec<f64>,
    pub input_diversity: Vec<f64>,
    pub output_diversity: Vec<f64>,
}

impl MetricSeries {
    pub fn len(&self) -> usize {
        self.effectiveness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effectiveness.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.effectiveness.len();
        if self.input_diversity.len() != n || self.output_diversity.len() != n {
            return Err(Error::Shape("metric series lengths differ".into()));
        }
        for series in [&self.effectiveness, &self.input_diversity, &self.output_diversity] {
            if series.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Shape("metric value outside [0,1]".into()));
            }
        }
        Ok(())
    }

    /// Tabular export mirroring the per-case metric table layout:
    /// index, effectiveness, input_diversity, output_diversity.
    pub fn to_table(&self) -> String {
        let mut out = String::from("index,effectiveness,input_diversity,output_diversity\n");
        for k in 0..self.len() {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6}\n",
                k, self.effectiveness[k], self.input_diversity[k], self.output_diversity[k]
            ));
        }
        out
    }
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Pointwise effectiveness: min-max normalised distance between observed
/// and expected outputs, clamped into [0,1].
pub fn effectiveness_series(
    observed: &Trajectory,
    expected: &Trajectory,
    spec: &SignalSpec,
) -> Result<Vec<f64>> {
    if observed.len() != expected.len() {
        return Err(Error::Shape(format!(
            "observed has {} samples, expected has {}",
            observed.len(),
            expected.len()
        )));
    }
    Ok(observed
        .values
        .iter()
        .zip(&expected.values)
        .map(|(o, e)| clamp01(((o - e).abs() - spec.r_min) / spec.range()))
        .collect())
}

/// Normalised Euclidean distance between two equal-length slices.
pub fn slice_distance(s1: &[f64], s2: &[f64], window_len: usize, spec: &SignalSpec) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Shape("empty slice".into()));
    }
    if s1.len() != window_len || s2.len() != window_len {
        return Err(Error::Shape(format!(
            "slice lengths {} / {} do not match window_len {window_len}",
            s1.len(),
            s2.len()
        )));
    }
    let sum_sq: f64 = s1.iter().zip(s2).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(clamp01(sum_sq.sqrt() / ((window_len as f64).sqrt() * spec.range())))
}

fn min_slice_distance_series(
    trajectories: &[&Trajectory],
    case_index: usize,
    radius: usize,
    spec: &SignalSpec,
) -> Result<Vec<f64>> {
    if trajectories.len() < 2 {
        return Err(Error::InsufficientData(
            "diversity needs at least 2 cases".into(),
        ));
    }
    if case_index >= trajectories.len() {
        return Err(Error::Shape(format!("case index {case_index} out of range")));
    }
    let subject = trajectories[case_index];
    let n = subject.len();
    let mut series = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = slice_bounds(n, k, radius);
        let window_len = hi - lo;
        let s1 = &subject.values[lo..hi];
        let mut min_d = f64::INFINITY;
        for (j, other) in trajectories.iter().enumerate() {
            if j == case_index {
                continue;
            }
            let s2 = &other.values[lo..hi];
            let d = slice_distance(s1, s2, window_len, spec)?;
            min_d = min_d.min(d);
        }
        series.push(min_d);
    }
    Ok(series)
}

/// Input diversity: per index, the minimum slice distance from this case's
/// window to the corresponding windows of every other case.
pub fn input_diversity_series(
    suite: &TestSuite,
    case_index: usize,
    radius: usize,
) -> Result<Vec<f64>> {
    let trajectories: Vec<&Trajectory> = suite.cases.iter().map(|c| &c.input).collect();
    let spec = suite
        .cases
        .first()
        .map(|c| c.input.spec.clone())
        .ok_or_else(|| Error::InsufficientData("empty suite".into()))?;
    min_slice_distance_series(&trajectories, case_index, radius, &spec)
}

/// Output diversity: the same contract applied to output trajectories.
pub fn output_diversity_series(
    outputs: &[Trajectory],
    case_index: usize,
    radius: usize,
) -> Result<Vec<f64>> {
    let refs: Vec<&Trajectory> = outputs.iter().collect();
    let spec = outputs
        .first()
        .map(|t| t.spec.clone())
        .ok_or_else(|| Error::InsufficientData("no outputs".into()))?;
    min_slice_distance_series(&refs, case_index, radius, &spec)
}

/// Collect all three series for one case of an executed suite.
pub fn collect_metrics(
    suite: &TestSuite,
    outputs_observed: &[Trajectory],
    outputs_expected: &[Trajectory],
    case_index: usize,
    radius: usize,
    output_spec: &SignalSpec,
) -> Result<MetricSeries> {
    let case = &suite.cases[case_index];
    let series = MetricSeries {
        case_id: case.id.clone(),
        effectiveness: effectiveness_series(
            &outputs_observed[case_index],
            &outputs_expected[case_index],
            output_spec,
        )?,
        input_diversity: input_diversity_series(suite, case_index, radius)?,
        output_diversity: output_diversity_series(outputs_observed, case_index, radius)?,
    };
    series.validate()?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{fit_trajectory, SignalSpec, TestCase, TestSuite};

    fn fuel_spec() -> SignalSpec {
        SignalSpec::new("fuel", 0.0, 5.0, 1000.0, 1.0, 0.01).unwrap()
    }

    fn constant(spec: &SignalSpec, v: f64) -> Trajectory {
        Trajectory::new(spec.clone(), vec![v; spec.n_samples()]).unwrap()
    }

    #[test]
    fn identical_trajectories_give_zero_effectiveness() {
        let spec = fuel_spec();
        let t = constant(&spec, 2.5);
        let e = effectiveness_series(&t, &t, &spec).unwrap();
        assert!(e.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn running_example_offset_is_004() {
        // The 0.2 mL deviation of the running example on range [0,5].
        let spec = fuel_spec();
        let observed = constant(&spec, 2.7);
        let expected = constant(&spec, 2.5);
        let e = effectiveness_series(&observed, &expected, &spec).unwrap();
        for v in e {
            assert!((v - 0.04).abs() < 1e-12);
        }
    }

    #[test]
    fn full_range_deviation_is_one() {
        let spec = fuel_spec();
        let observed = constant(&spec, 5.0);
        let expected = constant(&spec, 0.0);
        let e = effectiveness_series(&observed, &expected, &spec).unwrap();
        assert!(e.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn effectiveness_is_symmetric_in_arguments() {
        let spec = fuel_spec();
        let a = constant(&spec, 1.0);
        let b = constant(&spec, 3.2);
        assert_eq!(
            effectiveness_series(&a, &b, &spec).unwrap(),
            effectiveness_series(&b, &a, &spec).unwrap()
        );
    }

    #[test]
    fn slice_distance_extremes() {
        let spec = fuel_spec();
        let a = vec![5.0; 7];
        let b = vec![0.0; 7];
        assert!((slice_distance(&a, &b, 7, &spec).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(slice_distance(&a, &a, 7, &spec).unwrap(), 0.0);
    }

    #[test]
    fn single_point_half_range_is_half() {
        let spec = fuel_spec();
        let d = slice_distance(&[0.0], &[2.5], 1, &spec).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn slice_distance_is_symmetric() {
        let spec = fuel_spec();
        let a = vec![0.1, 0.5, 2.0];
        let b = vec![4.0, 0.0, 1.5];
        assert_eq!(
            slice_distance(&a, &b, 3, &spec).unwrap(),
            slice_distance(&b, &a, 3, &spec).unwrap()
        );
    }

    #[test]
    fn empty_slices_are_rejected() {
        let spec = fuel_spec();
        assert!(slice_distance(&[], &[], 0, &spec).is_err());
    }

    fn suite_of(values: &[f64]) -> TestSuite {
        let spec = SignalSpec::new("in", 0.0, 1.0, 1000.0, 1.0, 0.01).unwrap();
        let cases = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                TestCase::new(
                    &format!("c{i}"),
                    Trajectory::new(spec.clone(), vec![v; spec.n_samples()]).unwrap(),
                )
            })
            .collect();
        TestSuite::new(cases).unwrap()
    }

    #[test]
    fn duplicate_case_gives_zero_diversity() {
        let suite = suite_of(&[0.3, 0.3, 0.8]);
        let d = input_diversity_series(&suite, 0, 5).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn opposite_rails_give_one() {
        let suite = suite_of(&[1.0, 0.0]);
        for idx in 0..2 {
            let d = input_diversity_series(&suite, idx, 5).unwrap();
            assert!(d.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn three_case_min_matches_brute_force() {
        let spec = SignalSpec::new("in", 0.0, 1.0, 10.0, 1.0, 0.01).unwrap();
        let mk = |pts: &[(f64, f64)]| fit_trajectory(pts, &spec).unwrap();
        let t0 = mk(&[(0.0, 0.1), (1.0, 0.9)]);
        let t1 = mk(&[(0.0, 0.5), (1.0, 0.5)]);
        let t2 = mk(&[(0.0, 0.9), (1.0, 0.0)]);
        let suite = TestSuite::new(vec![
            TestCase::new("a", t0.clone()),
            TestCase::new("b", t1.clone()),
            TestCase::new("c", t2.clone()),
        ])
        .unwrap();
        let radius = 4;
        let d = input_diversity_series(&suite, 0, radius).unwrap();
        for &k in &[0usize, 13, 27, 42, 55, 60, 77, 88, 94, 100] {
            let (lo, hi) = slice_bounds(t0.len(), k, radius);
            let w = hi - lo;
            let d01 = slice_distance(&t0.values[lo..hi], &t1.values[lo..hi], w, &spec).unwrap();
            let d02 = slice_distance(&t0.values[lo..hi], &t2.values[lo..hi], w, &spec).unwrap();
            assert!((d[k] - d01.min(d02)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_case_suite_is_insufficient() {
        let suite = suite_of(&[0.5]);
        assert!(matches!(
            input_diversity_series(&suite, 0, 5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn output_diversity_is_order_invariant() {
        let spec = fuel_spec();
        let outs = vec![constant(&spec, 0.0), constant(&spec, 2.0), constant(&spec, 4.5)];
        let permuted = vec![outs[0].clone(), outs[2].clone(), outs[1].clone()];
        assert_eq!(
            output_diversity_series(&outs, 0, 3).unwrap(),
            output_diversity_series(&permuted, 0, 3).unwrap()
        );
    }

    #[test]
    fn adding_a_case_never_increases_diversity() {
        let small = suite_of(&[0.1, 0.9]);
        let large = suite_of(&[0.1, 0.9, 0.4]);
        let d_small = input_diversity_series(&small, 0, 5).unwrap();
        let d_large = input_diversity_series(&large, 0, 5).unwrap();
        for (s, l) in d_small.iter().zip(&d_large) {
            assert!(l <= s);
        }
    }
}
