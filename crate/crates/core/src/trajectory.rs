//! Seed test case generation: bounded, rate-limited trajectories built from
//! random control points joined by monotone piecewise-cubic interpolation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance slack applied to the per-step rate invariant.
pub const RATE_SLACK: f64 = 1e-9;

/// Static description of one signal: range, rate limit, and sample grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub name: String,
    pub r_min: f64,
    pub r_max: f64,
    pub max_rate: f64,
    pub duration: f64,
    pub sample_period: f64,
}

impl SignalSpec {
    pub fn new(
        name: &str,
        r_min: f64,
        r_max: f64,
        max_rate: f64,
        duration: f64,
        sample_period: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.to_string(),
            r_min,
            r_max,
            max_rate,
            duration,
            sample_period,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min < self.r_max) {
            return Err(Error::Spec(format!(
                "r_min ({}) must be < r_max ({})",
                self.r_min, self.r_max
            )));
        }
        if !(self.max_rate >= 0.0) {
            return Err(Error::Spec(format!("max_rate must be >= 0, got {}", self.max_rate)));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Spec(format!("duration must be > 0, got {}", self.duration)));
        }
        if !(self.sample_period > 0.0) {
            return Err(Error::Spec(format!(
                "sample_period must be > 0, got {}",
                self.sample_period
            )));
        }
        let steps = self.duration / self.sample_period;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Spec(format!(
                "duration {} is not an integer multiple of sample_period {}",
                self.duration, self.sample_period
            )));
        }
        Ok(())
    }

    /// Number of sample instants, including both t=0 and t=duration.
    pub fn n_samples(&self) -> usize {
        (self.duration / self.sample_period).round() as usize + 1
    }

    /// Range width r_max - r_min.
    pub fn range(&self) -> f64 {
        self.r_max - self.r_min
    }

    /// Largest permitted per-step value change.
    pub fn max_step(&self) -> f64 {
        self.max_rate * self.sample_period
    }
}

/// A uniformly sampled, bounded, rate-limited time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spec: SignalSpec,
    pub values: Vec<f64>,
}

impl Trajectory {
    /// Construct a trajectory, validating all invariants.
    pub fn new(spec: SignalSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.n_samples() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                spec.n_samples(),
                values.len()
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < spec.r_min || v > spec.r_max {
                return Err(Error::Spec(format!(
                    "value {v} at index {k} outside [{}, {}]",
                    spec.r_min, spec.r_max
                )));
            }
        }
        let max_step = spec.max_step() + RATE_SLACK;
        for k in 0..values.len().saturating_sub(1) {
            let dv = (values[k + 1] - values[k]).abs();
            if dv > max_step {
                return Err(Error::RateInfeasible {
                    t0: k as f64 * spec.sample_period,
                    v0: values[k],
                    t1: (k + 1) as f64 * spec.sample_period,
                    v1: values[k + 1],
                    max_rate: spec.max_rate,
                });
            }
        }
        Ok(Self { spec, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values at indices [center-radius, center+radius], clamped at the
    /// trajectory boundaries (shorter slices near the edges).
    pub fn slice(&self, center_index: usize, radius: usize) -> &[f64] {
        let (lo, hi) = slice_bounds(self.len(), center_index, radius);
        &self.values[lo..hi]
    }
}

/// Clamped window bounds [lo, hi) around a center index.
pub fn slice_bounds(len: usize, center_index: usize, radius: usize) -> (usize, usize) {
    assert!(center_index < len, "center_index {center_index} out of range {len}");
    let lo = center_index.saturating_sub(radius);
    let hi = (center_index + radius + 1).min(len);
    (lo, hi)
}

/// One test case: the designated mutable input plus any auxiliary inputs
/// held constant across mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub input: Trajectory,
    #[serde(default)]
    pub fixed_inputs: std::collections::BTreeMap<String, Trajectory>,
    /// Feasibility adjustments recorded during mutation embedding.
    #[serde(default)]
    pub provenance: Vec<String>,
}

impl TestCase {
    pub fn new(id: &str, input: Trajectory) -> Self {
        Self {
            id: id.to_string(),
            input,
            fixed_inputs: Default::default(),
            provenance: Vec::new(),
        }
    }
}

/// An ordered collection of test cases sharing signal specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSuite {
    pub cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(cases: Vec<TestCase>) -> Result<Self> {
        if let Some(first) = cases.first() {
            let spec = &first.input.spec;
            let mut seen = std::collections::BTreeSet::new();
            for case in &cases {
                if case.input.spec != *spec {
                    return Err(Error::Spec(format!(
                        "case '{}' does not share the suite signal spec",
                        case.id
                    )));
                }
                if !seen.insert(case.id.clone()) {
                    return Err(Error::Spec(format!("duplicate case id '{}'", case.id)));
                }
            }
        }
        Ok(Self { cases })
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

/// Generate rate-feasible control points on the sample grid, spanning
/// [0, duration] with the first point at t=0 and the last at t=duration.
pub fn generate_control_points<R: Rng + ?Sized>(
    spec: &SignalSpec,
    n_points: usize,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let n = spec.n_samples();
    if n_points < 2 {
        return Err(Error::Spec(format!("need at least 2 control points, got {n_points}")));
    }
    if n_points > n {
        return Err(Error::Spec(format!(
            "n_points {n_points} exceeds {n} sample instants"
        )));
    }

    // Distinct grid indices, endpoints forced.
    let mut indices = std::collections::BTreeSet::new();
    indices.insert(0usize);
    indices.insert(n - 1);
    while indices.len() < n_points {
        indices.insert(rng.gen_range(1..n - 1));
    }
    let indices: Vec<usize> = indices.into_iter().collect();

    // Values sampled sequentially inside the rate-reachable band.
    let mut points = Vec::with_capacity(n_points);
    let mut prev_v = rng.gen_range(spec.r_min..=spec.r_max);
    let mut prev_idx = indices[0];
    points.push((0.0, prev_v));
    for &idx in &indices[1..] {
        let dt = (idx - prev_idx) as f64 * spec.sample_period;
        let reach = spec.max_rate * dt;
        let lo = (prev_v - reach).max(spec.r_min);
        let hi = (prev_v + reach).min(spec.r_max);
        let v = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        points.push((idx as f64 * spec.sample_period, v));
        prev_v = v;
        prev_idx = idx;
    }
    Ok(points)
}

/// Fit a monotone piecewise-cubic trajectory through the control points.
///
/// The interpolant passes through every control point (snapped to the
/// nearest sample instant), never overshoots the segment endpoint values,
/// and a per-segment derivative cap keeps the instantaneous slope within
/// the signal's rate limit.
pub fn fit_trajectory(points: &[(f64, f64)], spec: &SignalSpec) -> Result<Trajectory> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::Spec("need at least 2 control points".into()));
    }
    let n = spec.n_samples();

    // Snap control times to grid indices.
    let mut knots: Vec<(usize, f64)> = Vec::with_capacity(points.len());
    for &(t, v) in points {
        let idx = (t / spec.sample_period).round() as usize;
        if idx >= n {
            return Err(Error::Spec(format!("control time {t} beyond duration")));
        }
        if v < spec.r_min - 1e-12 || v > spec.r_max + 1e-12 {
            return Err(Error::Spec(format!("control value {v} out of range")));
        }
        knots.push((idx, v.clamp(spec.r_min, spec.r_max)));
    }
    for w in knots.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Spec("control points must have strictly increasing times".into()));
        }
        let dt = (w[1].0 - w[0].0) as f64 * spec.sample_period;
        let dv = (w[1].1 - w[0].1).abs();
        if dv > spec.max_rate * dt + RATE_SLACK {
            return Err(Error::RateInfeasible {
                t0: w[0].0 as f64 * spec.sample_period,
                v0: w[0].1,
                t1: w[1].0 as f64 * spec.sample_period,
                v1: w[1].1,
                max_rate: spec.max_rate,
            });
        }
    }
    if knots[0].0 != 0 || knots.last().unwrap().0 != n - 1 {
        return Err(Error::Spec("control points must span [0, duration]".into()));
    }

    let m = knots.len();
    let h: Vec<f64> = (0..m - 1)
        .map(|k| (knots[k + 1].0 - knots[k].0) as f64 * spec.sample_period)
        .collect();
    let secant: Vec<f64> = (0..m - 1).map(|k| (knots[k + 1].1 - knots[k].1) / h[k]).collect();

    // Fritsch-Butland knot derivatives: zero at extrema, weighted harmonic
    // mean elsewhere. Guarantees segment-wise monotonicity.
    let mut deriv = vec![0.0f64; m];
    deriv[0] = secant[0];
    deriv[m - 1] = secant[m - 2];
    for k in 1..m - 1 {
        let (s0, s1) = (secant[k - 1], secant[k]);
        if s0 * s1 <= 0.0 {
            deriv[k] = 0.0;
        } else {
            let w0 = 2.0 * h[k] + h[k - 1];
            let w1 = h[k] + 2.0 * h[k - 1];
            deriv[k] = (w0 + w1) / (w0 / s0 + w1 / s1);
        }
    }
    for d in &mut deriv {
        *d = d.clamp(-spec.max_rate, spec.max_rate);
    }

    let mut values = vec![0.0f64; n];
    for k in 0..m - 1 {
        let (i0, y0) = knots[k];
        let (i1, y1) = knots[k + 1];
        let s = secant[k];
        // Per-segment derivatives; a flat segment stays exactly flat.
        let (mut d0, mut d1) = if s == 0.0 {
            (0.0, 0.0)
        } else {
            let d0 = if deriv[k] * s > 0.0 { deriv[k] } else { 0.0 };
            let d1 = if deriv[k + 1] * s > 0.0 { deriv[k + 1] } else { 0.0 };
            (d0, d1)
        };
        // Shrink derivatives toward the secant until the cubic's slope
        // stays within the rate limit everywhere on the segment.
        if segment_max_slope(d0, d1, s) > spec.max_rate + RATE_SLACK {
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let c0 = s + mid * (d0 - s);
                let c1 = s + mid * (d1 - s);
                if segment_max_slope(c0, c1, s) <= spec.max_rate + RATE_SLACK {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            d0 = s + lo * (d0 - s);
            d1 = s + lo * (d1 - s);
        }
        let width = h[k];
        for i in i0..=i1 {
            let tau = (i - i0) as f64 * spec.sample_period / width;
            values[i] = hermite(y0, y1, d0 * width, d1 * width, tau)
                .clamp(y0.min(y1), y0.max(y1));
        }
    }

    Trajectory::new(spec.clone(), values)
}

/// Cubic Hermite basis on tau in [0,1] with scaled tangents m0, m1.
fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, tau: f64) -> f64 {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + m0 * (t3 - 2.0 * t2 + tau)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + m1 * (t3 - t2)
}

/// Maximum |slope| of the Hermite cubic with end derivatives d0, d1 and
/// secant s, over the whole segment (slope is quadratic in tau).
fn segment_max_slope(d0: f64, d1: f64, s: f64) -> f64 {
    let a = 3.0 * (d0 + d1) - 6.0 * s;
    let b = -4.0 * d0 - 2.0 * d1 + 6.0 * s;
    let c = d0;
    let mut max = c.abs().max((a + b + c).abs());
    if a.abs() > 0.0 {
        let vertex = -b / (2.0 * a);
        if (0.0..=1.0).contains(&vertex) {
            max = max.max((a * vertex * vertex + b * vertex + c).abs());
        }
    }
    max
}

/// Generate a suite of valid seed test cases, deterministic per rng seed.
pub fn generate_suite<R: Rng + ?Sized>(
    spec: &SignalSpec,
    suite_size: usize,
    n_points: usize,
    rng: &mut R,
) -> Result<TestSuite> {
    if suite_size < 1 {
        return Err(Error::Spec("suite_size must be >= 1".into()));
    }
    let mut cases = Vec::with_capacity(suite_size);
    for i in 0..suite_size {
        let points = generate_control_points(spec, n_points, rng)?;
        let traj = fit_trajectory(&points, spec)?;
        cases.push(TestCase::new(&format!("case-{i:03}"), traj));
    }
    TestSuite::new(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec01() -> SignalSpec {
        SignalSpec::new("pedal", 0.0, 1.0, 10.0, 10.0, 0.01).unwrap()
    }

    #[test]
    fn rejects_invalid_spec() {
        assert!(SignalSpec::new("s", 1.0, 0.0, 1.0, 1.0, 0.1).is_err());
        assert!(SignalSpec::new("s", 0.0, 1.0, 1.0, -1.0, 0.1).is_err());
        assert!(SignalSpec::new("s", 0.0, 1.0, 1.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn two_point_boundaries() {
        let spec = spec01();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = generate_control_points(&spec, 2, &mut rng).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].0, 0.0);
        assert_eq!(pts[1].0, 10.0);
        for &(_, v) in &pts {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn zero_rate_forces_constant() {
        let spec = SignalSpec::new("s", 0.0, 1.0, 0.0, 10.0, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = generate_control_points(&spec, 5, &mut rng).unwrap();
        let v0 = pts[0].1;
        for &(_, v) in &pts {
            assert_eq!(v, v0);
        }
        let traj = fit_trajectory(&pts, &spec).unwrap();
        assert!(traj.values.iter().all(|&v| v == v0));
    }

    #[test]
    fn endpoint_rate_bound_direct() {
        let spec = SignalSpec::new("s", 0.0, 5.0, 0.1, 10.0, 0.01).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = generate_control_points(&spec, 2, &mut rng).unwrap();
            // max_rate * duration = 1.0
            assert!((pts[1].1 - pts[0].1).abs() <= 1.0 + RATE_SLACK);
        }
    }

    #[test]
    fn flat_pair_gives_constant() {
        let spec = spec01();
        let traj = fit_trajectory(&[(0.0, 0.2), (10.0, 0.2)], &spec).unwrap();
        assert!(traj.values.iter().all(|&v| (v - 0.2).abs() < 1e-12));
    }

    #[test]
    fn monotone_segment_no_overshoot() {
        let spec = spec01();
        let traj = fit_trajectory(&[(0.0, 0.0), (5.0, 1.0), (10.0, 1.0)], &spec).unwrap();
        let mid = (5.0f64 / 0.01).round() as usize;
        for k in 0..mid {
            assert!(traj.values[k + 1] >= traj.values[k] - 1e-12);
        }
        assert!((traj.values[0]).abs() < 1e-9);
        assert!((traj.values[mid] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn passes_through_control_points() {
        let spec = spec01();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let pts = generate_control_points(&spec, 10, &mut rng).unwrap();
            let traj = fit_trajectory(&pts, &spec).unwrap();
            for &(t, v) in &pts {
                let idx = (t / spec.sample_period).round() as usize;
                assert!(
                    (traj.values[idx] - v).abs() < 1e-6,
                    "control point at t={t} missed: {} vs {v}",
                    traj.values[idx]
                );
            }
        }
    }

    #[test]
    fn fitted_trajectories_respect_rate_bound() {
        // Tight rate so the derivative cap actually engages.
        let spec = SignalSpec::new("s", 0.0, 1.0, 0.3, 10.0, 0.01).unwrap();
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = generate_control_points(&spec, 8, &mut rng).unwrap();
            let traj = fit_trajectory(&pts, &spec).unwrap();
            let max_step = spec.max_step() + RATE_SLACK;
            for w in traj.values.windows(2) {
                assert!((w[1] - w[0]).abs() <= max_step);
            }
        }
    }

    #[test]
    fn infeasible_pair_names_the_pair() {
        let spec = SignalSpec::new("s", 0.0, 5.0, 0.01, 10.0, 0.01).unwrap();
        let err = fit_trajectory(&[(0.0, 0.0), (10.0, 5.0)], &spec).unwrap_err();
        match err {
            Error::RateInfeasible { t0, t1, .. } => {
                assert_eq!(t0, 0.0);
                assert_eq!(t1, 10.0);
            }
            other => panic!("expected RateInfeasible, got {other:?}"),
        }
    }

    #[test]
    fn refit_is_idempotent() {
        let spec = spec01();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = generate_control_points(&spec, 10, &mut rng).unwrap();
        let traj = fit_trajectory(&pts, &spec).unwrap();
        let all_points: Vec<(f64, f64)> = traj
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| (k as f64 * spec.sample_period, v))
            .collect();
        let refit = fit_trajectory(&all_points, &spec).unwrap();
        for (a, b) in traj.values.iter().zip(&refit.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn suite_generation_is_deterministic() {
        let spec = spec01();
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        let s1 = generate_suite(&spec, 3, 10, &mut r1).unwrap();
        let s2 = generate_suite(&spec, 3, 10, &mut r2).unwrap();
        assert_eq!(s1, s2);
        let ids: std::collections::BTreeSet<_> = s1.cases.iter().map(|c| &c.id).collect();
        assert_eq!(ids.len(), 3);
    }

    #[test]
    fn suite_of_fifty_satisfies_invariants() {
        let spec = spec01();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let suite = generate_suite(&spec, 50, 10, &mut rng).unwrap();
        assert_eq!(suite.len(), 50);
        for case in &suite.cases {
            // Trajectory::new re-validates; round-trip must succeed.
            Trajectory::new(spec.clone(), case.input.values.clone()).unwrap();
        }
    }

    #[test]
    fn slice_clamps_at_boundaries() {
        let spec = spec01();
        let traj = fit_trajectory(&[(0.0, 0.2), (10.0, 0.2)], &spec).unwrap();
        assert_eq!(traj.slice(5, 0).len(), 1);
        assert_eq!(traj.slice(0, 3).len(), 4);
        assert_eq!(traj.slice(50, 3).len(), 7);
    }
}
