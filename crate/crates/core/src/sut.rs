//! Desk-scale plants with fault injection and an epsilon-conformance
//! oracle: an engine pedal-to-fuel map and a first-order tracker, each
//! perturbable by one fault operator at a time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::trajectory::{SignalSpec, TestCase, Trajectory};

/// The base plant dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlantKind {
    /// out = clamp(gain * pedal, 0, gain); nominal gain 5 (mL at full pedal).
    EngineMap { gain: f64 },
    /// out[k+1] = out[k] + (dt/tau) * (gain * in[k] - out[k]), out[0] = 0.
    FirstOrderTracker { tau: f64, gain: f64 },
}

/// Parameter a fault operator may target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamTarget {
    Gain,
    Tau,
}

/// Which clamp comparison a logical replacement flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClampSite {
    Lower,
    Upper,
}

/// Exactly one fault operator per spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FaultOperator {
    /// Shift the output right by k samples, zero-padding the head.
    Delay { samples: usize },
    /// Add seeded Gaussian noise to every output sample.
    Noise { sigma: f64, seed: u64 },
    /// Hold a fixed value over [start, start + len).
    ValueDrop { start: usize, len: usize, held: f64 },
    /// Scale a named parameter (gain 5 -> 5.2 is scale 1.04).
    ArithmeticReplacement { param: ParamTarget, scale: f64 },
    /// Flip one clamp comparison in the output limiter.
    LogicalReplacement { site: ClampSite },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub id: String,
    pub operator: FaultOperator,
}

impl FaultSpec {
    /// True for faults that perturb the gain parameter.
    pub fn is_gain_fault(&self) -> bool {
        matches!(
            self.operator,
            FaultOperator::ArithmeticReplacement {
                param: ParamTarget::Gain,
                ..
            }
        )
    }
}

/// A plant, optionally wrapped with one injected fault.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantModel {
    pub kind: PlantKind,
    pub fault: Option<FaultSpec>,
}

impl PlantModel {
    pub fn new(kind: PlantKind) -> Result<Self> {
        match &kind {
            PlantKind::EngineMap { gain } => {
                if !(*gain > 0.0) {
                    return Err(Error::Config(format!("engine gain must be > 0, got {gain}")));
                }
            }
            PlantKind::FirstOrderTracker { tau, gain } => {
                if !(*tau > 0.0) || !(*gain > 0.0) {
                    return Err(Error::Config(format!(
                        "tracker needs tau > 0 and gain > 0, got tau={tau}, gain={gain}"
                    )));
                }
            }
        }
        Ok(Self { kind, fault: None })
    }

    /// The running-example engine: 5 mL of fuel at full pedal.
    pub fn engine() -> Self {
        Self::new(PlantKind::EngineMap { gain: 5.0 }).unwrap()
    }

    pub fn tracker(tau: f64, gain: f64) -> Result<Self> {
        Self::new(PlantKind::FirstOrderTracker { tau, gain })
    }

    fn effective_gain(&self) -> f64 {
        let base = match self.kind {
            PlantKind::EngineMap { gain } => gain,
            PlantKind::FirstOrderTracker { gain, .. } => gain,
        };
        match &self.fault {
            Some(FaultSpec {
                operator:
                    FaultOperator::ArithmeticReplacement {
                        param: ParamTarget::Gain,
                        scale,
                    },
                ..
            }) => base * scale,
            _ => base,
        }
    }

    fn effective_tau(&self) -> Option<f64> {
        let PlantKind::FirstOrderTracker { tau, .. } = self.kind else {
            return None;
        };
        Some(match &self.fault {
            Some(FaultSpec {
                operator:
                    FaultOperator::ArithmeticReplacement {
                        param: ParamTarget::Tau,
                        scale,
                    },
                ..
            }) => tau * scale,
            _ => tau,
        })
    }

    /// Output bounds for an input signal range, wide enough for every fault
    /// variant of this model.
    pub fn output_spec(&self, input: &SignalSpec) -> Result<SignalSpec> {
        let gain = self.effective_gain();
        let lo = (gain * input.r_min).min(0.0);
        let hi = (gain * input.r_max).max(0.0).max(lo + 1e-9);
        let name = match self.kind {
            PlantKind::EngineMap { .. } => "fuel",
            PlantKind::FirstOrderTracker { .. } => "tracked",
        };
        // One full range per step is the worst case after clamping, so
        // every fault variant's output forms a valid trajectory.
        let max_rate = (hi - lo) / input.sample_period;
        SignalSpec::new(name, lo, hi, max_rate, input.duration, input.sample_period)
    }
}

/// Wrap a plant with one fault, checking applicability.
pub fn apply_fault(model: &PlantModel, fault: &FaultSpec) -> Result<PlantModel> {
    if model.fault.is_some() {
        return Err(Error::Config(
            "one fault at a time: the model already carries a fault".into(),
        ));
    }
    match &fault.operator {
        FaultOperator::ArithmeticReplacement {
            param: ParamTarget::Tau,
            ..
        } if !matches!(model.kind, PlantKind::FirstOrderTracker { .. }) => {
            return Err(Error::Config(format!(
                "fault '{}' targets tau, which the engine map does not have",
                fault.id
            )));
        }
        FaultOperator::Noise { sigma, .. } if *sigma < 0.0 => {
            return Err(Error::Config(format!("fault '{}': sigma must be >= 0", fault.id)));
        }
        FaultOperator::ArithmeticReplacement { scale, .. } if !(*scale > 0.0) => {
            return Err(Error::Config(format!("fault '{}': scale must be > 0", fault.id)));
        }
        _ => {}
    }
    Ok(PlantModel {
        kind: model.kind.clone(),
        fault: Some(fault.clone()),
    })
}

fn clamp_with_site(raw: f64, lo: f64, hi: f64, flipped: Option<ClampSite>) -> f64 {
    match flipped {
        // Flipped lower comparison: values above the floor get floored.
        Some(ClampSite::Lower) => {
            if raw > lo {
                lo
            } else {
                raw
            }
        }
        // Flipped upper comparison: values below the ceiling get railed.
        Some(ClampSite::Upper) => {
            if raw < hi {
                hi
            } else {
                raw
            }
        }
        None => raw.clamp(lo, hi),
    }
}

/// Run the plant over a test case's input trajectory.
pub fn simulate(model: &PlantModel, case: &TestCase) -> Result<Trajectory> {
    let input = &case.input;
    let out_spec = model.output_spec(&input.spec)?;
    let gain = model.effective_gain();
    let flipped = match &model.fault {
        Some(FaultSpec {
            operator: FaultOperator::LogicalReplacement { site },
            ..
        }) => Some(*site),
        _ => None,
    };

    let mut values: Vec<f64> = match model.kind {
        PlantKind::EngineMap { .. } => input
            .values
            .iter()
            .map(|&p| clamp_with_site(gain * p, 0.0_f64.min(gain), 0.0_f64.max(gain), flipped))
            .collect(),
        PlantKind::FirstOrderTracker { .. } => {
            let tau = model.effective_tau().unwrap();
            let dt = input.spec.sample_period;
            let alpha = (dt / tau).min(1.0);
            let mut out = vec![0.0f64; input.len()];
            for k in 0..input.len() - 1 {
                let next = out[k] + alpha * (gain * input.values[k] - out[k]);
                out[k + 1] = clamp_with_site(next, out_spec.r_min, out_spec.r_max, flipped);
            }
            out
        }
    };

    // Output-level fault operators.
    match &model.fault {
        Some(FaultSpec {
            operator: FaultOperator::Delay { samples },
            ..
        }) => {
            let k = (*samples).min(values.len());
            let mut shifted = vec![0.0; values.len()];
            shifted[k..].copy_from_slice(&values[..values.len() - k]);
            values = shifted;
        }
        Some(FaultSpec {
            operator: FaultOperator::Noise { sigma, seed },
            ..
        }) if *sigma > 0.0 => {
            let mut rng = seed::rng(*seed, "noise", 0);
            for v in &mut values {
                *v += sigma * standard_normal(&mut rng);
            }
        }
        Some(FaultSpec {
            operator: FaultOperator::ValueDrop { start, len, held },
            ..
        }) => {
            let end = start.saturating_add(*len).min(values.len());
            for v in values.iter_mut().take(end).skip(*start) {
                *v = *held;
            }
        }
        _ => {}
    }

    for v in &mut values {
        *v = v.clamp(out_spec.r_min, out_spec.r_max);
    }
    Trajectory::new(out_spec, values)
}

/// Pass/fail outcome of the epsilon-conformance oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub max_distance: f64,
    pub first_violation_index: Option<usize>,
    pub epsilon: f64,
}

/// Max-norm conformance: fail iff some pointwise distance exceeds epsilon.
pub fn conformance(observed: &Trajectory, expected: &Trajectory, epsilon: f64) -> Result<Verdict> {
    if observed.len() != expected.len() {
        return Err(Error::Shape(format!(
            "observed has {} samples, expected has {}",
            observed.len(),
            expected.len()
        )));
    }
    let mut max_distance = 0.0f64;
    let mut first_violation_index = None;
    for (k, (o, e)) in observed.values.iter().zip(&expected.values).enumerate() {
        let d = (o - e).abs();
        if d > max_distance {
            max_distance = d;
        }
        if d > epsilon && first_violation_index.is_none() {
            first_violation_index = Some(k);
        }
    }
    Ok(Verdict {
        pass: max_distance <= epsilon,
        max_distance,
        first_violation_index,
        epsilon,
    })
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; u1 kept away from 0.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Build a seeded fault corpus: `per_type` faults of each of the five
/// operator types, with parameters spread over a grid. `n_samples` scales
/// the delay and drop intervals to the trajectory length.
pub fn generate_fault_corpus(
    model: &PlantModel,
    per_type: usize,
    n_samples: usize,
    master_seed: u64,
) -> Result<Vec<FaultSpec>> {
    if per_type < 1 || n_samples < 4 {
        return Err(Error::Config(
            "fault corpus needs per_type >= 1 and n_samples >= 4".into(),
        ));
    }
    let input_unit = SignalSpec::new("u", 0.0, 1.0, 1.0, 1.0, 0.5)?;
    let out = model.output_spec(&input_unit)?;
    let out_range = out.range();
    let mut corpus = Vec::with_capacity(5 * per_type);
    for i in 0..per_type {
        let frac = (i + 1) as f64 / per_type as f64;
        corpus.push(FaultSpec {
            id: format!("delay-{i:02}"),
            operator: FaultOperator::Delay {
                samples: ((n_samples / 4) as f64 * frac).ceil() as usize,
            },
        });
        corpus.push(FaultSpec {
            id: format!("noise-{i:02}"),
            operator: FaultOperator::Noise {
                sigma: 0.05 * out_range * frac,
                seed: seed::derive(master_seed, "fault-noise", i as u64),
            },
        });
        corpus.push(FaultSpec {
            id: format!("drop-{i:02}"),
            operator: FaultOperator::ValueDrop {
                start: (n_samples as f64 * 0.75 * frac) as usize,
                len: n_samples / 8,
                held: if i % 2 == 0 { out.r_min } else { out.r_max },
            },
        });
        // Alternate above/below nominal; first entry reproduces the
        // 5 -> 5.2 gain slip of the engine running example.
        let scale = if i % 2 == 0 {
            1.0 + 0.04 * (1.0 + i as f64 / 2.0)
        } else {
            1.0 - 0.04 * (1.0 + i as f64 / 2.0)
        };
        let param = match (&model.kind, i % 3) {
            (PlantKind::FirstOrderTracker { .. }, 2) => ParamTarget::Tau,
            _ => ParamTarget::Gain,
        };
        corpus.push(FaultSpec {
            id: format!("arith-{i:02}"),
            operator: FaultOperator::ArithmeticReplacement { param, scale },
        });
        corpus.push(FaultSpec {
            id: format!("logic-{i:02}"),
            operator: FaultOperator::LogicalReplacement {
                site: if i % 2 == 0 {
                    ClampSite::Upper
                } else {
                    ClampSite::Lower
                },
            },
        });
    }
    Ok(corpus)
}
