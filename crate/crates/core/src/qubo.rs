//! QUBO construction and evaluation for data-point selection.
//!
//! The selection objective combines three metric objectives (effectiveness,
//! input diversity, output diversity), a count objective, and a pairwise
//! temporal proximity penalty, merged with a weighted sum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricSeries;

/// Upper-triangular QUBO: linear terms, quadratic terms keyed (i, j) with
/// i < j, and an explicit constant offset (zero by default; the dropped
/// constant of the squared-distance form is reported separately so raw
/// energies match the offsetless convention).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    pub n: usize,
    pub linear: Vec<f64>,
    /// Serialized as a list of [i, j, value] triples (the interchange and
    /// wire format for the remote sampler protocol).
    #[serde(with = "quadratic_triples")]
    pub quadratic: BTreeMap<(usize, usize), f64>,
    #[serde(default)]
    pub offset: f64,
}

mod quadratic_triples {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), f64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let triples: Vec<(usize, usize, f64)> =
            map.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        serde::Serialize::serialize(&triples, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        let triples: Vec<(usize, usize, f64)> = Vec::deserialize(d)?;
        let mut map = BTreeMap::new();
        for (i, j, v) in triples {
            if i >= j {
                return Err(D::Error::custom(format!(
                    "quadratic key ({i},{j}) must satisfy i < j"
                )));
            }
            map.insert((i, j), v);
        }
        Ok(map)
    }
}

impl Qubo {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < j && j < self.n, "quadratic key ({i},{j}) out of range");
        if value != 0.0 {
            *self.quadratic.entry((i, j)).or_insert(0.0) += value;
        }
    }

    /// Sum of absolute coefficient magnitudes; an upper bound on |energy|.
    pub fn coefficient_mass(&self) -> f64 {
        self.linear.iter().map(|c| c.abs()).sum::<f64>()
            + self.quadratic.values().map(|c| c.abs()).sum::<f64>()
    }

    /// Dense symmetric-interaction view for fast repeated evaluation.
    pub fn dense(&self) -> DenseQubo {
        let mut couplings = vec![0.0; self.n * self.n];
        for (&(i, j), &v) in &self.quadratic {
            couplings[i * self.n + j] = v;
            couplings[j * self.n + i] = v;
        }
        DenseQubo {
            n: self.n,
            linear: self.linear.clone(),
            couplings,
            offset: self.offset,
        }
    }
}

/// Dense mirror of a [`Qubo`] supporting O(n) single-flip energy deltas.
#[derive(Debug, Clone)]
pub struct DenseQubo {
    pub n: usize,
    linear: Vec<f64>,
    couplings: Vec<f64>,
    offset: f64,
}

impl DenseQubo {
    pub fn energy(&self, bits: &[u8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if bits[i] == 1 {
                e += self.linear[i];
                let row = &self.couplings[i * self.n..(i + 1) * self.n];
                for j in i + 1..self.n {
                    if bits[j] == 1 {
                        e += row[j];
                    }
                }
            }
        }
        e
    }

    /// Energy change from flipping bit `i` in `bits`.
    pub fn flip_delta(&self, bits: &[u8], i: usize) -> f64 {
        let mut delta = self.linear[i];
        let row = &self.couplings[i * self.n..(i + 1) * self.n];
        for j in 0..self.n {
            if bits[j] == 1 && j != i {
                delta += row[j];
            }
        }
        if bits[i] == 1 {
            -delta
        } else {
            delta
        }
    }
}

/// A 0/1 assignment to the selection variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub bits: Vec<u8>,
}

impl Selection {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|b| *b <= 1), "selection bits must be 0/1");
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut bits = vec![0u8; n];
        for &i in indices {
            bits[i] = 1;
        }
        Self { bits }
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// Objective weights, constraint penalty, and the minimum temporal distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub w_ef: f64,
    pub w_id: f64,
    pub w_od: f64,
    pub w_num: f64,
    pub penalty: f64,
    pub d_min: f64,
}

impl Default for Weights {
    fn default() -> Self {
        // 0.25 / 0.125 / 0.125 / 0.5 with P = 1000 and a 2 s minimum distance.
        Self {
            w_ef: 0.25,
            w_id: 0.125,
            w_od: 0.125,
            w_num: 0.5,
            penalty: 1000.0,
            d_min: 2.0,
        }
    }
}

impl Weights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("w_ef", self.w_ef),
            ("w_id", self.w_id),
            ("w_od", self.w_od),
            ("w_num", self.w_num),
            ("d_min", self.d_min),
        ] {
            if !(w >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {w}")));
            }
        }
        if !(self.penalty > 0.0) {
            return Err(Error::Config(format!(
                "penalty must be > 0, got {}",
                self.penalty
            )));
        }
        Ok(())
    }
}

/// Squared-distance metric objective with the constant term dropped:
/// linear[i] = v_i^2 - 2*target*v_i, quadratic[(i,j)] = 2*v_i*v_j.
pub fn build_metric_objective(values: &[f64], target: f64) -> Result<Qubo> {
    if values.iter().any(|v| !v.is_finite()) || !target.is_finite() {
        return Err(Error::Config("metric values must be finite".into()));
    }
    let n = values.len();
    let mut q = Qubo::zero(n);
    for i in 0..n {
        q.linear[i] = values[i] * values[i] - 2.0 * target * values[i];
        for j in i + 1..n {
            q.add_quadratic(i, j, 2.0 * values[i] * values[j]);
        }
    }
    Ok(q)
}

/// Count objective (sum x_i - 0)^2: linear 1, quadratic 2.
pub fn build_count_objective(n: usize) -> Result<Qubo> {
    if n < 1 {
        return Err(Error::Config("count objective needs n >= 1".into()));
    }
    let mut q = Qubo::zero(n);
    for i in 0..n {
        q.linear[i] = 1.0;
        for j in i + 1..n {
            q.add_quadratic(i, j, 2.0);
        }
    }
    Ok(q)
}

/// Proximity penalty: every pair of points closer than d_min seconds gets
/// the penalty on its coupling. Pairwise, not only adjacent indices.
pub fn build_proximity_constraint(times: &[f64], d_min: f64, penalty: f64) -> Result<Qubo> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("times must be sorted ascending".into()));
    }
    let n = times.len();
    let mut q = Qubo::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            if (times[j] - times[i]).abs() < d_min {
                q.add_quadratic(i, j, penalty);
            }
        }
    }
    Ok(q)
}

/// Coefficient-wise weighted sum of QUBO parts sharing the same n.
pub fn assemble(parts: &[(f64, Qubo)]) -> Result<Qubo> {
    let n = parts
        .first()
        .map(|(_, q)| q.n)
        .ok_or_else(|| Error::Shape("assemble needs at least one part".into()))?;
    let mut out = Qubo::zero(n);
    for (w, q) in parts {
        if q.n != n {
            return Err(Error::Shape(format!(
                "part has n = {}, expected {n}",
                q.n
            )));
        }
        for i in 0..n {
            out.linear[i] += w * q.linear[i];
        }
        for (&key, &v) in &q.quadratic {
            let c = out.quadratic.entry(key).or_insert(0.0);
            *c += w * v;
            if *c == 0.0 {
                out.quadratic.remove(&key);
            }
        }
        out.offset += w * q.offset;
    }
    Ok(out)
}

/// Report of one assembled selection instance.
pub struct AssembledInstance {
    pub qubo: Qubo,
    /// True when the penalty clears 10x the objective coefficient mass, the
    /// headroom needed to keep the proximity constraint effectively hard.
    pub penalty_has_headroom: bool,
}

/// Build the full four-objective selection QUBO plus proximity constraint
/// over a set of data points.
///
/// `ef_target` is the effectiveness sum to aim for (the local sum for
/// sub-problems); diversity and count objectives target zero.
pub fn build_selection_qubo(
    metrics: &MetricSeries,
    indices: &[usize],
    times: &[f64],
    weights: &Weights,
    ef_target: Option<f64>,
) -> Result<AssembledInstance> {
    weights.validate()?;
    if times.len() != indices.len() {
        return Err(Error::Shape("times and indices lengths differ".into()));
    }
    let ef: Vec<f64> = indices.iter().map(|&i| metrics.effectiveness[i]).collect();
    let id: Vec<f64> = indices.iter().map(|&i| metrics.input_diversity[i]).collect();
    let od: Vec<f64> = indices.iter().map(|&i| metrics.output_diversity[i]).collect();
    let target = ef_target.unwrap_or_else(|| ef.iter().sum());

    let objective = assemble(&[
        (weights.w_ef, build_metric_objective(&ef, target)?),
        (weights.w_id, build_metric_objective(&id, 0.0)?),
        (weights.w_od, build_metric_objective(&od, 0.0)?),
        (weights.w_num, build_count_objective(ef.len())?),
    ])?;
    let penalty_has_headroom = weights.penalty > 10.0 * objective.coefficient_mass();
    let constraint = build_proximity_constraint(times, weights.d_min, weights.penalty)?;
    let qubo = assemble(&[(1.0, objective), (1.0, constraint)])?;
    Ok(AssembledInstance {
        qubo,
        penalty_has_headroom,
    })
}

/// Evaluate x^T Q x + offset.
pub fn energy(q: &Qubo, x: &Selection) -> Result<f64> {
    if x.bits.len() != q.n {
        return Err(Error::Shape(format!(
            "selection has {} bits, QUBO has {} variables",
            x.bits.len(),
            q.n
        )));
    }
    let mut e = q.offset;
    for (i, &b) in x.bits.iter().enumerate() {
        if b == 1 {
            e += q.linear[i];
        }
    }
    for (&(i, j), &v) in &q.quadratic {
        if x.bits[i] == 1 && x.bits[j] == 1 {
            e += v;
        }
    }
    Ok(e)
}
