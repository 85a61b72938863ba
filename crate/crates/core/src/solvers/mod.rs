//! Interchangeable QUBO samplers: exhaustive oracle, simulated annealing,
//! evolutionary and random baselines, and a remote-annealer protocol client.

pub mod remote;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{energy, Qubo, Selection};
use crate::seed;

/// One candidate solution with its energy and how often it was observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub selection: Selection,
    pub energy: f64,
    pub occurrences: usize,
}

/// Energy-sorted candidate solutions from one sampler invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub solver_name: String,
    /// End-to-end wall time of the call, seconds.
    pub wall_time: f64,
    /// Sampler-internal time, seconds (mirrors QPU-access accounting).
    pub solver_time: f64,
}

impl SampleSet {
    fn from_dedup(
        dedup: BTreeMap<Selection, (f64, usize)>,
        solver_name: &str,
        wall_time: f64,
        solver_time: f64,
    ) -> Self {
        let mut samples: Vec<Sample> = dedup
            .into_iter()
            .map(|(selection, (energy, occurrences))| Sample {
                selection,
                energy,
                occurrences,
            })
            .collect();
        // Ascending energy; equal energies break ties on the lexicographically
        // smallest bit vector so golden tests stay deterministic.
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.selection.bits.cmp(&b.selection.bits))
        });
        Self {
            samples,
            solver_name: solver_name.to_string(),
            wall_time,
            solver_time,
        }
    }

    pub fn best(&self) -> &Sample {
        &self.samples[0]
    }

    /// Check the invariant that reported energies match local evaluation.
    pub fn validate(&self, q: &Qubo, tol: f64) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::Shape("empty sample set".into()));
        }
        for (index, s) in self.samples.iter().enumerate() {
            let local = energy(q, &s.selection)?;
            if (local - s.energy).abs() > tol {
                return Err(Error::Integrity {
                    index,
                    reported: s.energy,
                    local,
                });
            }
        }
        Ok(())
    }
}

/// Simulated annealing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub sweeps: usize,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            num_reads: 100,
            sweeps: 1000,
            initial_temperature: 10.0,
            final_temperature: 0.05,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.sweeps == 0 {
            return Err(Error::Config("num_reads and sweeps must be >= 1".into()));
        }
        if !(self.final_temperature > 0.0 && self.final_temperature < self.initial_temperature) {
            return Err(Error::Config(format!(
                "need 0 < final_temperature ({}) < initial_temperature ({})",
                self.final_temperature, self.initial_temperature
            )));
        }
        Ok(())
    }
}

/// Exhaustively enumerate all 2^n selections (n <= 24). Returns the global
/// minimum first and the energy-sorted frontier truncated to 1000 entries.
pub fn solve_exact(q: &Qubo) -> Result<SampleSet> {
    const MAX_N: usize = 24;
    const FRONTIER: usize = 1000;
    if q.n > MAX_N {
        return Err(Error::Capacity(format!(
            "solve_exact handles n <= {MAX_N}, got {}",
            q.n
        )));
    }
    let start = Instant::now();
    let dense = q.dense();
    let mut bits = vec![0u8; q.n];
    let mut e = q.offset;

    // Worst-on-top frontier of (energy, bits), capacity FRONTIER.
    let mut frontier: Vec<(f64, Vec<u8>)> = Vec::with_capacity(FRONTIER + 1);
    let push = |frontier: &mut Vec<(f64, Vec<u8>)>, e: f64, bits: &[u8]| {
        frontier.push((e, bits.to_vec()));
    };
    push(&mut frontier, e, &bits);

    let total: u64 = 1u64 << q.n;
    for step in 1..total {
        // Gray-code walk: exactly one bit flips per step.
        let bit = step.trailing_zeros() as usize;
        e += dense.flip_delta(&bits, bit);
        bits[bit] ^= 1;
        push(&mut frontier, e, &bits);
        if frontier.len() >= 4 * FRONTIER {
            frontier.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            frontier.truncate(FRONTIER);
        }
    }
    frontier.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    frontier.truncate(FRONTIER);

    let mut dedup = BTreeMap::new();
    for (e, bits) in frontier {
        dedup.insert(Selection::new(bits), (e, 1));
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(SampleSet::from_dedup(dedup, "exact", elapsed, elapsed))
}

/// Robust coefficient scale used to express temperatures in problem units.
/// Median of nonzero magnitudes so a large constraint penalty does not wash
/// out the objective scale.
fn coefficient_scale(q: &Qubo) -> f64 {
    let mut mags: Vec<f64> = q
        .linear
        .iter()
        .chain(q.quadratic.values())
        .map(|c| c.abs())
        .filter(|c| *c > 0.0)
        .collect();
    if mags.is_empty() {
        return 1.0;
    }
    mags.sort_by(f64::total_cmp);
    mags[mags.len() / 2]
}

/// Simulated annealing: independent restarts of single-bit Metropolis
/// sweeps under a geometric cooling schedule. Deterministic per seed.
pub fn solve_sa(q: &Qubo, p: &AnnealParams) -> Result<SampleSet> {
    p.validate()?;
    let start = Instant::now();
    let dense = q.dense();
    let n = q.n;
    let scale = coefficient_scale(q);
    let ratio = if p.sweeps > 1 {
        (p.final_temperature / p.initial_temperature).powf(1.0 / (p.sweeps - 1) as f64)
    } else {
        1.0
    };

    let mut dedup: BTreeMap<Selection, (f64, usize)> = BTreeMap::new();
    for read in 0..p.num_reads {
        let mut rng = seed::rng(p.seed, "sa-read", read as u64);
        let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        let mut e = dense.energy(&bits);
        let mut best_bits = bits.clone();
        let mut best_e = e;
        let mut temp = p.initial_temperature * scale;
        for _ in 0..p.sweeps {
            for i in 0..n {
                let delta = dense.flip_delta(&bits, i);
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                    bits[i] ^= 1;
                    e += delta;
                    if e < best_e {
                        best_e = e;
                        best_bits.copy_from_slice(&bits);
                    }
                }
            }
            temp *= ratio;
        }
        let entry = dedup
            .entry(Selection::new(best_bits))
            .or_insert((best_e, 0));
        entry.1 += 1;
    }
    // Re-evaluate exactly; the incremental updates accumulate rounding.
    for (sel, entry) in dedup.iter_mut() {
        entry.0 = dense.energy(&sel.bits);
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(SampleSet::from_dedup(
        dedup,
        "simulated_annealing",
        elapsed,
        elapsed,
    ))
}

/// Weighted single-objective genetic search: tournament selection, uniform
/// crossover, per-bit mutation at rate 1/n, with elitism.
pub fn solve_evolutionary<R: Rng + ?Sized>(
    q: &Qubo,
    pop: usize,
    generations: usize,
    rng: &mut R,
) -> Result<SampleSet> {
    if pop < 2 {
        return Err(Error::Config("population must be >= 2".into()));
    }
    let start = Instant::now();
    let dense = q.dense();
    let n = q.n;
    let mutation_rate = 1.0 / n.max(1) as f64;

    let mut population: Vec<(Vec<u8>, f64)> = (0..pop)
        .map(|_| {
            let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
            let e = dense.energy(&bits);
            (bits, e)
        })
        .collect();

    for _ in 0..generations {
        let best = population
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
            .cloned()
            .unwrap();
        let mut next = Vec::with_capacity(pop);
        next.push(best);
        while next.len() < pop {
            let parent_a = tournament(&population, rng);
            let parent_b = tournament(&population, rng);
            let mut child: Vec<u8> = (0..n)
                .map(|i| {
                    if rng.gen::<bool>() {
                        parent_a[i]
                    } else {
                        parent_b[i]
                    }
                })
                .collect();
            for bit in child.iter_mut() {
                if rng.gen::<f64>() < mutation_rate {
                    *bit ^= 1;
                }
            }
            let e = dense.energy(&child);
            next.push((child, e));
        }
        population = next;
    }

    let mut dedup: BTreeMap<Selection, (f64, usize)> = BTreeMap::new();
    for (bits, e) in population {
        let entry = dedup.entry(Selection::new(bits)).or_insert((e, 0));
        entry.1 += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(SampleSet::from_dedup(dedup, "evolutionary", elapsed, elapsed))
}

fn tournament<'a, R: Rng + ?Sized>(
    population: &'a [(Vec<u8>, f64)],
    rng: &mut R,
) -> &'a Vec<u8> {
    let a = &population[rng.gen_range(0..population.len())];
    let b = &population[rng.gen_range(0..population.len())];
    if a.1 <= b.1 {
        &a.0
    } else {
        &b.0
    }
}

/// Uniform random selections, evaluated and returned best-first.
pub fn solve_random<R: Rng + ?Sized>(q: &Qubo, draws: usize, rng: &mut R) -> Result<SampleSet> {
    if draws < 1 {
        return Err(Error::Config("draws must be >= 1".into()));
    }
    let start = Instant::now();
    let dense = q.dense();
    let mut dedup: BTreeMap<Selection, (f64, usize)> = BTreeMap::new();
    for _ in 0..draws {
        let bits: Vec<u8> = (0..q.n).map(|_| rng.gen_range(0..2u8)).collect();
        let e = dense.energy(&bits);
        let entry = dedup.entry(Selection::new(bits)).or_insert((e, 0));
        entry.1 += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(SampleSet::from_dedup(dedup, "random", elapsed, elapsed))
}

/// A sampler usable behind the decomposition pipeline. Implementations are
/// deterministic: identical QUBOs yield identical sample sets.
pub trait QuboSampler: Send + Sync {
    fn name(&self) -> &str;
    fn sample(&self, q: &Qubo) -> Result<SampleSet>;
}

/// Exhaustive oracle sampler (n <= 24).
#[derive(Debug, Clone, Default)]
pub struct ExactSampler;

impl QuboSampler for ExactSampler {
    fn name(&self) -> &str {
        "exact"
    }

    fn sample(&self, q: &Qubo) -> Result<SampleSet> {
        solve_exact(q)
    }
}

/// Simulated annealing sampler.
#[derive(Debug, Clone)]
pub struct SaSampler {
    pub params: AnnealParams,
}

impl QuboSampler for SaSampler {
    fn name(&self) -> &str {
        "simulated_annealing"
    }

    fn sample(&self, q: &Qubo) -> Result<SampleSet> {
        solve_sa(q, &self.params)
    }
}

/// Evolutionary baseline sampler.
#[derive(Debug, Clone)]
pub struct EvoSampler {
    pub pop: usize,
    pub generations: usize,
    pub seed: u64,
}

impl QuboSampler for EvoSampler {
    fn name(&self) -> &str {
        "evolutionary"
    }

    fn sample(&self, q: &Qubo) -> Result<SampleSet> {
        let mut rng = seed::rng(self.seed, "evolutionary", q.n as u64);
        solve_evolutionary(q, self.pop, self.generations, &mut rng)
    }
}

/// Random baseline sampler.
#[derive(Debug, Clone)]
pub struct RandomSampler {
    pub draws: usize,
    pub seed: u64,
}

impl QuboSampler for RandomSampler {
    fn name(&self) -> &str {
        "random"
    }

    fn sample(&self, q: &Qubo) -> Result<SampleSet> {
        let mut rng = seed::rng(self.seed, "random", q.n as u64);
        solve_random(q, self.draws, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::build_metric_objective;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_qubo(n: usize, seed: u64) -> Qubo {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = Qubo::zero(n);
        for i in 0..n {
            q.linear[i] = rng.gen_range(-1.0..1.0);
            for j in i + 1..n {
                q.add_quadratic(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        q
    }

    /// Independent oracle: plain counting enumeration with direct energy().
    fn enumerate_minimum(q: &Qubo) -> (Vec<u8>, f64) {
        let mut best_bits = vec![0u8; q.n];
        let mut best_e = f64::INFINITY;
        for mask in 0u64..(1 << q.n) {
            let bits: Vec<u8> = (0..q.n).map(|i| ((mask >> i) & 1) as u8).collect();
            let e = energy(q, &Selection::new(bits.clone())).unwrap();
            if e < best_e || (e == best_e && bits < best_bits) {
                best_e = e;
                best_bits = bits;
            }
        }
        (best_bits, best_e)
    }

    #[test]
    fn exact_finds_worked_example_optimum() {
        let q = build_metric_objective(&[0.31, 0.32], 0.63).unwrap();
        let set = solve_exact(&q).unwrap();
        assert_eq!(set.best().selection.bits, vec![1, 1]);
        assert!((set.best().energy - (-0.3969)).abs() < 1e-12);
        set.validate(&q, 1e-9).unwrap();
    }

    #[test]
    fn exact_tie_break_returns_all_zeros_first() {
        let q = Qubo::zero(4);
        let set = solve_exact(&q).unwrap();
        assert_eq!(set.best().selection.bits, vec![0, 0, 0, 0]);
        assert_eq!(set.samples.len(), 16);
    }

    #[test]
    fn exact_matches_independent_enumeration() {
        for seed in 0..10 {
            let q = random_qubo(12, seed);
            let set = solve_exact(&q).unwrap();
            let (bits, e) = enumerate_minimum(&q);
            assert_eq!(set.best().selection.bits, bits);
            assert!((set.best().energy - e).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_guards_capacity() {
        assert!(matches!(
            solve_exact(&Qubo::zero(25)),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn sa_solves_worked_example_in_almost_all_reads() {
        let q = build_metric_objective(&[0.31, 0.32], 0.63).unwrap();
        let params = AnnealParams {
            num_reads: 100,
            sweeps: 50,
            seed: 9,
            ..Default::default()
        };
        let set = solve_sa(&q, &params).unwrap();
        assert_eq!(set.best().selection.bits, vec![1, 1]);
        let hits = set
            .samples
            .iter()
            .filter(|s| s.selection.bits == vec![1, 1])
            .map(|s| s.occurrences)
            .sum::<usize>();
        assert!(hits >= 99, "only {hits}/100 reads reached the optimum");
        set.validate(&q, 1e-9).unwrap();
    }

    #[test]
    fn sa_one_bit_landscape() {
        let mut q = Qubo::zero(1);
        q.linear[0] = -0.5;
        let params = AnnealParams {
            num_reads: 5,
            sweeps: 20,
            seed: 1,
            ..Default::default()
        };
        let set = solve_sa(&q, &params).unwrap();
        assert_eq!(set.best().selection.bits, vec![1]);
    }

    #[test]
    fn sa_is_deterministic_per_seed() {
        let q = random_qubo(10, 4);
        let params = AnnealParams {
            num_reads: 20,
            sweeps: 50,
            seed: 77,
            ..Default::default()
        };
        assert_eq!(solve_sa(&q, &params).unwrap().samples, solve_sa(&q, &params).unwrap().samples);
    }

    #[test]
    fn sa_never_beats_exact() {
        for seed in 0..10 {
            let q = random_qubo(10, 100 + seed);
            let exact = solve_exact(&q).unwrap();
            let params = AnnealParams {
                num_reads: 20,
                sweeps: 50,
                seed,
                ..Default::default()
            };
            let sa = solve_sa(&q, &params).unwrap();
            assert!(sa.best().energy >= exact.best().energy - 1e-9);
        }
    }

    #[test]
    fn evolutionary_solves_worked_example() {
        let q = build_metric_objective(&[0.31, 0.32], 0.63).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let set = solve_evolutionary(&q, 20, 30, &mut rng).unwrap();
        assert_eq!(set.best().selection.bits, vec![1, 1]);
    }

    #[test]
    fn evolutionary_monotone_landscape_selects_everything() {
        let mut q = Qubo::zero(8);
        for c in q.linear.iter_mut() {
            *c = -1.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let set = solve_evolutionary(&q, 30, 60, &mut rng).unwrap();
        assert_eq!(set.best().selection.bits, vec![1; 8]);
    }

    #[test]
    fn evolutionary_zero_qubo_returns_energy_zero() {
        let q = Qubo::zero(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = solve_evolutionary(&q, 10, 5, &mut rng).unwrap();
        assert_eq!(set.best().energy, 0.0);
    }

    #[test]
    fn random_is_deterministic_and_observes_something() {
        let q = random_qubo(1, 8);
        let mut r1 = ChaCha8Rng::seed_from_u64(6);
        let mut r2 = ChaCha8Rng::seed_from_u64(6);
        let s1 = solve_random(&q, 100, &mut r1).unwrap();
        let s2 = solve_random(&q, 100, &mut r2).unwrap();
        assert_eq!(s1.samples, s2.samples);
        assert!(!s1.samples.is_empty());
    }

    #[test]
    fn random_coverage_on_tiny_instance() {
        // draws = 2^n on n=4: expect most of the 16 selections observed.
        let q = random_qubo(4, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let set = solve_random(&q, 64, &mut rng).unwrap();
        assert!(set.samples.len() >= 12, "saw only {}", set.samples.len());
        let total: usize = set.samples.iter().map(|s| s.occurrences).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn no_sampler_beats_the_oracle() {
        for seed in 0..5 {
            let q = random_qubo(12, 200 + seed);
            let floor = solve_exact(&q).unwrap().best().energy;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for set in [
                solve_sa(
                    &q,
                    &AnnealParams {
                        num_reads: 10,
                        sweeps: 30,
                        seed,
                        ..Default::default()
                    },
                )
                .unwrap(),
                solve_evolutionary(&q, 16, 20, &mut rng).unwrap(),
                solve_random(&q, 200, &mut rng).unwrap(),
            ] {
                assert!(set.best().energy >= floor - 1e-9);
                set.validate(&q, 1e-9).unwrap();
            }
        }
    }
}
