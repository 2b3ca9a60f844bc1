//! Reference solvers sharing the [`SampleSet`] contract.
//!
//! Every repetition runs on its own random stream derived from
//! `(config.seed, repetition index)`, so a sample set is a pure function of
//! `(instance, config)` no matter how repetitions are dispatched over threads.

mod exact;
mod pt;
mod sa;
mod sqa;
mod svmc;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Spin};
use crate::rng::{self, StreamRng};

pub use exact::{solve_exact, solve_exact_with_limit, ExactSolution, MAX_ENUMERATION_WIDTH};
pub use pt::{solve_pt, swap_acceptance, ParallelTempering};
pub use sa::{solve_sa, SimulatedAnnealing};
pub use sqa::{inter_slice_coupling, solve_sqa, SimulatedQuantumAnnealing};
pub use svmc::{solve_svmc, SpinVectorMonteCarlo};

/// Which Trotter slice SQA reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceReadout {
    Fixed(usize),
    /// Lowest classical energy among all slices (first on ties).
    Best,
}

/// Single-spin acceptance rule of the SA kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// `min(1, e^{−βΔE})`. Zero-cost flips are always taken, so in fixed
    /// sweep order a free spin simply alternates.
    #[default]
    Metropolis,
    /// `1 / (1 + e^{βΔE})`; free spins are re-randomized on every visit.
    HeatBath,
}

/// Run-length and temperature knobs for all solvers.
///
/// Each solver reads only the fields it needs: `beta_initial`/`beta_final`
/// and the cluster settings for SA, `temperature` for SVMC, `beta`,
/// `trotter_slices` and `readout` for SQA, `ladder` (inverse temperatures,
/// hottest first) for PT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub sweeps: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub temperature: f64,
    pub beta: f64,
    pub ladder: Vec<f64>,
    pub trotter_slices: usize,
    pub readout: SliceReadout,
    pub cluster_moves: bool,
    pub clusters: Vec<Vec<usize>>,
    pub acceptance: Acceptance,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sweeps: 1000,
            repetitions: 100,
            seed: 0,
            beta_initial: 0.1,
            beta_final: 3.0,
            temperature: 0.05,
            beta: 8.0,
            ladder: geometric_ladder(0.1, 3.0, 8),
            trotter_slices: 16,
            readout: SliceReadout::Fixed(0),
            cluster_moves: false,
            clusters: Vec::new(),
            acceptance: Acceptance::Metropolis,
        }
    }
}

impl SolverConfig {
    pub fn with_sweeps(mut self, sweeps: u64) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check_common(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::param("repetitions must be positive"));
        }
        Ok(())
    }
}

/// `count` inverse temperatures spaced geometrically from `beta_min` to `beta_max`.
pub fn geometric_ladder(beta_min: f64, beta_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![beta_max];
    }
    let ratio = (beta_max / beta_min).powf(1.0 / (count - 1) as f64);
    (0..count).map(|k| beta_min * ratio.powi(k as i32)).collect()
}

/// Measured states of repeated solver runs on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub solver: String,
    pub config: SolverConfig,
    pub seed: u64,
    pub sweeps: u64,
    pub states: Vec<Vec<Spin>>,
    pub energies: Vec<f64>,
    /// Seconds per repetition. Not reproducible; excluded from [`SampleSet::same_samples`].
    pub wall_times: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.energies.iter().copied().reduce(f64::min)
    }

    /// Equality of everything except timing.
    pub fn same_samples(&self, other: &SampleSet) -> bool {
        self.solver == other.solver
            && self.seed == other.seed
            && self.sweeps == other.sweeps
            && self.states == other.states
            && self.energies.len() == other.energies.len()
            && self
                .energies
                .iter()
                .zip(&other.energies)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Checks `energies[k] == energy(states[k])` bit for bit.
    pub fn is_consistent_with(&self, instance: &IsingInstance) -> bool {
        self.states.len() == self.energies.len()
            && self.states.iter().zip(&self.energies).all(|(s, e)| {
                instance
                    .energy(s)
                    .map(|x| x.to_bits() == e.to_bits())
                    .unwrap_or(false)
            })
    }

    /// Builds a set from explicit states, computing energies.
    pub fn from_states(
        solver: &str,
        instance: &IsingInstance,
        config: &SolverConfig,
        states: Vec<Vec<Spin>>,
    ) -> Result<SampleSet> {
        let energies = states
            .iter()
            .map(|s| instance.energy(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleSet {
            solver: solver.to_string(),
            config: config.clone(),
            seed: config.seed,
            sweeps: config.sweeps,
            wall_times: vec![0.0; states.len()],
            states,
            energies,
        })
    }

    /// Concatenates sample sets in order.
    pub fn pooled(parts: &[SampleSet]) -> Option<SampleSet> {
        let first = parts.first()?;
        let mut out = first.clone();
        for p in &parts[1..] {
            out.states.extend(p.states.iter().cloned());
            out.energies.extend(&p.energies);
            out.wall_times.extend(&p.wall_times);
        }
        Some(out)
    }
}

/// Common interface for sampling solvers.
pub trait Solver: Send + Sync {
    fn id(&self) -> String;

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet>;
}

/// Runs `body` once per repetition on independent streams and collects the
/// results in repetition order.
pub(crate) fn run_repetitions<F>(
    solver: &str,
    instance: &IsingInstance,
    config: &SolverConfig,
    body: F,
) -> SampleSet
where
    F: Fn(&mut StreamRng) -> Vec<Spin> + Sync,
{
    let runs: Vec<(Vec<Spin>, f64)> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let start = Instant::now();
            let mut rng = rng::stream(config.seed, rep as u64);
            let state = body(&mut rng);
            (state, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut states = Vec::with_capacity(runs.len());
    let mut wall_times = Vec::with_capacity(runs.len());
    for (s, t) in runs {
        states.push(s);
        wall_times.push(t);
    }
    let energies = states.iter().map(|s| instance.energy_unchecked(s)).collect();
    SampleSet {
        solver: solver.to_string(),
        config: config.clone(),
        seed: config.seed,
        sweeps: config.sweeps,
        states,
        energies,
        wall_times,
    }
}

/// Compressed adjacency used by the Monte Carlo kernels.
pub(crate) struct Couplings {
    pub h: Vec<f64>,
    offsets: Vec<usize>,
    neighbours: Vec<usize>,
    weights: Vec<f64>,
}

impl Couplings {
    pub fn new(instance: &IsingInstance) -> Self {
        let adj = instance.adjacency();
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut neighbours = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for list in &adj {
            for &(j, w) in list {
                neighbours.push(j);
                weights.push(w);
            }
            offsets.push(neighbours.len());
        }
        Couplings {
            h: instance.h().to_vec(),
            offsets,
            neighbours,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.neighbours[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    /// `h_i + Σ_j J_ij s_j` for every spin.
    pub fn local_fields(&self, state: &[Spin]) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.h[i] + self.row(i).map(|(j, w)| w * f64::from(state[j])).sum::<f64>())
            .collect()
    }

    /// Flips spin `i` and updates the neighbours' local fields.
    #[inline]
    pub fn flip(&self, i: usize, state: &mut [Spin], fields: &mut [f64]) {
        let old = f64::from(state[i]);
        state[i] = -state[i];
        for (j, w) in self.row(i) {
            fields[j] -= 2.0 * w * old;
        }
    }

    pub fn energy(&self, state: &[Spin], fields: &[f64]) -> f64 {
        // Σ h s + ½ Σ_i s_i Σ_j J s_j
        (0..self.n())
            .map(|i| {
                let s = f64::from(state[i]);
                0.5 * s * (fields[i] + self.h[i])
            })
            .sum()
    }
}

pub(crate) fn random_state(n: usize, rng: &mut StreamRng) -> Vec<Spin> {
    use rand::Rng;
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// Metropolis test for an energy change `delta` at inverse temperature `beta`.
#[inline]
pub(crate) fn metropolis(delta: f64, beta: f64, rng: &mut StreamRng) -> bool {
    use rand::Rng;
    delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp()
}

/// Heat-bath (Glauber) test for an energy change `delta`.
#[inline]
pub(crate) fn heat_bath(delta: f64, beta: f64, rng: &mut StreamRng) -> bool {
    use rand::Rng;
    rng.gen::<f64>() * (1.0 + (beta * delta).exp()) < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_endpoints() {
        let l = geometric_ladder(0.1, 3.0, 8);
        assert_eq!(l.len(), 8);
        assert!((l[0] - 0.1).abs() < 1e-12 && (l[7] - 3.0).abs() < 1e-12);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn couplings_energy_matches_instance() {
        let p = IsingInstance::new(3, vec![0.5, -1.0, 0.25], [(0, 1, -1.0), (1, 2, 0.75), (0, 2, 0.5)])
            .unwrap();
        let c = Couplings::new(&p);
        let mut s = vec![1, -1, 1];
        let mut f = c.local_fields(&s);
        assert!((c.energy(&s, &f) - p.energy(&s).unwrap()).abs() < 1e-12);
        c.flip(1, &mut s, &mut f);
        assert_eq!(f, c.local_fields(&s));
        assert!((c.energy(&s, &f) - p.energy(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = SolverConfig {
            readout: SliceReadout::Best,
            ..SolverConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SolverConfig>(&text).unwrap(), c);
        let partial: SolverConfig = serde_json::from_str(r#"{"sweeps": 5}"#).unwrap();
        assert_eq!(partial.sweeps, 5);
        assert_eq!(partial.repetitions, 100);
    }
}
