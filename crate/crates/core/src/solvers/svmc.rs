use std::f64::consts::PI;

use rand::Rng;

use super::{run_repetitions, SampleSet, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Schedule};

/// Spin-vector Monte Carlo: spins are planar rotors `θ_i ∈ [0, π]`.
#[derive(Debug, Clone)]
pub struct SpinVectorMonteCarlo {
    pub schedule: Schedule,
}

impl Solver for SpinVectorMonteCarlo {
    fn id(&self) -> String {
        "svmc".into()
    }

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
        solve_svmc(instance, config, &self.schedule)
    }
}

/// Metropolis updates of rotor angles under
/// `E(θ) = −A(s) Σ sin θ_i + B(s) [Σ h_i cos θ_i + Σ J_ij cos θ_i cos θ_j]`
/// at fixed `config.temperature`, with `s` stepping to 1 over the sweeps.
/// Angles start at `π/2` and are read out as `sign(cos θ)`, zero mapping to +1.
pub fn solve_svmc(
    instance: &IsingInstance,
    config: &SolverConfig,
    schedule: &Schedule,
) -> Result<SampleSet> {
    config.check_common()?;
    if !(config.temperature > 0.0) {
        return Err(Error::param("SVMC temperature must be positive"));
    }
    let adj = instance.adjacency();
    let h = instance.h();
    let n = instance.n();
    let sweeps = config.sweeps;
    let temperature = config.temperature;
    Ok(run_repetitions("svmc", instance, config, |rng| {
        let mut theta = vec![PI / 2.0; n];
        let mut cos: Vec<f64> = theta.iter().map(|t: &f64| t.cos()).collect();
        // h_i + Σ_j J_ij cos θ_j
        let mut field: Vec<f64> = (0..n)
            .map(|i| h[i] + adj[i].iter().map(|&(j, w)| w * cos[j]).sum::<f64>())
            .collect();
        for k in 0..sweeps {
            let s = (k + 1) as f64 / sweeps as f64;
            let (a, b) = schedule.at(s);
            for i in 0..n {
                let proposal = rng.gen::<f64>() * PI;
                let new_cos = proposal.cos();
                let delta = -a * (proposal.sin() - theta[i].sin()) + b * field[i] * (new_cos - cos[i]);
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                    let change = new_cos - cos[i];
                    for &(j, w) in &adj[i] {
                        field[j] += w * change;
                    }
                    theta[i] = proposal;
                    cos[i] = new_cos;
                }
            }
        }
        cos.iter().map(|&c| if c < 0.0 { -1 } else { 1 }).collect()
    }))
}
