use super::sa::sweep;
use super::{random_state, run_repetitions, Couplings, SampleSet, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::instances::IsingInstance;

/// Replica-exchange Monte Carlo over `config.ladder`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParallelTempering;

impl Solver for ParallelTempering {
    fn id(&self) -> String {
        "pt".into()
    }

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
        solve_pt(instance, config)
    }
}

/// Acceptance probability for exchanging configurations between rungs at
/// inverse temperatures `beta_a`, `beta_b` holding energies `e_a`, `e_b`.
pub fn swap_acceptance(beta_a: f64, beta_b: f64, e_a: f64, e_b: f64) -> f64 {
    ((beta_b - beta_a) * (e_b - e_a)).exp().min(1.0)
}

/// Each sweep updates every rung at its own β, then proposes swaps between
/// adjacent rungs. The coldest rung's final state is the sample.
pub fn solve_pt(instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
    config.check_common()?;
    let ladder = &config.ladder;
    if ladder.len() < 2 {
        return Err(Error::param("parallel tempering needs at least 2 rungs"));
    }
    if ladder.iter().any(|&b| !(b > 0.0)) || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "ladder must list positive inverse temperatures, strictly increasing (hottest first)",
        ));
    }
    let couplings = Couplings::new(instance);
    let n = couplings.n();
    Ok(run_repetitions("pt", instance, config, |rng| {
        use rand::Rng;
        let mut replicas: Vec<(Vec<i8>, Vec<f64>)> = ladder
            .iter()
            .map(|_| {
                let s = random_state(n, rng);
                let f = couplings.local_fields(&s);
                (s, f)
            })
            .collect();
        for _ in 0..config.sweeps {
            for (r, &beta) in ladder.iter().enumerate() {
                let (s, f) = &mut replicas[r];
                sweep(&couplings, beta, s, f, config.acceptance, rng);
            }
            for r in 0..ladder.len() - 1 {
                let e_a = couplings.energy(&replicas[r].0, &replicas[r].1);
                let e_b = couplings.energy(&replicas[r + 1].0, &replicas[r + 1].1);
                if rng.gen::<f64>() < swap_acceptance(ladder[r], ladder[r + 1], e_a, e_b) {
                    replicas.swap(r, r + 1);
                }
            }
        }
        replicas.pop().expect("ladder has rungs").0
    }))
}
