use super::{metropolis, random_state, run_repetitions, Couplings, SampleSet, SliceReadout, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Schedule, Spin};

const TANH_FLOOR: f64 = 1e-12;

/// Path-integral Monte Carlo over `P` Trotter slices.
#[derive(Debug, Clone)]
pub struct SimulatedQuantumAnnealing {
    pub schedule: Schedule,
}

impl Solver for SimulatedQuantumAnnealing {
    fn id(&self) -> String {
        "sqa".into()
    }

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
        solve_sqa(instance, config, &self.schedule)
    }
}

/// Ferromagnetic coupling between neighbouring slices,
/// `J_⊥ = −ln tanh(β_P A) / (2 β_P)` with `β_P = β / P`.
///
/// The tanh argument is clamped to `[1e−12, 1 − 1e−12]` so the coupling stays
/// finite as `A → 0` and as `A → ∞`.
pub fn inter_slice_coupling(transverse: f64, beta: f64, slices: usize) -> f64 {
    let beta_p = beta / slices as f64;
    let t = (beta_p * transverse).tanh().clamp(TANH_FLOOR, 1.0 - TANH_FLOOR);
    -t.ln() / (2.0 * beta_p)
}

/// Simulated quantum annealing. Each sweep updates every spin of every slice
/// with the slice energy `B(s)·E` and the inter-slice bond `J_⊥(s)`, all at
/// inverse temperature `β_P`; `s` steps linearly to 1 over the sweeps.
pub fn solve_sqa(
    instance: &IsingInstance,
    config: &SolverConfig,
    schedule: &Schedule,
) -> Result<SampleSet> {
    config.check_common()?;
    let slices = config.trotter_slices;
    if slices < 2 {
        return Err(Error::param("SQA needs at least 2 Trotter slices"));
    }
    if !(config.beta > 0.0) {
        return Err(Error::param("SQA inverse temperature must be positive"));
    }
    if let SliceReadout::Fixed(k) = config.readout {
        if k >= slices {
            return Err(Error::param(format!("readout slice {k} out of range 0..{slices}")));
        }
    }
    let couplings = Couplings::new(instance);
    let n = couplings.n();
    let beta_p = config.beta / slices as f64;
    let sweeps = config.sweeps;
    Ok(run_repetitions("sqa", instance, config, |rng| {
        let mut replicas: Vec<Vec<Spin>> = (0..slices).map(|_| random_state(n, rng)).collect();
        let mut fields: Vec<Vec<f64>> = replicas.iter().map(|r| couplings.local_fields(r)).collect();
        for k in 0..sweeps {
            let s = (k + 1) as f64 / sweeps as f64;
            let (a, b) = schedule.at(s);
            let bond = beta_p * inter_slice_coupling(a, config.beta, slices);
            for p in 0..slices {
                let up = (p + 1) % slices;
                let down = (p + slices - 1) % slices;
                for i in 0..n {
                    let sigma = f64::from(replicas[p][i]);
                    let neighbours = f64::from(replicas[up][i]) + f64::from(replicas[down][i]);
                    let action = beta_p * b * (-2.0 * sigma * fields[p][i]) + 2.0 * bond * sigma * neighbours;
                    if metropolis(action, 1.0, rng) {
                        couplings.flip(i, &mut replicas[p], &mut fields[p]);
                    }
                }
            }
        }
        let pick = match config.readout {
            SliceReadout::Fixed(k) => k,
            SliceReadout::Best => (0..slices)
                .map(|p| (p, couplings.energy(&replicas[p], &fields[p])))
                .fold((0, f64::INFINITY), |best, (p, e)| if e < best.1 { (p, e) } else { best })
                .0,
        };
        replicas.swap_remove(pick)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::default_schedule;

    #[test]
    fn coupling_is_finite_at_endpoints() {
        let j0 = inter_slice_coupling(0.0, 8.0, 16);
        assert!(j0.is_finite() && j0 > 0.0);
        let big = inter_slice_coupling(1e6, 8.0, 16);
        assert!(big.is_finite() && (0.0..1e-9).contains(&big));
        // decreasing in the transverse field
        assert!(inter_slice_coupling(0.1, 8.0, 16) > inter_slice_coupling(1.0, 8.0, 16));
    }

    #[test]
    fn single_spin_follows_field() {
        let p = IsingInstance::new(1, vec![1.0], []).unwrap();
        let cfg = SolverConfig {
            sweeps: 500,
            repetitions: 100,
            beta: 8.0,
            trotter_slices: 16,
            ..SolverConfig::default()
        };
        let set = solve_sqa(&p, &cfg, &default_schedule()).unwrap();
        let down = set.states.iter().filter(|s| s[0] == -1).count();
        assert!(down >= 98, "{down}");
    }

    #[test]
    fn ferromagnet_pair() {
        let p = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        let cfg = SolverConfig {
            sweeps: 1000,
            repetitions: 200,
            beta: 8.0,
            trotter_slices: 16,
            seed: 5,
            ..SolverConfig::default()
        };
        let set = solve_sqa(&p, &cfg, &default_schedule()).unwrap();
        let hits = set.energies.iter().filter(|&&e| e == -1.0).count();
        assert!(hits as f64 / 200.0 >= 0.95, "{hits}");
    }

    #[test]
    fn minimal_slices_and_best_readout() {
        let g = crate::topology::build_chimera(1, &[]).unwrap();
        let p = crate::instances::gen_random_pm1(&g, 2);
        for readout in [SliceReadout::Fixed(1), SliceReadout::Best] {
            let cfg = SolverConfig {
                sweeps: 50,
                repetitions: 10,
                trotter_slices: 2,
                readout,
                ..SolverConfig::default()
            };
            let set = solve_sqa(&p, &cfg, &default_schedule()).unwrap();
            assert_eq!(set.len(), 10);
            assert!(set.is_consistent_with(&p));
        }
        let bad = SolverConfig {
            trotter_slices: 1,
            ..SolverConfig::default()
        };
        assert!(solve_sqa(&p, &bad, &default_schedule()).is_err());
    }
}
