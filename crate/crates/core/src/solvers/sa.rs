use super::{heat_bath, metropolis, Acceptance, random_state, run_repetitions, Couplings, SampleSet, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::instances::IsingInstance;
use crate::rng::StreamRng;

/// Single-spin-flip simulated annealing with a linear ramp in inverse
/// temperature; the acceptance rule is `config.acceptance`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimulatedAnnealing;

impl Solver for SimulatedAnnealing {
    fn id(&self) -> String {
        "sa".into()
    }

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
        solve_sa(instance, config)
    }
}

struct Cluster {
    members: Vec<usize>,
    internal: Vec<(usize, usize, f64)>,
}

/// Runs `config.sweeps` single-spin sweeps from a random state, ramping β
/// linearly from `beta_initial` to `beta_final`. With `cluster_moves`, each
/// sweep also proposes flipping every cluster in `config.clusters` as a unit.
pub fn solve_sa(instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
    config.check_common()?;
    if !(config.beta_initial > 0.0 && config.beta_final > 0.0) {
        return Err(Error::param("SA inverse temperatures must be positive"));
    }
    if config.beta_final < config.beta_initial {
        return Err(Error::param("SA final β must be at least the initial β"));
    }
    let couplings = Couplings::new(instance);
    let clusters = if config.cluster_moves {
        if config.clusters.is_empty() {
            return Err(Error::param("cluster moves requested without clusters"));
        }
        config
            .clusters
            .iter()
            .map(|c| build_cluster(instance, c))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let sweeps = config.sweeps;
    let ramp = |k: u64| -> f64 {
        if sweeps <= 1 {
            config.beta_final
        } else {
            config.beta_initial
                + (config.beta_final - config.beta_initial) * k as f64 / (sweeps - 1) as f64
        }
    };
    Ok(run_repetitions("sa", instance, config, |rng| {
        let mut state = random_state(couplings.n(), rng);
        let mut fields = couplings.local_fields(&state);
        for k in 0..sweeps {
            let beta = ramp(k);
            sweep(&couplings, beta, &mut state, &mut fields, config.acceptance, rng);
            for c in &clusters {
                cluster_move(&couplings, c, beta, &mut state, &mut fields, rng);
            }
        }
        state
    }))
}

pub(crate) fn sweep(
    couplings: &Couplings,
    beta: f64,
    state: &mut [i8],
    fields: &mut [f64],
    acceptance: Acceptance,
    rng: &mut StreamRng,
) {
    for i in 0..couplings.n() {
        let delta = -2.0 * f64::from(state[i]) * fields[i];
        let accept = match acceptance {
            Acceptance::Metropolis => metropolis(delta, beta, rng),
            Acceptance::HeatBath => heat_bath(delta, beta, rng),
        };
        if accept {
            couplings.flip(i, state, fields);
        }
    }
}

fn build_cluster(instance: &IsingInstance, members: &[usize]) -> Result<Cluster> {
    if let Some(&bad) = members.iter().find(|&&q| q >= instance.n()) {
        return Err(Error::param(format!("cluster member {bad} out of range")));
    }
    let internal = instance
        .couplers()
        .iter()
        .filter(|c| members.contains(&c.i) && members.contains(&c.j))
        .map(|c| (c.i, c.j, c.value))
        .collect();
    Ok(Cluster {
        members: members.to_vec(),
        internal,
    })
}

fn cluster_move(
    couplings: &Couplings,
    cluster: &Cluster,
    beta: f64,
    state: &mut [i8],
    fields: &mut [f64],
    rng: &mut StreamRng,
) {
    // Single-flip deltas count each internal bond as broken; flipping both
    // ends leaves it unchanged.
    let mut delta: f64 = cluster
        .members
        .iter()
        .map(|&i| -2.0 * f64::from(state[i]) * fields[i])
        .sum();
    for &(i, j, w) in &cluster.internal {
        delta += 4.0 * w * f64::from(state[i] * state[j]);
    }
    if metropolis(delta, beta, rng) {
        for &i in &cluster.members {
            couplings.flip(i, state, fields);
        }
    }
}
