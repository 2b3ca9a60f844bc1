use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Spin};
use crate::solvers::{run_repetitions, SampleSet, Solver, SolverConfig};

/// Solver with a prescribed success curve `p(sweeps)`.
///
/// Each repetition returns the instance's planted state with probability
/// `p`, otherwise the worst single flip of it. The curve is interpolated
/// linearly in sweeps and held constant beyond its ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubSolver {
    pub curve: Vec<(u64, f64)>,
}

impl StubSolver {
    pub fn new(curve: Vec<(u64, f64)>) -> Result<Self> {
        if curve.is_empty() {
            return Err(Error::param("stub curve is empty"));
        }
        if curve.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
            return Err(Error::param("stub success probabilities must lie in [0, 1]"));
        }
        if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::param("stub curve sweeps must be strictly increasing"));
        }
        Ok(StubSolver { curve })
    }

    pub fn from_fn(grid: &[u64], p: impl Fn(u64) -> f64) -> Result<Self> {
        StubSolver::new(grid.iter().map(|&s| (s, p(s))).collect())
    }

    pub fn success_at(&self, sweeps: u64) -> f64 {
        let k = self.curve.partition_point(|&(s, _)| s <= sweeps);
        if k == 0 {
            return self.curve[0].1;
        }
        if k == self.curve.len() {
            return self.curve[k - 1].1;
        }
        let (s0, p0) = self.curve[k - 1];
        let (s1, p1) = self.curve[k];
        p0 + (p1 - p0) * (sweeps - s0) as f64 / (s1 - s0) as f64
    }
}

fn worst_flip(instance: &IsingInstance, ground: &[Spin]) -> Result<Vec<Spin>> {
    let e0 = instance.energy(ground)?;
    let mut best: Option<(f64, Vec<Spin>)> = None;
    for i in 0..instance.n() {
        let mut s = ground.to_vec();
        s[i] = -s[i];
        let e = instance.energy_unchecked(&s);
        if e > e0 && best.as_ref().is_none_or(|b| e > b.0) {
            best = Some((e, s));
        }
    }
    best.map(|b| b.1)
        .ok_or_else(|| Error::param("stub solver needs an instance where some flip of the planted state costs energy"))
}

impl Solver for StubSolver {
    fn id(&self) -> String {
        "stub".into()
    }

    fn solve(&self, instance: &IsingInstance, config: &SolverConfig) -> Result<SampleSet> {
        let ground = instance
            .planted()
            .ok_or_else(|| Error::param("stub solver needs an instance with a planted state"))?
            .to_vec();
        let miss = worst_flip(instance, &ground)?;
        let p = self.success_at(config.sweeps);
        let mut set = run_repetitions("stub", instance, config, |rng| {
            if rng.gen::<f64>() < p {
                ground.clone()
            } else {
                miss.clone()
            }
        });
        set.wall_times.iter_mut().for_each(|t| *t = 0.0);
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_samples() {
        let stub = StubSolver::new(vec![(10, 0.0), (20, 1.0)]).unwrap();
        assert_eq!(stub.success_at(5), 0.0);
        assert_eq!(stub.success_at(15), 0.5);
        assert_eq!(stub.success_at(99), 1.0);
        let g = crate::topology::build_chimera(1, &[]).unwrap();
        let p = crate::instances::gen_frustrated_loops(&g, 0.5, 3.0, 1, None).unwrap();
        let set = stub.solve(&p, &SolverConfig::default().with_sweeps(15).with_repetitions(400)).unwrap();
        let hits = set.energies.iter().filter(|&&e| e <= p.known_ground_energy().unwrap() + 1e-9).count();
        assert!((150..250).contains(&hits), "{hits}");
        assert!(set.is_consistent_with(&p));
        assert!(StubSolver::new(vec![(5, 0.1), (5, 0.2)]).is_err());
    }
}
