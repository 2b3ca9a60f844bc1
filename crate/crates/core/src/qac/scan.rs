use serde::{Deserialize, Serialize};

use super::{nqac_decode, nqac_encode, qac_decode, qac_encode, DecodeStrategy, Decoded, NestedCode, QacCode};
use crate::bench::{bayesian_bootstrap, weighted_mean, BenchReport, Estimate, Flag, Interval, ReportPoint, ScanOptions};
use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Spin, ENERGY_TOLERANCE};
use crate::rng;
use crate::solvers::{solve_exact, Solver, SolverConfig};

/// Either code, as stored in the `code` block of an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeFamily {
    Qac(QacCode),
    Nqac(NestedCode),
}

impl CodeFamily {
    /// β for QAC, γ for nested QAC.
    pub fn penalty(&self) -> f64 {
        match self {
            CodeFamily::Qac(c) => c.beta,
            CodeFamily::Nqac(c) => c.gamma,
        }
    }

    pub fn with_penalty(&self, value: f64) -> CodeFamily {
        match self {
            CodeFamily::Qac(c) => CodeFamily::Qac(c.clone().with_beta(value)),
            CodeFamily::Nqac(c) => CodeFamily::Nqac(c.clone().with_gamma(value)),
        }
    }

    pub fn encode(&self, logical: &IsingInstance) -> Result<IsingInstance> {
        match self {
            CodeFamily::Qac(c) => qac_encode(logical, c),
            CodeFamily::Nqac(c) => nqac_encode(logical, c),
        }
    }

    pub fn decode(&self, physical: &[Spin], strategy: DecodeStrategy, logical: &IsingInstance) -> Result<Decoded> {
        match self {
            CodeFamily::Qac(c) => qac_decode(physical, c, strategy, logical),
            CodeFamily::Nqac(c) => nqac_decode(physical, c, strategy, logical),
        }
    }

    pub fn codeword(&self, logical_state: &[Spin]) -> Vec<Spin> {
        match self {
            CodeFamily::Qac(c) => c.codeword(logical_state),
            CodeFamily::Nqac(c) => c.codeword(logical_state),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyScan {
    pub values: Vec<f64>,
    /// Decoded ground-state probability per penalty value.
    pub success: Vec<Interval>,
    /// Per-repetition 0/1 outcomes behind each estimate.
    pub indicators: Vec<Vec<f64>>,
    pub best_index: usize,
    pub best: f64,
    /// The best value is the first or last grid point.
    pub boundary: bool,
}

impl PenaltyScan {
    pub fn report(&self) -> BenchReport {
        let level = self.success.first().map_or(0.95, |i| i.level);
        let mut r = BenchReport::new("decoded_success", "penalty", level);
        r.points = self
            .values
            .iter()
            .zip(&self.success)
            .map(|(&v, i)| ReportPoint {
                axis: v,
                estimate: Estimate::Value(i.estimate),
                lower: Estimate::Value(i.lower),
                upper: Estimate::Value(i.upper),
            })
            .collect();
        let best = &self.success[self.best_index];
        r.optimum = Some(self.best);
        r.estimate = Estimate::Value(best.estimate);
        r.lower = Estimate::Value(best.lower);
        r.upper = Estimate::Value(best.upper);
        if self.boundary {
            r.flag(Flag::BoundaryOptimum);
        }
        r
    }
}

/// Solves the encoded problem at each penalty in `grid`, decodes every
/// sample and measures how often the decoded state is a logical ground
/// state. Energy-minimizing decoding uses seed `derive_seed(seed, rep)` per
/// repetition. Ties in the best value go to the smaller penalty.
pub fn penalty_scan(
    logical: &IsingInstance,
    family: &CodeFamily,
    grid: &[f64],
    solver: &dyn Solver,
    config: &SolverConfig,
    strategy: DecodeStrategy,
    options: &ScanOptions,
) -> Result<PenaltyScan> {
    if grid.is_empty() {
        return Err(Error::param("penalty grid is empty"));
    }
    let e0 = match logical.known_ground_energy() {
        Some(e) => e,
        None => solve_exact(logical)?.ground_energy,
    };
    let mut success = Vec::with_capacity(grid.len());
    let mut indicators = Vec::with_capacity(grid.len());
    for (k, &value) in grid.iter().enumerate() {
        let code = family.with_penalty(value);
        let physical = code.encode(logical)?;
        let set = solver.solve(&physical, config)?;
        let hits = set
            .states
            .iter()
            .enumerate()
            .map(|(r, s)| {
                let strat = match strategy {
                    DecodeStrategy::Majority => DecodeStrategy::Majority,
                    DecodeStrategy::EnergyMin { seed } => DecodeStrategy::EnergyMin {
                        seed: rng::derive_seed(seed, r as u64),
                    },
                };
                let d = code.decode(s, strat, logical)?;
                Ok(f64::from(u8::from(logical.energy(&d.state)? <= e0 + ENERGY_TOLERANCE)))
            })
            .collect::<Result<Vec<f64>>>()?;
        success.push(bayesian_bootstrap(
            &hits,
            weighted_mean,
            options.resamples,
            options.level,
            rng::derive_seed(options.seed, k as u64),
        )?);
        indicators.push(hits);
    }
    let best_index = (0..grid.len()).fold(0, |b, k| if success[k].estimate > success[b].estimate { k } else { b });
    Ok(PenaltyScan {
        values: grid.to_vec(),
        best: grid[best_index],
        boundary: best_index == 0 || best_index == grid.len() - 1,
        best_index,
        success,
        indicators,
    })
}
