//! Repetition codes for annealers: QAC (three problem qubits plus a penalty
//! qubit per logical spin) and nested QAC (`C` coupled copies of a complete
//! problem).

mod nested;
mod scan;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Metadata, Spin};
use crate::rng;
use crate::topology::{HardwareGraph, CELL_SIZE};

pub use nested::{nqac_decode, nqac_encode, NestedCode};
pub use scan::{penalty_scan, CodeFamily, PenaltyScan};

/// Per-cell layout of the square code: each logical qubit takes two vertical
/// and two horizontal qubits of a unit cell, tied by the four couplers
/// between them. Only the layout is provided; concatenation is not.
pub const SQUARE_CODE_CELL: [[usize; 4]; 2] = [[0, 1, 4, 5], [2, 3, 6, 7]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    Uniform,
    /// β times the mean |J| of the couplers on that logical qubit.
    ScaledToMean,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalQubit {
    pub problem: [usize; 3],
    pub penalty: Option<usize>,
}

/// A QAC code: physical resources per logical qubit and the α/β scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QacCode {
    pub logical_qubits: Vec<LogicalQubit>,
    pub alpha: f64,
    pub beta: f64,
    pub penalty_mode: PenaltyMode,
    pub num_physical: usize,
    /// Physical couplers the encoding may use; `None` means any pair.
    #[serde(skip)]
    pub available: Option<BTreeSet<(usize, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum DecodeStrategy {
    Majority,
    /// Majority, then greedy minimization of the logical energy over broken
    /// qubits in seeded random order until a sweep changes nothing.
    EnergyMin { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub state: Vec<Spin>,
    /// Logical qubits whose copies disagreed.
    pub broken: Vec<bool>,
    /// Logical qubits whose copies split evenly.
    pub ties: Vec<bool>,
}

impl QacCode {
    /// Abstract layout: logical `i` uses physical `4i..4i+3` with the last as
    /// penalty qubit (or `3i..3i+3` without penalty qubits).
    pub fn linear(num_logical: usize, alpha: f64, beta: f64, with_penalty: bool) -> Result<QacCode> {
        let stride = if with_penalty { 4 } else { 3 };
        let code = QacCode {
            logical_qubits: (0..num_logical)
                .map(|i| LogicalQubit {
                    problem: [stride * i, stride * i + 1, stride * i + 2],
                    penalty: with_penalty.then_some(stride * i + 3),
                })
                .collect(),
            alpha,
            beta,
            penalty_mode: PenaltyMode::Uniform,
            num_physical: stride * num_logical,
            available: None,
        };
        code.validate()?;
        Ok(code)
    }

    /// Two logical qubits per unit cell: vertical `0,1,2` with penalty `7`,
    /// and horizontal `4,5,6` with penalty `3`. The first chain runs down
    /// columns, the second along rows, and the two meet inside each cell.
    ///
    /// Logical qubits with an inactive problem qubit are dropped; a missing
    /// penalty qubit or penalty coupler leaves the logical qubit without one.
    pub fn chimera(graph: &HardwareGraph, alpha: f64, beta: f64) -> Result<QacCode> {
        let mut logical_qubits = Vec::new();
        for cell in 0..graph.grid_size() * graph.grid_size() {
            let base = cell * CELL_SIZE;
            for (problem, penalty) in [([0, 1, 2], 7), ([4, 5, 6], 3)] {
                let problem = problem.map(|k| base + k);
                if !problem.iter().all(|&q| graph.is_active(q)) {
                    continue;
                }
                let p = base + penalty;
                let penalty = (graph.is_active(p) && problem.iter().all(|&q| graph.has_active_coupler(q, p))).then_some(p);
                logical_qubits.push(LogicalQubit { problem, penalty });
            }
        }
        let code = QacCode {
            logical_qubits,
            alpha,
            beta,
            penalty_mode: PenaltyMode::Uniform,
            num_physical: graph.num_qubits(),
            available: Some(graph.active_couplers().collect()),
        };
        code.validate()?;
        Ok(code)
    }

    pub fn with_penalty_mode(mut self, mode: PenaltyMode) -> Self {
        self.penalty_mode = mode;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn num_logical(&self) -> usize {
        self.logical_qubits.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidCode(format!("α = {} outside (0, 1]", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidCode(format!("β = {} must be finite and nonnegative", self.beta)));
        }
        let mut seen = BTreeSet::new();
        for (i, lq) in self.logical_qubits.iter().enumerate() {
            for q in lq.problem.iter().chain(lq.penalty.iter()) {
                if *q >= self.num_physical {
                    return Err(Error::InvalidCode(format!(
                        "logical qubit {i} uses physical qubit {q} outside 0..{}",
                        self.num_physical
                    )));
                }
                if !seen.insert(*q) {
                    return Err(Error::InvalidCode(format!("physical qubit {q} is used twice")));
                }
            }
        }
        Ok(())
    }

    /// Logical pairs whose three problem-qubit couplers all exist.
    pub fn available_logical_edges(&self) -> Vec<(usize, usize)> {
        let m = self.num_logical();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if self.problem_pairs(i, j).iter().all(|p| self.allows(*p)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn problem_pairs(&self, i: usize, j: usize) -> [(usize, usize); 3] {
        let (a, b) = (&self.logical_qubits[i].problem, &self.logical_qubits[j].problem);
        [0, 1, 2].map(|k| (a[k].min(b[k]), a[k].max(b[k])))
    }

    fn allows(&self, pair: (usize, usize)) -> bool {
        self.available.as_ref().is_none_or(|set| set.contains(&pair))
    }

    /// Physical state of the codeword for `logical_state`; unused qubits are +1.
    pub fn codeword(&self, logical_state: &[Spin]) -> Vec<Spin> {
        let mut out = vec![1; self.num_physical];
        for (lq, &s) in self.logical_qubits.iter().zip(logical_state) {
            for &q in lq.problem.iter().chain(lq.penalty.iter()) {
                out[q] = s;
            }
        }
        out
    }
}

/// Encodes `logical` (one spin per code logical qubit) into the physical
/// instance: `αh` on each problem qubit, `αJ` on each of the three
/// problem-qubit pairs, and `−β` (times the per-qubit scale) between each
/// problem qubit and its penalty qubit.
///
/// Under [`PenaltyMode::ScaledToMean`], a logical qubit with no couplers keeps `β`.
pub fn qac_encode(logical: &IsingInstance, code: &QacCode) -> Result<IsingInstance> {
    code.validate()?;
    if logical.n() != code.num_logical() {
        return Err(Error::InvalidCode(format!(
            "logical instance has {} spins, code has {} logical qubits",
            logical.n(),
            code.num_logical()
        )));
    }
    let mut h = vec![0.0; code.num_physical];
    for (lq, &hi) in code.logical_qubits.iter().zip(logical.h()) {
        for &q in &lq.problem {
            h[q] = code.alpha * hi;
        }
    }
    let mut couplers: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut claim = |pair: (usize, usize), value: f64, what: String| -> Result<()> {
        if !code.allows(pair) {
            return Err(Error::InvalidCode(format!("{what} needs physical coupler {pair:?}, which is unavailable")));
        }
        if couplers.insert(pair, value).is_some() {
            return Err(Error::InvalidCode(format!("{what} conflicts with another use of coupler {pair:?}")));
        }
        Ok(())
    };
    for c in logical.couplers() {
        for pair in code.problem_pairs(c.i, c.j) {
            claim(pair, code.alpha * c.value, format!("logical coupler ({}, {})", c.i, c.j))?;
        }
    }
    let adjacency = logical.adjacency();
    for (i, lq) in code.logical_qubits.iter().enumerate() {
        let Some(p) = lq.penalty else { continue };
        let scale = match code.penalty_mode {
            PenaltyMode::Uniform => 1.0,
            PenaltyMode::ScaledToMean if adjacency[i].is_empty() => 1.0,
            PenaltyMode::ScaledToMean => {
                adjacency[i].iter().map(|(_, w)| w.abs()).sum::<f64>() / adjacency[i].len() as f64
            }
        };
        for &q in &lq.problem {
            claim((q.min(p), q.max(p)), -code.beta * scale, format!("penalty of logical qubit {i}"))?;
        }
    }
    let meta = Metadata::new("qac_encode")
        .param("alpha", code.alpha)
        .param("beta", code.beta)
        .param("logical_n", logical.n());
    Ok(IsingInstance::new(code.num_physical, h, couplers.into_iter().map(|((i, j), v)| (i, j, v)))?.with_metadata(meta))
}

fn check_sample(sample: &[Spin], expected: usize) -> Result<()> {
    if sample.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: sample.len(),
        });
    }
    if let Some(bad) = sample.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::param(format!("sample entry {bad} is not ±1")));
    }
    Ok(())
}

/// Greedy local minimization over `candidates`: each is set to
/// `−sign(h_i + Σ J_ij s_j)` (unchanged at zero field), sweeping in seeded
/// random order until nothing changes. Never raises the energy.
pub(crate) fn refine(logical: &IsingInstance, state: &mut [Spin], candidates: &[usize], seed: u64) {
    if candidates.is_empty() {
        return;
    }
    let adjacency = logical.adjacency();
    let h = logical.h();
    let mut order = candidates.to_vec();
    let mut rng = rng::stream(seed, 0);
    loop {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &i in &order {
            let field = h[i] + adjacency[i].iter().map(|&(j, w)| w * f64::from(state[j])).sum::<f64>();
            let want = if field > 0.0 {
                -1
            } else if field < 0.0 {
                1
            } else {
                state[i]
            };
            if want != state[i] {
                state[i] = want;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// Decodes a physical sample of a QAC code. Majority over three copies
/// cannot tie; penalty qubits are ignored.
pub fn qac_decode(
    physical: &[Spin],
    code: &QacCode,
    strategy: DecodeStrategy,
    logical: &IsingInstance,
) -> Result<Decoded> {
    check_sample(physical, code.num_physical)?;
    if logical.n() != code.num_logical() {
        return Err(Error::LengthMismatch {
            expected: code.num_logical(),
            got: logical.n(),
        });
    }
    let mut state = Vec::with_capacity(code.num_logical());
    let mut broken = Vec::with_capacity(code.num_logical());
    for lq in &code.logical_qubits {
        let sum: i32 = lq.problem.iter().map(|&q| i32::from(physical[q])).sum();
        state.push(if sum > 0 { 1 } else { -1 });
        broken.push(sum.abs() != 3);
    }
    if let DecodeStrategy::EnergyMin { seed } = strategy {
        let candidates: Vec<usize> = (0..state.len()).filter(|&i| broken[i]).collect();
        refine(logical, &mut state, &candidates, seed);
    }
    let ties = vec![false; state.len()];
    Ok(Decoded { state, broken, ties })
}
