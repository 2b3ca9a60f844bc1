use serde::{Deserialize, Serialize};

use super::{check_sample, refine, DecodeStrategy, Decoded};
use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Metadata, Spin};

/// Nested QAC: `c` coupled copies of a complete `n`-spin problem on `K_{c·n}`.
/// Physical spin `(i, copy)` has index `i·c + copy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedCode {
    pub n: usize,
    pub c: usize,
    pub gamma: f64,
    /// Multiplier on `h`. The default `c` makes codeword energies `c²·E + const`.
    pub field_boost: f64,
}

impl NestedCode {
    pub fn new(n: usize, c: usize, gamma: f64) -> Result<NestedCode> {
        let code = NestedCode {
            n,
            c,
            gamma,
            field_boost: c as f64,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn with_field_boost(mut self, boost: f64) -> Self {
        self.field_boost = boost;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn num_physical(&self) -> usize {
        self.n * self.c
    }

    pub fn spin(&self, logical: usize, copy: usize) -> usize {
        logical * self.c + copy
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return Err(Error::InvalidCode("nesting level must be at least 1".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidCode(format!("γ = {} must be finite and nonnegative", self.gamma)));
        }
        if !self.field_boost.is_finite() {
            return Err(Error::InvalidCode("field boost must be finite".into()));
        }
        Ok(())
    }

    pub fn codeword(&self, logical_state: &[Spin]) -> Vec<Spin> {
        logical_state.iter().flat_map(|&s| std::iter::repeat_n(s, self.c)).collect()
    }

    /// Energy of the penalty couplers on a codeword: `−γ·n·c(c−1)/2`.
    pub fn penalty_offset(&self) -> f64 {
        -self.gamma * (self.n * self.c * (self.c - 1) / 2) as f64
    }
}

/// Encodes a complete logical instance onto `K_{c·n}`: every copy pair of a
/// logical pair carries `J_ij`, copies of one logical spin are tied by `−γ`,
/// and fields are `field_boost·h_i`.
pub fn nqac_encode(logical: &IsingInstance, code: &NestedCode) -> Result<IsingInstance> {
    code.validate()?;
    if logical.n() != code.n {
        return Err(Error::InvalidCode(format!("code is for {} spins, instance has {}", code.n, logical.n())));
    }
    if !logical.is_complete() {
        return Err(Error::InvalidCode("nested QAC needs a logical instance on a complete graph".into()));
    }
    let c = code.c;
    let h: Vec<f64> = logical.h().iter().flat_map(|&hi| std::iter::repeat_n(code.field_boost * hi, c)).collect();
    let mut couplers = Vec::new();
    for cp in logical.couplers() {
        for a in 0..c {
            for b in 0..c {
                couplers.push((code.spin(cp.i, a), code.spin(cp.j, b), cp.value));
            }
        }
    }
    for i in 0..code.n {
        for a in 0..c {
            for b in a + 1..c {
                couplers.push((code.spin(i, a), code.spin(i, b), -code.gamma));
            }
        }
    }
    let meta = Metadata::new("nqac_encode")
        .param("c", code.c)
        .param("gamma", code.gamma)
        .param("field_boost", code.field_boost);
    Ok(IsingInstance::new(code.num_physical(), h, couplers)?.with_metadata(meta))
}

/// Majority over the `c` copies. Even splits are flagged, start at +1 and are
/// settled by the local energy rule; `EnergyMin` then refines every broken
/// logical qubit.
pub fn nqac_decode(
    physical: &[Spin],
    code: &NestedCode,
    strategy: DecodeStrategy,
    logical: &IsingInstance,
) -> Result<Decoded> {
    code.validate()?;
    check_sample(physical, code.num_physical())?;
    if logical.n() != code.n {
        return Err(Error::LengthMismatch {
            expected: code.n,
            got: logical.n(),
        });
    }
    let mut state = Vec::with_capacity(code.n);
    let mut broken = Vec::with_capacity(code.n);
    let mut ties = Vec::with_capacity(code.n);
    for i in 0..code.n {
        let sum: i64 = (0..code.c).map(|a| i64::from(physical[code.spin(i, a)])).sum();
        state.push(if sum >= 0 { 1 } else { -1 });
        broken.push(sum.unsigned_abs() as usize != code.c);
        ties.push(sum == 0);
    }
    let tied: Vec<usize> = (0..code.n).filter(|&i| ties[i]).collect();
    // Ties are settled identically for both strategies, so `EnergyMin` only
    // descends from the majority answer and is never worse.
    refine(logical, &mut state, &tied, 0);
    match strategy {
        DecodeStrategy::Majority => {}
        DecodeStrategy::EnergyMin { seed } => {
            let candidates: Vec<usize> = (0..code.n).filter(|&i| broken[i]).collect();
            refine(logical, &mut state, &candidates, seed);
        }
    }
    Ok(Decoded { state, broken, ties })
}
