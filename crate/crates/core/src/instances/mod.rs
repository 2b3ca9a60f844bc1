//! Ising problem instances and the benchmark instance families.
//!
//! Energies use `E(s) = Σ_i h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s ∈ {−1,+1}ⁿ`,
//! so a ferromagnetic coupler has `J < 0` and a positive field favours `s = −1`.

mod generators;
mod schedule;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{
    gen_frustrated_loops, gen_random_pm1, gen_range_k, gen_signature, gen_weak_strong,
    SignatureLayout, WeakStrongLayout,
};
pub use schedule::{default_schedule, load_schedule, Schedule};

/// A single Ising spin, always `-1` or `+1`.
pub type Spin = i8;

/// Tolerance used when comparing energies of distinct states for ties.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// Device programming ranges for fields and couplers.
pub const DEVICE_FIELD_RANGE: f64 = 2.0;
pub const DEVICE_COUPLER_RANGE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupler {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Generator provenance carried along with an instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl Metadata {
    pub fn new(generator: impl Into<String>) -> Self {
        Metadata {
            generator: generator.into(),
            seed: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// An Ising instance over `n` spins.
///
/// Couplers are stored in canonical form: `i < j`, sorted lexicographically,
/// no duplicates. The type is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    h: Vec<f64>,
    couplers: Vec<Coupler>,
    planted: Option<Vec<Spin>>,
    known_ground_energy: Option<f64>,
    metadata: Metadata,
}

impl IsingInstance {
    /// Builds an instance from fields and `(i, j, J_ij)` triples.
    ///
    /// Pairs may be given in either order; self-couplings, out-of-range
    /// indices and repeated pairs are rejected.
    pub fn new(
        n: usize,
        h: Vec<f64>,
        couplers: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if h.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: h.len(),
            });
        }
        if let Some(bad) = h.iter().find(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite field {bad}")));
        }
        let mut list = Vec::new();
        for (a, b, value) in couplers {
            if a >= n || b >= n {
                return Err(Error::param(format!(
                    "coupler ({a}, {b}) references a spin outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::param(format!("self-coupling on spin {a}")));
            }
            if !value.is_finite() {
                return Err(Error::param(format!("non-finite coupler ({a}, {b})")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push(Coupler { i, j, value });
        }
        list.sort_by_key(|c| (c.i, c.j));
        if let Some(w) = list.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::param(format!(
                "coupler ({}, {}) given more than once",
                w[0].i, w[0].j
            )));
        }
        Ok(IsingInstance {
            n,
            h,
            couplers: list,
            planted: None,
            known_ground_energy: None,
            metadata: Metadata::default(),
        })
    }

    /// Zero-field instance with the given couplers.
    pub fn from_couplers(
        n: usize,
        couplers: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        Self::new(n, vec![0.0; n], couplers)
    }

    /// Attaches a planted configuration and its energy. The energy must match
    /// the planted state's energy.
    pub fn with_planted(mut self, planted: Vec<Spin>, ground_energy: f64) -> Result<Self> {
        let e = self.energy(&planted)?;
        if (e - ground_energy).abs() > ENERGY_TOLERANCE * (1.0 + e.abs()) {
            return Err(Error::param(format!(
                "planted energy {e} does not match declared ground energy {ground_energy}"
            )));
        }
        self.planted = Some(planted);
        self.known_ground_energy = Some(ground_energy);
        Ok(self)
    }

    /// Records a known ground energy without a planted state.
    pub fn with_ground_energy(mut self, energy: Option<f64>) -> Self {
        self.known_ground_energy = energy;
        self
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplers(&self) -> &[Coupler] {
        &self.couplers
    }

    pub fn planted(&self) -> Option<&[Spin]> {
        self.planted.as_deref()
    }

    pub fn known_ground_energy(&self) -> Option<f64> {
        self.known_ground_energy
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    /// Coupler value for the pair, zero if absent.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplers
            .binary_search_by_key(&key, |c| (c.i, c.j))
            .map(|k| self.couplers[k].value)
            .unwrap_or(0.0)
    }

    /// Logical edge list `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.couplers.iter().map(|c| (c.i, c.j)).collect()
    }

    /// Per-spin neighbour lists `(neighbour, J)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for c in &self.couplers {
            adj[c.i].push((c.j, c.value));
            adj[c.j].push((c.i, c.value));
        }
        adj
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplers.iter().fold(0.0, |m, c| m.max(c.value.abs()))
    }

    pub fn max_abs_field(&self) -> f64 {
        self.h.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when every pair of distinct spins carries a coupler entry.
    pub fn is_complete(&self) -> bool {
        self.couplers.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Energy of `state`; fails on a length mismatch or a non-±1 entry.
    pub fn energy(&self, state: &[Spin]) -> Result<f64> {
        if state.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: state.len(),
            });
        }
        if let Some(bad) = state.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::param(format!("spin value {bad} is not ±1")));
        }
        Ok(self.energy_unchecked(state))
    }

    pub(crate) fn energy_unchecked(&self, state: &[Spin]) -> f64 {
        let mut e = 0.0;
        for (h, &s) in self.h.iter().zip(state) {
            e += h * f64::from(s);
        }
        for c in &self.couplers {
            e += c.value * f64::from(state[c.i] * state[c.j]);
        }
        e
    }

    /// Copy of the instance with fields and couplers (and the known ground
    /// energy) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> IsingInstance {
        let mut out = self.clone();
        for v in &mut out.h {
            *v *= factor;
        }
        for c in &mut out.couplers {
            c.value *= factor;
        }
        out.known_ground_energy = self.known_ground_energy.map(|e| e * factor);
        out
    }

    /// Factor by which fields and couplers must be shrunk to fit the device
    /// ranges `h ∈ [−2, 2]`, `J ∈ [−1, 1]`. Returns 1 when already in range.
    pub fn device_scale(&self) -> f64 {
        let need = (self.max_abs_field() / DEVICE_FIELD_RANGE)
            .max(self.max_abs_coupling() / DEVICE_COUPLER_RANGE);
        if need > 1.0 {
            1.0 / need
        } else {
            1.0
        }
    }

    pub fn in_device_range(&self) -> bool {
        self.device_scale() == 1.0
    }

    /// Renormalizes into the device ranges, recording the applied scale in the
    /// metadata. Instances already in range are returned unchanged.
    pub fn renormalized(&self) -> IsingInstance {
        let scale = self.device_scale();
        if scale == 1.0 {
            return self.clone();
        }
        let mut out = self.scaled(scale);
        out.metadata
            .params
            .insert("renormalization_scale".into(), scale.into());
        out
    }
}

/// Applies the gauge `a`: `h_i → a_i h_i`, `J_ij → a_i a_j J_ij`, planted state
/// `→ a∘planted`. The known ground energy is unchanged.
pub fn gauge_transform(instance: &IsingInstance, gauge: &[Spin]) -> Result<IsingInstance> {
    if gauge.len() != instance.n {
        return Err(Error::LengthMismatch {
            expected: instance.n,
            got: gauge.len(),
        });
    }
    if gauge.iter().any(|&a| a != 1 && a != -1) {
        return Err(Error::param("gauge entries must be ±1"));
    }
    let mut out = instance.clone();
    for (h, &a) in out.h.iter_mut().zip(gauge) {
        if a < 0 {
            *h = -*h;
        }
    }
    for c in &mut out.couplers {
        if gauge[c.i] * gauge[c.j] < 0 {
            c.value = -c.value;
        }
    }
    if let Some(p) = &mut out.planted {
        for (s, &a) in p.iter_mut().zip(gauge) {
            *s *= a;
        }
    }
    Ok(out)
}

/// Elementwise product `a∘s`, the map between original and gauged states.
pub fn apply_gauge(gauge: &[Spin], state: &[Spin]) -> Vec<Spin> {
    gauge.iter().zip(state).map(|(a, s)| a * s).collect()
}

/// Spin configuration encoded by the low `n` bits of `index`; bit `i` set
/// means spin `i` is `−1`.
pub fn state_from_index(index: u64, n: usize) -> Vec<Spin> {
    (0..n)
        .map(|i| if (index >> i) & 1 == 1 { -1 } else { 1 })
        .collect()
}

pub fn index_from_state(state: &[Spin]) -> u64 {
    state
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &s)| if s < 0 { acc | (1 << i) } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_ferromagnet() {
        let p = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        assert_eq!(p.energy(&[1, 1]).unwrap(), -1.0);
        assert_eq!(p.energy(&[1, -1]).unwrap(), 1.0);
    }

    #[test]
    fn positive_field_prefers_down() {
        let p = IsingInstance::new(1, vec![1.0], []).unwrap();
        assert_eq!(p.energy(&[-1]).unwrap(), -1.0);
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let p = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        assert!(matches!(
            p.energy(&[1]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
        assert!(p.energy(&[1, 0]).is_err());
    }

    #[test]
    fn construction_invariants() {
        assert!(IsingInstance::from_couplers(2, [(0, 0, 1.0)]).is_err());
        assert!(IsingInstance::from_couplers(2, [(0, 2, 1.0)]).is_err());
        assert!(IsingInstance::from_couplers(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        let p = IsingInstance::from_couplers(3, [(2, 1, 0.5), (1, 0, 1.0)]).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(p.coupling(2, 1), 0.5);
        assert_eq!(p.coupling(0, 2), 0.0);
    }

    #[test]
    fn planted_energy_must_match() {
        let p = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        assert!(p.clone().with_planted(vec![1, 1], -1.0).is_ok());
        assert!(p.with_planted(vec![1, -1], -1.0).is_err());
    }

    #[test]
    fn gauge_identity_and_flip() {
        let p = IsingInstance::new(3, vec![0.5, -1.0, 2.0], [(0, 1, -1.0), (1, 2, 0.25)]).unwrap();
        assert_eq!(gauge_transform(&p, &[1, 1, 1]).unwrap(), p);
        let q = gauge_transform(&p, &[-1, -1, -1]).unwrap();
        assert_eq!(q.h(), &[-0.5, 1.0, -2.0]);
        assert_eq!(q.couplers(), p.couplers());
        assert!(gauge_transform(&p, &[1, 1]).is_err());
    }

    #[test]
    fn gauge_maps_planted_and_keeps_ground_energy() {
        let p = IsingInstance::from_couplers(2, [(0, 1, -1.0)])
            .unwrap()
            .with_planted(vec![1, 1], -1.0)
            .unwrap();
        let q = gauge_transform(&p, &[1, -1]).unwrap();
        assert_eq!(q.planted(), Some(&[1, -1][..]));
        assert_eq!(q.known_ground_energy(), Some(-1.0));
        assert_eq!(q.energy(q.planted().unwrap()).unwrap(), -1.0);
    }

    #[test]
    fn renormalization_fits_device_range() {
        let p = IsingInstance::new(2, vec![4.0, 0.0], [(0, 1, 3.0)]).unwrap();
        let r = p.renormalized();
        assert!(r.in_device_range());
        assert!((r.max_abs_coupling() - 1.0).abs() < 1e-15);
        assert!(r.metadata().params.contains_key("renormalization_scale"));
    }

    #[test]
    fn index_state_round_trip() {
        for idx in 0..16u64 {
            assert_eq!(index_from_state(&state_from_index(idx, 4)), idx);
        }
        assert_eq!(state_from_index(1, 2), vec![-1, 1]);
    }
}
