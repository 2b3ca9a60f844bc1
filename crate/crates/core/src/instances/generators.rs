use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{IsingInstance, Metadata, Spin};
use crate::error::{Error, Result};
use crate::rng;
use crate::topology::HardwareGraph;

/// Random `J = ±1` on every active coupler, zero fields.
pub fn gen_random_pm1(graph: &HardwareGraph, seed: u64) -> IsingInstance {
    let mut rng = rng::stream(seed, 0);
    let couplers: Vec<_> = graph
        .active_couplers()
        .map(|(a, b)| (a, b, if rng.gen::<bool>() { 1.0 } else { -1.0 }))
        .collect();
    IsingInstance::from_couplers(graph.num_qubits(), couplers)
        .expect("chimera couplers are valid")
        .with_metadata(
            Metadata::new("random_pm1")
                .with_seed(seed)
                .param("grid_size", graph.grid_size()),
        )
}

/// Couplers drawn uniformly from `{±1, …, ±k}` and divided by `k`.
pub fn gen_range_k(graph: &HardwareGraph, k: u32, seed: u64) -> Result<IsingInstance> {
    if k == 0 {
        return Err(Error::param("range k must be at least 1"));
    }
    let mut rng = rng::stream(seed, 0);
    let scale = f64::from(k);
    let couplers: Vec<_> = graph
        .active_couplers()
        .map(|(a, b)| {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let magnitude = f64::from(rng.gen_range(1..=k));
            (a, b, sign * magnitude / scale)
        })
        .collect();
    Ok(IsingInstance::from_couplers(graph.num_qubits(), couplers)?.with_metadata(
        Metadata::new("range_k")
            .with_seed(seed)
            .param("k", k)
            .param("grid_size", graph.grid_size()),
    ))
}

/// Index layout of the signature gadget: core spins `0..n_core` form a ring,
/// outer spin `n_core + i` hangs off core spin `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureLayout {
    pub n_core: usize,
}

impl SignatureLayout {
    pub fn num_spins(&self) -> usize {
        2 * self.n_core
    }

    /// The all-down ground state.
    pub fn isolated_state(&self) -> Vec<Spin> {
        vec![-1; self.num_spins()]
    }

    /// The `2^n_core` ground states with the core up and outer spins free.
    pub fn cluster_states(&self) -> Vec<Vec<Spin>> {
        (0..1u64 << self.n_core)
            .map(|bits| {
                let mut s = vec![1; self.num_spins()];
                for i in 0..self.n_core {
                    if (bits >> i) & 1 == 1 {
                        s[self.n_core + i] = -1;
                    }
                }
                s
            })
            .collect()
    }

    pub fn is_isolated(&self, state: &[Spin]) -> bool {
        state.iter().all(|&s| s == -1)
    }

    pub fn is_cluster(&self, state: &[Spin]) -> bool {
        state[..self.n_core].iter().all(|&s| s == 1)
    }
}

/// Ring-plus-spokes gadget whose ground space is `2^n_core` cluster states
/// plus one isolated state, all at energy `−2 n_core`.
///
/// Couplers are ferromagnetic (`J = −1`); core fields are `−1` and outer
/// fields `+1`, so the all-up core and the all-down configuration tie.
pub fn gen_signature(n_core: usize) -> Result<IsingInstance> {
    if n_core < 3 {
        return Err(Error::param(format!("n_core must be at least 3, got {n_core}")));
    }
    let n = 2 * n_core;
    let mut h = vec![-1.0; n_core];
    h.extend(std::iter::repeat_n(1.0, n_core));
    let mut couplers = Vec::with_capacity(n);
    for i in 0..n_core {
        couplers.push((i, (i + 1) % n_core, -1.0));
        couplers.push((i, n_core + i, -1.0));
    }
    Ok(IsingInstance::new(n, h, couplers)?
        .with_ground_energy(Some(-2.0 * n_core as f64))
        .with_metadata(Metadata::new("signature").param("n_core", n_core)))
}

/// Layout of the weak-strong probe: spins `0..8` are the weak (left) cell,
/// `8..16` the strong (right) cell, each in Chimera cell-local order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeakStrongLayout;

impl WeakStrongLayout {
    pub const WEAK: std::ops::Range<usize> = 0..8;
    pub const STRONG: std::ops::Range<usize> = 8..16;

    /// Global minimum: every spin along the strong field.
    pub fn aligned_state() -> Vec<Spin> {
        vec![1; 16]
    }

    /// Local minimum: each cell internally aligned, cells opposed.
    pub fn opposed_state() -> Vec<Spin> {
        let mut s = vec![1; 16];
        s[Self::WEAK].fill(-1);
        s
    }
}

/// Two ferromagnetic `K₄,₄` cells joined by their four horizontal couplers,
/// with field `h_L` (weak) on the left cell and `−1` (strong) on the right.
/// Both fields oppose each other; the strong one wins the global minimum.
pub fn gen_weak_strong(h_l: f64) -> Result<IsingInstance> {
    if !(h_l > 0.0 && h_l < 0.5) {
        return Err(Error::param(format!("h_L must lie in (0, 0.5), got {h_l}")));
    }
    let mut couplers = Vec::with_capacity(36);
    for base in [0, 8] {
        for v in 0..4 {
            for hq in 4..8 {
                couplers.push((base + v, base + hq, -1.0));
            }
        }
    }
    for hq in 4..8 {
        couplers.push((hq, 8 + hq, -1.0));
    }
    let mut h = vec![h_l; 8];
    h.extend(std::iter::repeat_n(-1.0, 8));
    Ok(IsingInstance::new(16, h, couplers)?
        .with_metadata(Metadata::new("weak_strong").param("h_l", h_l)))
}

/// Frustrated-loop instance with a planted ground state.
///
/// `round(alpha · N_active)` loops are drawn by non-backtracking random walks
/// that stop at the first self-intersection. Each loop satisfies the planted
/// state on all but one uniformly chosen edge, contributing `−(L − 2)` to the
/// planted energy. Loops that would push an accumulated `|J|` above
/// `coupler_cap` are redrawn, at most `100 · M` times in total.
pub fn gen_frustrated_loops(
    graph: &HardwareGraph,
    alpha: f64,
    coupler_cap: f64,
    seed: u64,
    planted: Option<&[Spin]>,
) -> Result<IsingInstance> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::param(format!("loop density must be ≥ 0, got {alpha}")));
    }
    if !(coupler_cap >= 1.0) {
        return Err(Error::param(format!("coupler cap must be ≥ 1, got {coupler_cap}")));
    }
    let n = graph.num_qubits();
    let mut rng = rng::stream(seed, 0);
    let planted: Vec<Spin> = match planted {
        Some(p) if p.len() != n => {
            return Err(Error::LengthMismatch {
                expected: n,
                got: p.len(),
            })
        }
        Some(p) => {
            if p.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::param("planted entries must be ±1"));
            }
            p.to_vec()
        }
        None => (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
    };
    let loops = (alpha * graph.num_active_qubits() as f64).round() as usize;
    let adj = graph.active_adjacency();
    let starts: Vec<usize> = graph.active_qubits().filter(|&q| adj[q].len() >= 2).collect();
    if loops > 0 && starts.is_empty() {
        return Err(Error::Generation(
            "graph has no active qubit of degree ≥ 2 to start a loop".into(),
        ));
    }

    let max_steps = 2 * n;
    let budget = 100 * loops;
    let mut rejected = 0usize;
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut lengths = Vec::with_capacity(loops);
    let mut ground = 0.0;
    while lengths.len() < loops {
        let cycle = random_cycle(&adj, &starts, max_steps, &mut rng);
        let len = cycle.len();
        let violated = rng.gen_range(0..len);
        let terms: Vec<((usize, usize), f64)> = (0..len)
            .map(|k| {
                let (a, b) = (cycle[k], cycle[(k + 1) % len]);
                let satisfied = -f64::from(planted[a] * planted[b]);
                let value = if k == violated { -satisfied } else { satisfied };
                ((a.min(b), a.max(b)), value)
            })
            .collect();
        let fits = terms
            .iter()
            .all(|(e, v)| (acc.get(e).copied().unwrap_or(0.0) + v).abs() <= coupler_cap);
        if !fits {
            rejected += 1;
            if rejected > budget {
                return Err(Error::Generation(format!(
                    "frustrated loops did not converge: {rejected} loops rejected \
                     (alpha = {alpha}, R = {coupler_cap})"
                )));
            }
            continue;
        }
        for (e, v) in terms {
            *acc.entry(e).or_insert(0.0) += v;
        }
        ground -= (len - 2) as f64;
        lengths.push(len);
    }

    let couplers: Vec<_> = acc
        .into_iter()
        .filter(|(_, v)| *v != 0.0)
        .map(|((a, b), v)| (a, b, v))
        .collect();
    let metadata = Metadata::new("frustrated_loops")
        .with_seed(seed)
        .param("alpha", alpha)
        .param("coupler_cap", coupler_cap)
        .param("grid_size", graph.grid_size())
        .param("loop_lengths", lengths);
    IsingInstance::from_couplers(n, couplers)?
        .with_metadata(metadata)
        .with_planted(planted, ground)
}

/// Non-backtracking walk until it revisits a vertex; returns the closed cycle.
fn random_cycle(
    adj: &[Vec<usize>],
    starts: &[usize],
    max_steps: usize,
    rng: &mut rng::StreamRng,
) -> Vec<usize> {
    'restart: loop {
        let start = *starts.choose(rng).expect("nonempty start set");
        let mut path = vec![start];
        let mut position = BTreeMap::from([(start, 0usize)]);
        let mut prev: Option<usize> = None;
        for _ in 0..max_steps {
            let here = *path.last().unwrap();
            let options: Vec<usize> = adj[here].iter().copied().filter(|&v| Some(v) != prev).collect();
            let Some(&next) = options.choose(rng) else {
                continue 'restart;
            };
            if let Some(&k) = position.get(&next) {
                return path.split_off(k);
            }
            position.insert(next, path.len());
            path.push(next);
            prev = Some(here);
        }
    }
}
