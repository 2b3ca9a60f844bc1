//! Exhaustive ground-state search.
//!
//! Spins are split into a conditioning set, enumerated exhaustively in Gray
//! code order, and a forest that is minimized exactly for each assignment by
//! min-sum dynamic programming with tie counting. The conditioning set comes
//! from repeatedly peeling degree ≤ 1 vertices and, when none is left,
//! conditioning on the highest-degree vertex. The result is the exact minimum
//! over all `2ⁿ` states together with every state attaining it.

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Spin, ENERGY_TOLERANCE};

/// Largest conditioning set the enumerator accepts (`2^30` assignments).
pub const MAX_ENUMERATION_WIDTH: usize = 30;

/// Ground states collected by [`solve_exact`] before truncating the list.
pub const DEFAULT_STATE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub ground_energy: f64,
    /// Number of ground states (saturating).
    pub degeneracy: u128,
    pub ground_states: Vec<Vec<Spin>>,
    /// True when `ground_states` holds fewer than `degeneracy` entries.
    pub truncated: bool,
    /// Size of the enumerated conditioning set.
    pub enumeration_width: usize,
}

pub fn solve_exact(instance: &IsingInstance) -> Result<ExactSolution> {
    solve_exact_with_limit(instance, DEFAULT_STATE_LIMIT)
}

/// As [`solve_exact`], listing at most `state_limit` ground states.
pub fn solve_exact_with_limit(instance: &IsingInstance, state_limit: usize) -> Result<ExactSolution> {
    let plan = Plan::new(instance);
    let width = plan.conditioned.len();
    if width > MAX_ENUMERATION_WIDTH {
        return Err(Error::SizeLimit(format!(
            "exact enumeration needs {width} conditioned spins (n = {}), limit is {MAX_ENUMERATION_WIDTH}",
            instance.n()
        )));
    }
    let state_limit = state_limit.max(1);
    let mut work = Workspace::new(&plan);

    let mut best = f64::INFINITY;
    let mut degeneracy: u128 = 0;
    let mut winners: Vec<u64> = Vec::new();
    let mut mask: u64 = 0;
    let total: u64 = 1 << width;
    for step in 0..total {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            work.flip_conditioned(&plan, bit);
        }
        let (forest_min, count) = work.forest_minimum(&plan);
        let energy = work.conditioned_energy + forest_min;
        if energy < best - ENERGY_TOLERANCE {
            best = energy;
            degeneracy = count;
            winners.clear();
            winners.push(mask);
        } else if (energy - best).abs() <= ENERGY_TOLERANCE {
            degeneracy = degeneracy.saturating_add(count);
            if winners.len() < state_limit {
                winners.push(mask);
            }
        }
    }

    let mut states = Vec::new();
    for &m in &winners {
        if states.len() >= state_limit {
            break;
        }
        work.set_conditioned(&plan, m);
        work.forest_minimum(&plan);
        work.enumerate(&plan, state_limit, &mut states);
    }
    let ground_energy = instance.energy_unchecked(&states[0]);
    Ok(ExactSolution {
        ground_energy,
        truncated: (states.len() as u128) < degeneracy,
        degeneracy,
        ground_states: states,
        enumeration_width: width,
    })
}

struct Plan {
    n: usize,
    h: Vec<f64>,
    conditioned: Vec<usize>,
    /// Conditioned-to-conditioned couplers, by conditioned slot.
    cond_links: Vec<Vec<(usize, f64)>>,
    /// Forest vertices adjacent to each conditioned slot.
    cond_to_forest: Vec<Vec<(usize, f64)>>,
    /// Forest vertices, children before parents.
    order: Vec<usize>,
    parent: Vec<Option<(usize, f64)>>,
}

impl Plan {
    fn new(instance: &IsingInstance) -> Plan {
        let n = instance.n();
        let adj = instance.adjacency();
        let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut conditioned = Vec::new();
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| degree[v] <= 1).collect();
        let mut left = n;
        loop {
            while let Some(v) = stack.pop() {
                if removed[v] {
                    continue;
                }
                removed[v] = true;
                left -= 1;
                order.push(v);
                for &(u, _) in &adj[v] {
                    if !removed[u] {
                        degree[u] -= 1;
                        if degree[u] == 1 {
                            stack.push(u);
                        }
                    }
                }
            }
            if left == 0 {
                break;
            }
            let v = (0..n)
                .filter(|&v| !removed[v])
                .max_by_key(|&v| (degree[v], std::cmp::Reverse(v)))
                .expect("vertices remain");
            removed[v] = true;
            left -= 1;
            conditioned.push(v);
            for &(u, _) in &adj[v] {
                if !removed[u] {
                    degree[u] -= 1;
                    if degree[u] <= 1 {
                        stack.push(u);
                    }
                }
            }
        }

        let mut slot = vec![usize::MAX; n];
        for (k, &v) in conditioned.iter().enumerate() {
            slot[v] = k;
        }
        let mut position = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        let mut parent = vec![None; n];
        let mut cond_links = vec![Vec::new(); conditioned.len()];
        let mut cond_to_forest = vec![Vec::new(); conditioned.len()];
        for v in 0..n {
            for &(u, w) in &adj[v] {
                if slot[v] != usize::MAX {
                    if slot[u] != usize::MAX {
                        cond_links[slot[v]].push((slot[u], w));
                    } else {
                        cond_to_forest[slot[v]].push((u, w));
                    }
                } else if slot[u] == usize::MAX && position[u] > position[v] {
                    debug_assert!(parent[v].is_none(), "peeling yields at most one later neighbour");
                    parent[v] = Some((u, w));
                }
            }
        }
        Plan {
            n,
            h: instance.h().to_vec(),
            conditioned,
            cond_links,
            cond_to_forest,
            order,
            parent,
        }
    }
}

struct Workspace {
    spins: Vec<Spin>,
    /// `h_v + Σ_{u conditioned} J_uv s_u` for forest vertices.
    effective_field: Vec<f64>,
    conditioned_energy: f64,
    /// Subtree minimum given own value, index 0 for +1 and 1 for −1.
    cost: Vec<[f64; 2]>,
    count: Vec<[u128; 2]>,
}

const VALUES: [Spin; 2] = [1, -1];

impl Workspace {
    fn new(plan: &Plan) -> Workspace {
        let mut w = Workspace {
            spins: vec![1; plan.n],
            effective_field: plan.h.clone(),
            conditioned_energy: 0.0,
            cost: vec![[0.0; 2]; plan.n],
            count: vec![[1; 2]; plan.n],
        };
        w.set_conditioned(plan, 0);
        w
    }

    fn set_conditioned(&mut self, plan: &Plan, mask: u64) {
        for (k, &v) in plan.conditioned.iter().enumerate() {
            self.spins[v] = if (mask >> k) & 1 == 1 { -1 } else { 1 };
        }
        self.effective_field.copy_from_slice(&plan.h);
        let mut e = 0.0;
        for (k, &v) in plan.conditioned.iter().enumerate() {
            let s = f64::from(self.spins[v]);
            e += plan.h[v] * s;
            for &(other, w) in &plan.cond_links[k] {
                if other > k {
                    e += w * s * f64::from(self.spins[plan.conditioned[other]]);
                }
            }
            for &(u, w) in &plan.cond_to_forest[k] {
                self.effective_field[u] += w * s;
            }
        }
        self.conditioned_energy = e;
    }

    fn flip_conditioned(&mut self, plan: &Plan, k: usize) {
        let v = plan.conditioned[k];
        let old = f64::from(self.spins[v]);
        let mut local = plan.h[v];
        for &(other, w) in &plan.cond_links[k] {
            local += w * f64::from(self.spins[plan.conditioned[other]]);
        }
        self.conditioned_energy -= 2.0 * old * local;
        self.spins[v] = -self.spins[v];
        for &(u, w) in &plan.cond_to_forest[k] {
            self.effective_field[u] -= 2.0 * w * old;
        }
    }

    /// Minimum forest energy and its multiplicity for the current conditioning.
    fn forest_minimum(&mut self, plan: &Plan) -> (f64, u128) {
        for &v in &plan.order {
            self.cost[v] = [0.0; 2];
            self.count[v] = [1; 2];
        }
        let mut total = 0.0;
        let mut multiplicity: u128 = 1;
        for &v in &plan.order {
            let field = self.effective_field[v];
            self.cost[v][0] += field;
            self.cost[v][1] -= field;
            let own = self.cost[v];
            let own_count = self.count[v];
            match plan.parent[v] {
                Some((p, w)) => {
                    for (xi, &x) in VALUES.iter().enumerate() {
                        let options = [
                            w * f64::from(x) + own[0],
                            -w * f64::from(x) + own[1],
                        ];
                        let (m, c) = min_with_count(options, own_count);
                        self.cost[p][xi] += m;
                        self.count[p][xi] = self.count[p][xi].saturating_mul(c);
                    }
                }
                None => {
                    let (m, c) = min_with_count(own, own_count);
                    total += m;
                    multiplicity = multiplicity.saturating_mul(c);
                }
            }
        }
        (total, multiplicity)
    }

    /// Appends every optimal forest completion of the current conditioning.
    fn enumerate(&mut self, plan: &Plan, limit: usize, out: &mut Vec<Vec<Spin>>) {
        let reversed: Vec<usize> = plan.order.iter().rev().copied().collect();
        let mut spins = self.spins.clone();
        self.descend(plan, &reversed, 0, &mut spins, limit, out);
    }

    fn descend(
        &self,
        plan: &Plan,
        reversed: &[usize],
        k: usize,
        spins: &mut Vec<Spin>,
        limit: usize,
        out: &mut Vec<Vec<Spin>>,
    ) {
        if out.len() >= limit {
            return;
        }
        let Some(&v) = reversed.get(k) else {
            out.push(spins.clone());
            return;
        };
        let options = match plan.parent[v] {
            Some((p, w)) => {
                let xp = f64::from(spins[p]);
                [w * xp + self.cost[v][0], -w * xp + self.cost[v][1]]
            }
            None => self.cost[v],
        };
        let m = options[0].min(options[1]);
        for (xi, &x) in VALUES.iter().enumerate() {
            if options[xi] - m <= ENERGY_TOLERANCE {
                spins[v] = x;
                self.descend(plan, reversed, k + 1, spins, limit, out);
            }
        }
    }
}

fn min_with_count(values: [f64; 2], counts: [u128; 2]) -> (f64, u128) {
    let m = values[0].min(values[1]);
    let mut c: u128 = 0;
    for k in 0..2 {
        if values[k] - m <= ENERGY_TOLERANCE {
            c = c.saturating_add(counts[k]);
        }
    }
    (m, c)
}
