//! Chimera hardware graphs, clique embeddings and minor embedding.
//!
//! Qubits are indexed row-major over unit cells, then by cell-local index
//! 0–7: indices 0–3 form the vertical partition (coupled to the cell below),
//! 4–7 the horizontal partition (coupled to the cell to the right).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Metadata};

pub const CELL_SIZE: usize = 8;
const HALF_CELL: usize = 4;

/// Chimera `C_s` graph with qubit and coupler availability masks.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareGraph {
    grid_size: usize,
    qubit_active: Vec<bool>,
    couplers: Vec<(usize, usize)>,
    coupler_active: Vec<bool>,
}

impl HardwareGraph {
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_active.len()
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.qubit_active.get(q).copied().unwrap_or(false)
    }

    pub fn active_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_qubits()).filter(|&q| self.qubit_active[q])
    }

    pub fn num_active_qubits(&self) -> usize {
        self.qubit_active.iter().filter(|&&a| a).count()
    }

    pub fn inactive_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| !self.qubit_active[q]).collect()
    }

    /// All couplers of the full graph, `(a, b)` with `a < b`, sorted.
    pub fn couplers(&self) -> &[(usize, usize)] {
        &self.couplers
    }

    pub fn active_couplers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.couplers
            .iter()
            .zip(&self.coupler_active)
            .filter(|(_, &a)| a)
            .map(|(&c, _)| c)
    }

    pub fn num_active_couplers(&self) -> usize {
        self.coupler_active.iter().filter(|&&a| a).count()
    }

    /// Couplers switched off individually (endpoints active).
    pub fn disabled_couplers(&self) -> Vec<(usize, usize)> {
        self.couplers
            .iter()
            .zip(&self.coupler_active)
            .filter(|(&(a, b), &on)| !on && self.qubit_active[a] && self.qubit_active[b])
            .map(|(&c, _)| c)
            .collect()
    }

    pub fn has_active_coupler(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplers
            .binary_search(&key)
            .map(|k| self.coupler_active[k])
            .unwrap_or(false)
    }

    /// Neighbour lists over active couplers.
    pub fn active_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_qubits()];
        for (a, b) in self.active_couplers() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn qubit_index(&self, row: usize, col: usize, k: usize) -> usize {
        (row * self.grid_size + col) * CELL_SIZE + k
    }

    /// `(row, col, cell-local index)` of a qubit.
    pub fn coordinates(&self, q: usize) -> (usize, usize, usize) {
        let cell = q / CELL_SIZE;
        (cell / self.grid_size, cell % self.grid_size, q % CELL_SIZE)
    }

    /// Qubits of each unit cell, useful as SA cluster moves.
    pub fn unit_cells(&self) -> Vec<Vec<usize>> {
        (0..self.grid_size * self.grid_size)
            .map(|c| (c * CELL_SIZE..(c + 1) * CELL_SIZE).collect())
            .collect()
    }

    /// Copy with the listed couplers switched off.
    pub fn with_disabled_couplers(&self, pairs: &[(usize, usize)]) -> Result<HardwareGraph> {
        let mut g = self.clone();
        for &(a, b) in pairs {
            let key = if a < b { (a, b) } else { (b, a) };
            let k = g
                .couplers
                .binary_search(&key)
                .map_err(|_| Error::param(format!("({a}, {b}) is not a Chimera coupler")))?;
            g.coupler_active[k] = false;
        }
        Ok(g)
    }

    fn is_full(&self) -> bool {
        self.qubit_active.iter().all(|&a| a) && self.coupler_active.iter().all(|&a| a)
    }
}

/// Builds `C_s` with the listed qubits (and their couplers) deactivated.
pub fn build_chimera(grid_size: usize, inactive_qubits: &[usize]) -> Result<HardwareGraph> {
    if grid_size == 0 {
        return Err(Error::param("grid size must be at least 1"));
    }
    let s = grid_size;
    let count = CELL_SIZE * s * s;
    let mut qubit_active = vec![true; count];
    for &q in inactive_qubits {
        if q >= count {
            return Err(Error::InvalidQubit {
                qubit: q,
                grid_size: s,
                count,
            });
        }
        qubit_active[q] = false;
    }
    let idx = |r: usize, c: usize, k: usize| (r * s + c) * CELL_SIZE + k;
    let mut couplers = Vec::with_capacity(16 * s * s + 8 * s * (s - 1));
    for r in 0..s {
        for c in 0..s {
            for v in 0..HALF_CELL {
                for h in HALF_CELL..CELL_SIZE {
                    couplers.push((idx(r, c, v), idx(r, c, h)));
                }
            }
            if r + 1 < s {
                for v in 0..HALF_CELL {
                    couplers.push((idx(r, c, v), idx(r + 1, c, v)));
                }
            }
            if c + 1 < s {
                for h in HALF_CELL..CELL_SIZE {
                    couplers.push((idx(r, c, h), idx(r, c + 1, h)));
                }
            }
        }
    }
    couplers.sort_unstable();
    let coupler_active = couplers
        .iter()
        .map(|&(a, b)| qubit_active[a] && qubit_active[b])
        .collect();
    Ok(HardwareGraph {
        grid_size: s,
        qubit_active,
        couplers,
        coupler_active,
    })
}

/// How strongly each chain is bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStrength {
    /// `max |J|` of the logical instance being embedded (1 if it has none).
    Auto,
    Uniform(f64),
    PerChain(Vec<f64>),
}

/// Map from logical variable `i` to the chain `chains[i]` of physical qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub chains: Vec<Vec<usize>>,
    pub chain_strength: ChainStrength,
}

impl Embedding {
    pub fn new(chains: Vec<Vec<usize>>) -> Self {
        Embedding {
            chains,
            chain_strength: ChainStrength::Auto,
        }
    }

    pub fn with_chain_strength(mut self, strength: ChainStrength) -> Self {
        self.chain_strength = strength;
        self
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical_qubits(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Resolved per-chain strengths for embedding `logical`.
    pub fn strengths_for(&self, logical: &IsingInstance) -> Result<Vec<f64>> {
        let strengths = match &self.chain_strength {
            ChainStrength::Auto => {
                let m = logical.max_abs_coupling();
                vec![if m > 0.0 { m } else { 1.0 }; self.chains.len()]
            }
            ChainStrength::Uniform(v) => vec![*v; self.chains.len()],
            ChainStrength::PerChain(v) => {
                if v.len() != self.chains.len() {
                    return Err(Error::LengthMismatch {
                        expected: self.chains.len(),
                        got: v.len(),
                    });
                }
                v.clone()
            }
        };
        if strengths.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("chain strengths must be finite and nonnegative"));
        }
        Ok(strengths)
    }

    /// One chain per line, qubit ids separated by spaces.
    pub fn to_adjacency_list(&self) -> String {
        let mut out = String::new();
        for chain in &self.chains {
            let line: Vec<String> = chain.iter().map(|q| q.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_adjacency_list(text: &str) -> Result<Embedding> {
        let chains = text
            .lines()
            .map(|line| {
                line.split_whitespace()
                    .map(|tok| {
                        tok.parse::<usize>()
                            .map_err(|_| Error::Format(format!("bad qubit id {tok:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Embedding::new(chains))
    }
}

/// Standard triangular embedding of `K_clique_size` into a full `C_s`.
///
/// Variable `4g + k` owns horizontal qubit `4 + k` in cells `(g, 0..=g)` and
/// vertical qubit `k` in cells `(g..s, g)`; chains therefore have length
/// `s + 1` and meet pairwise in cell `(max g, min g)`.
pub fn clique_embedding(clique_size: usize, graph: &HardwareGraph) -> Result<Embedding> {
    let s = graph.grid_size();
    if clique_size == 0 {
        return Err(Error::param("clique size must be at least 1"));
    }
    if clique_size > HALF_CELL * s {
        return Err(Error::param(format!(
            "K_{clique_size} does not fit in C_{s}: capacity is {}",
            HALF_CELL * s
        )));
    }
    if !graph.is_full() {
        return Err(Error::Unsupported(
            "clique embedding requires a graph with no inactive qubits or couplers".into(),
        ));
    }
    let chains = (0..clique_size)
        .map(|var| {
            let (g, k) = (var / HALF_CELL, var % HALF_CELL);
            let mut chain: Vec<usize> = (0..=g)
                .map(|c| graph.qubit_index(g, c, HALF_CELL + k))
                .collect();
            chain.extend((g..s).map(|r| graph.qubit_index(r, g, k)));
            chain
        })
        .collect();
    Ok(Embedding::new(chains))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Overlap { qubit: usize, chains: (usize, usize) },
    Disconnected { chain: usize },
    EmptyChain { chain: usize },
    UncoveredEdge { edge: (usize, usize) },
    MissingChain { variable: usize },
    InactiveQubit { chain: usize, qubit: usize },
    InvalidQubit { chain: usize, qubit: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { qubit, chains } => {
                write!(f, "overlap: qubit {qubit} in chains {} and {}", chains.0, chains.1)
            }
            Violation::Disconnected { chain } => write!(f, "disconnected: chain {chain}"),
            Violation::EmptyChain { chain } => write!(f, "empty: chain {chain}"),
            Violation::UncoveredEdge { edge } => {
                write!(f, "uncovered: logical edge ({}, {})", edge.0, edge.1)
            }
            Violation::MissingChain { variable } => {
                write!(f, "missing: no chain for variable {variable}")
            }
            Violation::InactiveQubit { chain, qubit } => {
                write!(f, "inactive: chain {chain} uses inactive qubit {qubit}")
            }
            Violation::InvalidQubit { chain, qubit } => {
                write!(f, "invalid: chain {chain} uses nonexistent qubit {qubit}")
            }
        }
    }
}

/// Violations found by [`validate_embedding`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_embedding(
    embedding: &Embedding,
    logical_edges: &[(usize, usize)],
    graph: &HardwareGraph,
) -> ValidationReport {
    let mut violations = Vec::new();
    let n = graph.num_qubits();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reported_overlaps = BTreeSet::new();
    for (c, chain) in embedding.chains.iter().enumerate() {
        if chain.is_empty() {
            violations.push(Violation::EmptyChain { chain: c });
        }
        for &q in chain {
            if q >= n {
                violations.push(Violation::InvalidQubit { chain: c, qubit: q });
                continue;
            }
            if !graph.is_active(q) {
                violations.push(Violation::InactiveQubit { chain: c, qubit: q });
            }
            match owner.get(&q) {
                Some(&other) if other != c => {
                    if reported_overlaps.insert((q, other, c)) {
                        violations.push(Violation::Overlap {
                            qubit: q,
                            chains: (other, c),
                        });
                    }
                }
                _ => {
                    owner.insert(q, c);
                }
            }
        }
    }

    let adj = graph.active_adjacency();
    for (c, chain) in embedding.chains.iter().enumerate() {
        let members: BTreeSet<usize> = chain.iter().copied().filter(|&q| q < n).collect();
        if members.len() <= 1 {
            continue;
        }
        let start = *members.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for &nb in &adj[q] {
                if members.contains(&nb) && seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        if seen.len() != members.len() {
            violations.push(Violation::Disconnected { chain: c });
        }
    }

    let mut missing = BTreeSet::new();
    for &(a, b) in logical_edges {
        for v in [a, b] {
            if v >= embedding.chains.len() && missing.insert(v) {
                violations.push(Violation::MissingChain { variable: v });
            }
        }
        if a >= embedding.chains.len() || b >= embedding.chains.len() {
            continue;
        }
        if chain_coupler(&embedding.chains[a], &embedding.chains[b], graph).is_none() {
            violations.push(Violation::UncoveredEdge {
                edge: (a.min(b), a.max(b)),
            });
        }
    }
    ValidationReport { violations }
}

/// Lowest `(min, max)` qubit pair with an active coupler between two chains.
fn chain_coupler(a: &[usize], b: &[usize], graph: &HardwareGraph) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for &p in a {
        for &q in b {
            if graph.has_active_coupler(p, q) {
                let pair = (p.min(q), p.max(q));
                if best.is_none_or(|b| pair < b) {
                    best = Some(pair);
                }
            }
        }
    }
    best
}

/// Active couplers joining two qubits of the same chain.
pub fn intra_chain_couplers(chain: &[usize], graph: &HardwareGraph) -> Vec<(usize, usize)> {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    graph
        .active_couplers()
        .filter(|(a, b)| members.contains(a) && members.contains(b))
        .collect()
}

/// Places a logical instance on the hardware graph through `embedding`.
///
/// Fields are split equally over chain qubits, each logical coupler goes on
/// the lowest-indexed available physical coupler between the two chains, and
/// every intra-chain coupler is set to `−chain_strength`. The physical
/// instance spans all qubits of the graph; unused qubits carry nothing.
pub fn minor_embed_instance(
    logical: &IsingInstance,
    embedding: &Embedding,
    graph: &HardwareGraph,
) -> Result<IsingInstance> {
    let mut report = validate_embedding(embedding, &logical.edges(), graph);
    for v in embedding.chains.len()..logical.n() {
        if !report
            .violations
            .contains(&Violation::MissingChain { variable: v })
        {
            report.violations.push(Violation::MissingChain { variable: v });
        }
    }
    if !report.is_valid() {
        return Err(Error::InvalidEmbedding(report));
    }
    let strengths = embedding.strengths_for(logical)?;
    let n = graph.num_qubits();
    let mut h = vec![0.0; n];
    let mut j: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (v, chain) in embedding.chains.iter().enumerate().take(logical.n()) {
        let share = logical.h()[v] / chain.len() as f64;
        for &q in chain {
            h[q] += share;
        }
    }
    for c in logical.couplers() {
        let pair = chain_coupler(&embedding.chains[c.i], &embedding.chains[c.j], graph)
            .expect("validated embedding covers every logical edge");
        *j.entry(pair).or_insert(0.0) += c.value;
    }
    for (v, chain) in embedding.chains.iter().enumerate() {
        for pair in intra_chain_couplers(chain, graph) {
            *j.entry(pair).or_insert(0.0) -= strengths[v];
        }
    }
    let metadata = Metadata::new("minor_embedding")
        .param("logical_generator", logical.metadata().generator.clone())
        .param("grid_size", graph.grid_size())
        .param("chain_strengths", strengths);
    Ok(
        IsingInstance::new(n, h, j.into_iter().map(|((a, b), v)| (a, b, v)))?
            .with_metadata(metadata),
    )
}

/// Chain penalty constant: `Σ_c strength_c × (intra-chain couplers of c)`.
pub fn chain_penalty_offset(
    logical: &IsingInstance,
    embedding: &Embedding,
    graph: &HardwareGraph,
) -> Result<f64> {
    let strengths = embedding.strengths_for(logical)?;
    Ok(embedding
        .chains
        .iter()
        .zip(&strengths)
        .map(|(chain, s)| s * intra_chain_couplers(chain, graph).len() as f64)
        .sum())
}

/// Extends a logical state over the chains (unused qubits set to +1).
pub fn chain_extend(
    state: &[crate::instances::Spin],
    embedding: &Embedding,
    num_qubits: usize,
) -> Vec<crate::instances::Spin> {
    let mut out = vec![1; num_qubits];
    for (v, chain) in embedding.chains.iter().enumerate().take(state.len()) {
        for &q in chain {
            out[q] = state[v];
        }
    }
    out
}

/// Majority vote over each chain (ties go to +1), the usual readout of an
/// embedded sample.
pub fn unembed_majority(
    physical: &[crate::instances::Spin],
    embedding: &Embedding,
) -> Vec<crate::instances::Spin> {
    embedding
        .chains
        .iter()
        .map(|chain| {
            let sum: i32 = chain.iter().map(|&q| i32::from(physical[q])).sum();
            if sum >= 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    version: String,
    grid_size: usize,
    inactive_qubits: Vec<usize>,
    #[serde(default)]
    disabled_couplers: Vec<(usize, usize)>,
}

impl HardwareGraph {
    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            version: crate::VERSION.to_string(),
            grid_size: self.grid_size,
            inactive_qubits: self.inactive_qubits(),
            disabled_couplers: self.disabled_couplers(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<HardwareGraph> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        build_chimera(file.grid_size, &file.inactive_qubits)?
            .with_disabled_couplers(&file.disabled_couplers)
    }
}

impl Embedding {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Embedding> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let g = build_chimera(1, &[]).unwrap();
        assert_eq!(g.num_qubits(), 8);
        assert_eq!(g.num_active_couplers(), 16);
    }

    #[test]
    fn closed_form_counts() {
        for s in 1..=16 {
            let g = build_chimera(s, &[]).unwrap();
            assert_eq!(g.num_qubits(), 8 * s * s);
            let intra = g
                .couplers()
                .iter()
                .filter(|&&(a, b)| a / 8 == b / 8)
                .count();
            assert_eq!(intra, 16 * s * s);
            assert_eq!(g.couplers().len() - intra, 8 * s * (s - 1));
        }
    }

    #[test]
    fn twelve_by_twelve_with_mask() {
        let g = build_chimera(12, &[]).unwrap();
        assert_eq!(g.num_qubits(), 1152);
        let mask: Vec<usize> = (0..54).map(|k| k * 21).collect();
        let g = build_chimera(12, &mask).unwrap();
        assert_eq!(g.num_active_qubits(), 1098);
        for (a, b) in g.active_couplers() {
            assert!(g.is_active(a) && g.is_active(b));
        }
    }

    #[test]
    fn invalid_qubit_is_named() {
        match build_chimera(1, &[8]) {
            Err(Error::InvalidQubit { qubit, .. }) => assert_eq!(qubit, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_chimera(0, &[]).is_err());
    }

    #[test]
    fn inter_cell_couplers_follow_partition() {
        let g = build_chimera(2, &[]).unwrap();
        // vertical qubit 0 of cell (0,0) couples to qubit 0 of cell (1,0)
        assert!(g.has_active_coupler(0, g.qubit_index(1, 0, 0)));
        // horizontal qubit 4 of cell (0,0) couples to qubit 4 of cell (0,1)
        assert!(g.has_active_coupler(4, g.qubit_index(0, 1, 4)));
        assert!(!g.has_active_coupler(0, g.qubit_index(0, 1, 0)));
        assert_eq!(g.coordinates(g.qubit_index(1, 0, 5)), (1, 0, 5));
    }

    #[test]
    fn clique_k4_in_c1() {
        let g = build_chimera(1, &[]).unwrap();
        let e = clique_embedding(4, &g).unwrap();
        assert_eq!(e.chains.len(), 4);
        assert!(e.chains.iter().all(|c| c.len() == 2));
        let edges: Vec<_> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        assert!(validate_embedding(&e, &edges, &g).is_valid());
        for &(a, b) in &edges {
            assert!(chain_coupler(&e.chains[a], &e.chains[b], &g).is_some());
        }
    }

    #[test]
    fn clique_k8_in_c2_and_capacity() {
        let g = build_chimera(2, &[]).unwrap();
        let e = clique_embedding(8, &g).unwrap();
        assert!(e.chains.iter().all(|c| c.len() == 3));
        assert!(clique_embedding(9, &g).is_err());
        let masked = build_chimera(2, &[3]).unwrap();
        assert!(matches!(clique_embedding(4, &masked), Err(Error::Unsupported(_))));
    }

    #[test]
    fn overlap_names_both_chains() {
        let g = build_chimera(1, &[]).unwrap();
        let e = Embedding::new(vec![vec![0, 4], vec![4, 1]]);
        let r = validate_embedding(&e, &[(0, 1)], &g);
        assert!(r.violations.contains(&Violation::Overlap {
            qubit: 4,
            chains: (0, 1)
        }));
    }

    #[test]
    fn masked_intra_chain_coupler_disconnects() {
        let g = build_chimera(2, &[]).unwrap();
        let e = clique_embedding(8, &g).unwrap();
        let chain = &e.chains[5];
        let cut = (chain[0].min(chain[1]), chain[0].max(chain[1]));
        let g2 = g.with_disabled_couplers(&[cut]).unwrap();
        let r = validate_embedding(&e, &[], &g2);
        assert!(r.violations.contains(&Violation::Disconnected { chain: 5 }));
    }

    #[test]
    fn inactive_and_uncovered_are_reported() {
        let g = build_chimera(1, &[4]).unwrap();
        let e = Embedding::new(vec![vec![0], vec![4], vec![1]]);
        let r = validate_embedding(&e, &[(0, 2)], &g);
        assert!(r.violations.contains(&Violation::InactiveQubit { chain: 1, qubit: 4 }));
        assert!(r.violations.contains(&Violation::UncoveredEdge { edge: (0, 2) }));
    }

    #[test]
    fn identity_like_embedding_copies_logical() {
        let g = build_chimera(1, &[]).unwrap();
        let logical = IsingInstance::new(2, vec![0.5, -0.25], [(0, 1, -0.75)]).unwrap();
        let e = Embedding::new(vec![vec![0], vec![4]]);
        let p = minor_embed_instance(&logical, &e, &g).unwrap();
        assert_eq!(p.h()[0], 0.5);
        assert_eq!(p.h()[4], -0.25);
        assert_eq!(p.couplers().len(), 1);
        assert_eq!(p.coupling(0, 4), -0.75);
    }

    #[test]
    fn uncovered_edge_is_rejected() {
        let g = build_chimera(1, &[]).unwrap();
        let logical = IsingInstance::from_couplers(2, [(0, 1, 1.0)]).unwrap();
        let e = Embedding::new(vec![vec![0], vec![1]]);
        match minor_embed_instance(&logical, &e, &g) {
            Err(Error::InvalidEmbedding(r)) => {
                assert_eq!(r.violations, vec![Violation::UncoveredEdge { edge: (0, 1) }])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adjacency_list_round_trip() {
        let g = build_chimera(2, &[]).unwrap();
        let e = clique_embedding(6, &g).unwrap();
        let back = Embedding::from_adjacency_list(&e.to_adjacency_list()).unwrap();
        assert_eq!(back.chains, e.chains);
    }

    #[test]
    fn graph_json_round_trip() {
        let g = build_chimera(3, &[1, 17])
            .unwrap()
            .with_disabled_couplers(&[(0, 4)])
            .unwrap();
        assert_eq!(HardwareGraph::from_json(&g.to_json().unwrap()).unwrap(), g);
    }
}
