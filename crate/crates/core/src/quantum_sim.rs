//! Closed-system reference dynamics for small instances.
//!
//! Basis index bit `i` clear means spin `i` is +1 (the same convention as
//! [`state_from_index`]). Energies from the schedule are in h·GHz and times in
//! ns, so a slice of length `Δt` evolves by `exp(−i·2π·H·Δt)`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::instances::{state_from_index, IsingInstance, Schedule, Spin};

pub type Amplitude = Complex<f64>;

/// Largest instance the dense simulator accepts.
pub const MAX_QUBITS: usize = 14;
/// Largest state for which every bipartition is enumerated.
pub const MAX_GEOMETRIC_MEAN_QUBITS: usize = 8;
pub const MIN_STEPS: usize = 100;
/// Anneal length (ns) at which the default step count is converged.
pub const DEFAULT_ANNEAL_NS: f64 = 5.0;
pub const DEFAULT_STEPS: usize = 400;
/// Negativities below this are numerical noise and reported as exactly zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-12;

// Above this the per-slice eigendecomposition costs more than a Taylor series.
const EIGEN_MAX_QUBITS: usize = 6;
// Largest ‖H‖·τ handled by a single Taylor series.
const TAYLOR_RADIUS: f64 = 1.0;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!(
            "dense simulation supports at most {MAX_QUBITS} spins, got {n}"
        )));
    }
    Ok(())
}

/// Classical energy of every basis state, indexed by basis number.
pub fn problem_diagonal(instance: &IsingInstance) -> Result<Vec<f64>> {
    check_size(instance.n())?;
    Ok((0..1usize << instance.n())
        .map(|x| instance.energy_unchecked(&state_from_index(x as u64, instance.n())))
        .collect())
}

/// `H(s) = A(s)·(−Σσˣ) + B(s)·(Σ h σᶻ + Σ J σᶻσᶻ)` as a dense real matrix.
pub fn build_hamiltonian(instance: &IsingInstance, schedule: &Schedule, s: f64) -> Result<DMatrix<f64>> {
    let diag = problem_diagonal(instance)?;
    let (a, b) = schedule.at(s);
    let dim = diag.len();
    let mut h = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        h[(x, x)] = b * diag[x];
        for i in 0..instance.n() {
            h[(x, x ^ (1 << i))] = -a;
        }
    }
    Ok(h)
}

fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumScan {
    pub s: Vec<f64>,
    /// Lowest `k` eigenvalues per grid point, ascending.
    pub levels: Vec<Vec<f64>>,
    pub min_gap: f64,
    pub min_gap_s: f64,
}

impl SpectrumScan {
    pub fn gaps(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l[1] - l[0]).collect()
    }

    /// `s,E0,…,E{k−1}`.
    pub fn to_csv(&self) -> String {
        let k = self.levels.first().map_or(0, Vec::len);
        let mut out = String::from("s");
        for j in 0..k {
            out.push_str(&format!(",E{j}"));
        }
        out.push('\n');
        for (s, levels) in self.s.iter().zip(&self.levels) {
            out.push_str(&s.to_string());
            for e in levels {
                out.push(',');
                out.push_str(&e.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Lowest `k` levels of `H(s)` over `grid`, with the smallest `E₁ − E₀`.
/// Ties in the gap resolve to the earliest grid point.
pub fn spectrum_scan(instance: &IsingInstance, schedule: &Schedule, grid: &[f64], k: usize) -> Result<SpectrumScan> {
    check_size(instance.n())?;
    if k < 2 {
        return Err(Error::param("spectrum scan needs at least 2 levels"));
    }
    if k > 1 << instance.n() {
        return Err(Error::param(format!("{k} levels requested from a {}-state space", 1usize << instance.n())));
    }
    if grid.is_empty() {
        return Err(Error::param("empty s grid"));
    }
    let mut levels = Vec::with_capacity(grid.len());
    for &s in grid {
        let mut ev = sorted_eigenvalues(build_hamiltonian(instance, schedule, s)?);
        ev.truncate(k);
        levels.push(ev);
    }
    let (mut min_gap, mut min_gap_s) = (f64::INFINITY, grid[0]);
    for (&s, l) in grid.iter().zip(&levels) {
        if l[1] - l[0] < min_gap {
            min_gap = l[1] - l[0];
            min_gap_s = s;
        }
    }
    Ok(SpectrumScan {
        s: grid.to_vec(),
        levels,
        min_gap,
        min_gap_s,
    })
}

/// Final computational-basis distribution of an anneal.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub n: usize,
    pub probabilities: Vec<f64>,
    /// `|‖ψ‖² − 1|` at the end of the evolution.
    pub norm_drift: f64,
}

impl Distribution {
    pub fn probability(&self, state: &[Spin]) -> f64 {
        self.probabilities[crate::instances::index_from_state(state) as usize]
    }

    /// Summed probability of distinct states.
    pub fn subspace_probability(&self, states: &[Vec<Spin>]) -> f64 {
        states.iter().map(|s| self.probability(s)).sum()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }

    /// `index,bitstring,probability`; bitstring character `i` is `1` when spin `i` is +1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,bitstring,probability\n");
        for (x, p) in self.probabilities.iter().enumerate() {
            let bits: String = (0..self.n).map(|i| if x >> i & 1 == 0 { '1' } else { '0' }).collect();
            out.push_str(&format!("{x},{bits},{p}\n"));
        }
        out
    }
}

struct Evolver {
    n: usize,
    diag: Vec<f64>,
    diag_norm: f64,
}

impl Evolver {
    fn apply(&self, a: f64, b: f64, x: &[Amplitude], out: &mut [Amplitude]) {
        for (k, o) in out.iter_mut().enumerate() {
            let mut flip = Amplitude::new(0.0, 0.0);
            for i in 0..self.n {
                flip += x[k ^ (1 << i)];
            }
            *o = x[k] * (b * self.diag[k]) - flip * a;
        }
    }

    /// ψ ← exp(−iτH)ψ by a truncated Taylor series on sub-steps of norm ≤ TAYLOR_RADIUS.
    fn taylor(&self, a: f64, b: f64, tau: f64, psi: &mut [Amplitude], term: &mut [Amplitude], next: &mut [Amplitude]) {
        let bound = a.abs() * self.n as f64 + b.abs() * self.diag_norm;
        let pieces = ((bound * tau / TAYLOR_RADIUS).ceil() as usize).max(1);
        let h = tau / pieces as f64;
        for _ in 0..pieces {
            term.copy_from_slice(psi);
            for k in 1..64 {
                self.apply(a, b, term, next);
                let scale = Amplitude::new(0.0, -h / k as f64);
                let mut size = 0.0;
                for (t, nx) in term.iter_mut().zip(next.iter()) {
                    *t = nx * scale;
                    size += t.norm_sqr();
                }
                for (p, t) in psi.iter_mut().zip(term.iter()) {
                    *p += t;
                }
                if size < 1e-34 {
                    break;
                }
            }
        }
    }

    fn eigen(&self, a: f64, b: f64, tau: f64, psi: &mut [Amplitude]) {
        let dim = psi.len();
        let h = DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                b * self.diag[r]
            } else if (r ^ c).count_ones() == 1 {
                -a
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors.map(|x| Amplitude::new(x, 0.0));
        let mut c = v.tr_mul(&DVector::from_column_slice(psi));
        for (ck, &lambda) in c.iter_mut().zip(eig.eigenvalues.iter()) {
            *ck *= Amplitude::from_polar(1.0, -lambda * tau);
        }
        psi.copy_from_slice((v * c).as_slice());
    }
}

/// Final amplitudes of an anneal from the uniform superposition over
/// `steps` equal slices of `t_f` ns, each using `H` at the slice midpoint.
pub fn anneal_amplitudes(instance: &IsingInstance, schedule: &Schedule, t_f: f64, steps: usize) -> Result<Vec<Amplitude>> {
    let diag = problem_diagonal(instance)?;
    if steps < MIN_STEPS {
        return Err(Error::param(format!("at least {MIN_STEPS} integration steps required, got {steps}")));
    }
    if !(t_f >= 0.0 && t_f.is_finite()) {
        return Err(Error::param(format!("anneal time must be finite and nonnegative, got {t_f}")));
    }
    let n = instance.n();
    let dim = diag.len();
    let ev = Evolver {
        n,
        diag_norm: diag.iter().fold(0.0, |m: f64, d| m.max(d.abs())),
        diag,
    };
    let amp = 1.0 / (dim as f64).sqrt();
    let mut psi = vec![Amplitude::new(amp, 0.0); dim];
    let mut term = psi.clone();
    let mut next = psi.clone();
    let tau = 2.0 * PI * t_f / steps as f64;
    for k in 0..steps {
        let (a, b) = schedule.at((k as f64 + 0.5) / steps as f64);
        if n <= EIGEN_MAX_QUBITS {
            ev.eigen(a, b, tau, &mut psi);
        } else {
            ev.taylor(a, b, tau, &mut psi, &mut term, &mut next);
        }
    }
    Ok(psi)
}

pub fn anneal_statevector(instance: &IsingInstance, schedule: &Schedule, t_f: f64, steps: usize) -> Result<Distribution> {
    let psi = anneal_amplitudes(instance, schedule, t_f, steps)?;
    let probabilities: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
    let norm_drift = (probabilities.iter().sum::<f64>() - 1.0).abs();
    Ok(Distribution {
        n: instance.n(),
        probabilities,
        norm_drift,
    })
}

fn qubit_count(state: &[Amplitude]) -> Result<usize> {
    if state.len() < 2 || !state.len().is_power_of_two() {
        return Err(Error::param(format!("state length {} is not 2ⁿ with n ≥ 1", state.len())));
    }
    let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!("state is not normalized (‖ψ‖² = {norm})")));
    }
    Ok(state.len().trailing_zeros() as usize)
}

fn negativity_unchecked(state: &[Amplitude], n: usize, mask: usize) -> f64 {
    let rows = 1usize << mask.count_ones();
    let cols = 1usize << (n - mask.count_ones() as usize);
    let mut m = DMatrix::zeros(rows, cols);
    for (x, &c) in state.iter().enumerate() {
        let (mut r, mut col, mut rb, mut cb) = (0, 0, 0, 0);
        for i in 0..n {
            let bit = x >> i & 1;
            if mask >> i & 1 == 1 {
                r |= bit << rb;
                rb += 1;
            } else {
                col |= bit << cb;
                cb += 1;
            }
        }
        m[(r, col)] = c;
    }
    // ‖ρ^{T_A}‖₁ = (Σ Schmidt coefficients)² for a pure state.
    let trace_norm = m.singular_values().sum().powi(2);
    let value = (trace_norm - 1.0) / 2.0;
    if value < NEGATIVITY_FLOOR {
        0.0
    } else {
        value
    }
}

/// Negativity of the pure state across `subset` versus its complement.
pub fn negativity(state: &[Amplitude], subset: &[usize]) -> Result<f64> {
    let n = qubit_count(state)?;
    let mut mask = 0usize;
    for &q in subset {
        if q >= n {
            return Err(Error::param(format!("qubit {q} out of range for {n} qubits")));
        }
        mask |= 1 << q;
    }
    if mask == 0 || mask == (1 << n) - 1 {
        return Err(Error::param("bipartition must be a nonempty proper subset"));
    }
    Ok(negativity_unchecked(state, n, mask))
}

/// Geometric mean of the negativity over all `2ⁿ⁻¹ − 1` bipartitions.
pub fn geometric_mean_negativity(state: &[Amplitude]) -> Result<f64> {
    let n = qubit_count(state)?;
    if n < 2 {
        return Err(Error::param("a single qubit has no bipartition"));
    }
    if n > MAX_GEOMETRIC_MEAN_QUBITS {
        return Err(Error::SizeLimit(format!(
            "geometric-mean negativity enumerates bipartitions for at most {MAX_GEOMETRIC_MEAN_QUBITS} qubits"
        )));
    }
    let full = (1usize << n) - 1;
    let mut log_sum = 0.0;
    let mut count = 0;
    // Subsets containing qubit 0 name each bipartition once.
    for mask in (1..full).filter(|m| m & 1 == 1) {
        let v = negativity_unchecked(state, n, mask);
        if v == 0.0 {
            return Ok(0.0);
        }
        log_sum += v.ln();
        count += 1;
    }
    Ok((log_sum / count as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{default_schedule, gen_signature, IsingInstance};

    fn single(h: f64) -> IsingInstance {
        IsingInstance::new(1, vec![h], []).unwrap()
    }

    fn bell() -> Vec<Amplitude> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        vec![Amplitude::new(r, 0.0), Amplitude::new(0.0, 0.0), Amplitude::new(0.0, 0.0), Amplitude::new(r, 0.0)]
    }

    // explicit partial transpose on the low-order qubits in `mask`
    fn negativity_oracle(state: &[Amplitude], mask: usize) -> f64 {
        let dim = state.len();
        let rho = DMatrix::from_fn(dim, dim, |r, c| state[r] * state[c].conj());
        let pt = DMatrix::from_fn(dim, dim, |r, c| {
            let swap = (r ^ c) & mask;
            rho[(r ^ swap, c ^ swap)]
        });
        let ev = SymmetricEigen::new(pt).eigenvalues;
        (ev.iter().map(|x| x.abs()).sum::<f64>() - 1.0) / 2.0
    }

    #[test]
    fn endpoint_hamiltonian() {
        let h = build_hamiltonian(&single(1.0), &default_schedule(), 1.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let ferro = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        let h = build_hamiltonian(&ferro, &default_schedule(), 1.0).unwrap();
        assert_eq!(h[(0, 0)], -1.0);
        assert_eq!(h[(3, 3)], -1.0);
        assert_eq!(h[(1, 1)], 1.0);
    }

    #[test]
    fn single_spin_levels_match_closed_form() {
        let sched = default_schedule();
        for s in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let ev = sorted_eigenvalues(build_hamiltonian(&single(1.0), &sched, s).unwrap());
            let (a, b) = sched.at(s);
            let r = (a * a + b * b).sqrt();
            assert!((ev[0] + r).abs() < 1e-12 && (ev[1] - r).abs() < 1e-12);
        }
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let scan = spectrum_scan(&single(1.0), &sched, &grid, 2).unwrap();
        assert!((scan.min_gap - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(scan.min_gap_s, 0.5);
    }

    #[test]
    fn hamiltonian_is_symmetric_and_guarded() {
        let g = crate::topology::build_chimera(1, &[]).unwrap();
        let p = crate::instances::gen_random_pm1(&g, 3);
        let h = build_hamiltonian(&p, &default_schedule(), 0.37).unwrap();
        assert_eq!(h, h.transpose());
        let big = IsingInstance::new(15, vec![0.0; 15], []).unwrap();
        assert!(matches!(build_hamiltonian(&big, &default_schedule(), 0.5), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn signature_gap_closes_at_the_end() {
        let scan = spectrum_scan(&gen_signature(4).unwrap(), &default_schedule(), &[0.5, 1.0], 18).unwrap();
        assert!(scan.levels[1][16] - scan.levels[1][0] < 1e-9);
        assert!(scan.levels[1][17] - scan.levels[1][0] > 1.0);
        assert_eq!(scan.min_gap_s, 1.0);
        assert!(spectrum_scan(&single(1.0), &default_schedule(), &[0.5], 1).is_err());
    }

    #[test]
    fn ferromagnet_gap_is_open_before_the_end() {
        let ferro = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        let grid: Vec<f64> = (0..100).map(|k| k as f64 / 100.0).collect();
        let scan = spectrum_scan(&ferro, &default_schedule(), &grid, 2).unwrap();
        assert!(scan.gaps().iter().all(|&g| g > 0.0));
        assert!(scan.to_csv().starts_with("s,E0,E1\n0,"));
    }

    #[test]
    fn sudden_and_adiabatic_limits() {
        let ferro = IsingInstance::from_couplers(2, [(0, 1, -1.0)]).unwrap();
        let sudden = anneal_statevector(&ferro, &default_schedule(), 0.0, 100).unwrap();
        assert!(sudden.probabilities.iter().all(|p| (p - 0.25).abs() < 1e-12));
        let slow = anneal_statevector(&ferro, &default_schedule(), 50.0, 400).unwrap();
        assert!(slow.subspace_probability(&[vec![1, 1], vec![-1, -1]]) >= 0.99);
        assert!(slow.norm_drift < 1e-9);
        assert!(anneal_statevector(&ferro, &default_schedule(), 1.0, 99).is_err());
    }

    #[test]
    fn step_doubling_changes_little_at_default_settings() {
        let p = gen_signature(3).unwrap();
        let a = anneal_statevector(&p, &default_schedule(), DEFAULT_ANNEAL_NS, DEFAULT_STEPS).unwrap();
        let b = anneal_statevector(&p, &default_schedule(), DEFAULT_ANNEAL_NS, 2 * DEFAULT_STEPS).unwrap();
        assert!(a.total_variation(&b) < 1e-4, "{}", a.total_variation(&b));
    }

    #[test]
    fn gauge_covariance_of_final_distribution() {
        let p = gen_signature(3).unwrap();
        let gauge: Vec<Spin> = vec![1, -1, -1, 1, -1, 1];
        let q = crate::instances::gauge_transform(&p, &gauge).unwrap();
        let a = anneal_statevector(&p, &default_schedule(), DEFAULT_ANNEAL_NS, DEFAULT_STEPS).unwrap();
        let b = anneal_statevector(&q, &default_schedule(), DEFAULT_ANNEAL_NS, DEFAULT_STEPS).unwrap();
        for k in 0..1u64 << p.n() {
            let s = state_from_index(k, p.n());
            let t: Vec<Spin> = s.iter().zip(&gauge).map(|(x, g)| x * g).collect();
            assert!((a.probability(&s) - b.probability(&t)).abs() < 1e-6);
        }
    }

    #[test]
    fn taylor_and_eigen_propagators_agree() {
        let g = crate::topology::build_chimera(1, &[]).unwrap();
        let p = crate::instances::gen_random_pm1(&g, 8);
        let sub = IsingInstance::from_couplers(
            5,
            p.couplers().iter().filter(|c| c.j < 5).map(|c| (c.i, c.j, c.value)),
        )
        .unwrap();
        let ev = Evolver {
            n: 5,
            diag: problem_diagonal(&sub).unwrap(),
            diag_norm: 10.0,
        };
        let start: Vec<Amplitude> = (0..32).map(|k| Amplitude::new((k as f64).sin(), (k as f64).cos())).collect();
        let norm = start.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let start: Vec<Amplitude> = start.iter().map(|c| c / norm).collect();
        let mut x = start.clone();
        ev.eigen(0.4, 0.7, 1.3, &mut x);
        let mut y = start.clone();
        let (mut t, mut nx) = (y.clone(), y.clone());
        ev.taylor(0.4, 0.7, 1.3, &mut y, &mut t, &mut nx);
        let diff: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).sum();
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn bell_pair_negativity() {
        assert!((negativity(&bell(), &[0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((geometric_mean_negativity(&bell()).unwrap() - 0.5).abs() < 1e-12);
        assert!(negativity(&bell(), &[]).is_err());
        assert!(negativity(&bell(), &[0, 1]).is_err());
    }

    #[test]
    fn product_states_have_zero_negativity() {
        let plus = Amplitude::new(0.5, 0.0);
        let state = vec![plus; 4];
        assert_eq!(negativity(&state, &[1]).unwrap(), 0.0);
        assert_eq!(geometric_mean_negativity(&state).unwrap(), 0.0);
        // Bell pair ⊗ |0⟩: the cut isolating qubit 2 is unentangled
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = vec![Amplitude::new(0.0, 0.0); 8];
        s[0] = Amplitude::new(r, 0.0);
        s[3] = Amplitude::new(r, 0.0);
        assert!(negativity(&s, &[0]).unwrap() > 0.4);
        assert_eq!(geometric_mean_negativity(&s).unwrap(), 0.0);
    }

    #[test]
    fn schmidt_negativity_matches_partial_transpose() {
        let ferro = IsingInstance::from_couplers(3, [(0, 1, -1.0), (1, 2, 0.5)]).unwrap();
        let psi = anneal_amplitudes(&ferro, &default_schedule(), 0.7, 100).unwrap();
        for mask in 1..7usize {
            let subset: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            let got = negativity(&psi, &subset).unwrap();
            let want = negativity_oracle(&psi, mask);
            assert!((got - want).abs() < 1e-10, "{mask}: {got} vs {want}");
        }
    }

    #[test]
    fn distribution_csv_bit_convention() {
        let d = anneal_statevector(&single(1.0), &default_schedule(), 0.0, 100).unwrap();
        assert_eq!(d.to_csv().lines().nth(1).unwrap().split(',').nth(1), Some("1"));
    }
}
