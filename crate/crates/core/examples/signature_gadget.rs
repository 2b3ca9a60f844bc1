//! Ground-space structure of the signature gadget and how a thermal sampler
//! and a closed-system anneal weight its isolated state.

use qabench::instances::{default_schedule, gen_signature, SignatureLayout};
use qabench::quantum_sim::anneal_statevector;
use qabench::solvers::{solve_exact, solve_sa, Acceptance, SolverConfig};

fn main() -> qabench::Result<()> {
    let p = gen_signature(4)?;
    let layout = SignatureLayout { n_core: 4 };
    let exact = solve_exact(&p)?;
    println!("E0 = {}, {} ground states", exact.ground_energy, exact.degeneracy);

    let cfg = SolverConfig {
        sweeps: 30,
        repetitions: 10_000,
        beta_final: 2.0,
        acceptance: Acceptance::HeatBath,
        ..SolverConfig::default()
    };
    let set = solve_sa(&p, &cfg)?;
    let count = |want: &[i8]| set.states.iter().filter(|s| s.as_slice() == want).count();
    let iso = count(&layout.isolated_state());
    let clusters: Vec<usize> = layout.cluster_states().iter().map(|c| count(c)).collect();
    println!("SA: isolated {iso}, cluster states {clusters:?}");

    for t_f in [1.0, 5.0, 20.0] {
        let d = anneal_statevector(&p, &default_schedule(), t_f, 800)?;
        let cl = layout.cluster_states();
        let mean = d.subspace_probability(&cl) / cl.len() as f64;
        println!(
            "anneal {t_f:>4} ns: P(isolated) = {:.2e}, mean P(cluster) = {:.4}",
            d.probability(&layout.isolated_state()),
            mean
        );
    }
    Ok(())
}
