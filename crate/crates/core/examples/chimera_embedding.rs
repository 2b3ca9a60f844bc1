//! Clique embedding of K_8 into a C_2 Chimera graph and majority readout.

use qabench::instances::IsingInstance;
use qabench::solvers::{solve_sa, SolverConfig};
use qabench::topology::{build_chimera, clique_embedding, minor_embed_instance, unembed_majority};

fn main() -> qabench::Result<()> {
    let g = build_chimera(2, &[])?;
    println!("C_2: {} qubits, {} couplers", g.num_qubits(), g.active_couplers().count());
    let emb = clique_embedding(8, &g)?;
    for (v, chain) in emb.chains.iter().enumerate() {
        println!("logical {v}: chain {chain:?}");
    }
    // antiferromagnetic K_8: frustrated, 70 ground states at E = −4
    let n = 8;
    let logical = IsingInstance::from_couplers(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))))?;
    let physical = minor_embed_instance(&logical, &emb, &g)?;
    let set = solve_sa(&physical, &SolverConfig::default().with_repetitions(200))?;
    let hits = set
        .states
        .iter()
        .filter(|s| logical.energy(&unembed_majority(s, &emb)).unwrap() == -4.0)
        .count();
    println!("{hits}/200 unembedded samples are logical ground states");
    Ok(())
}
