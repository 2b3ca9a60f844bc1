//! Nested QAC on a frustrated K_4: codeword energies scale as C², and
//! decoding recovers the logical ground state more often as C grows.

use qabench::instances::{state_from_index, IsingInstance};
use qabench::qac::{nqac_decode, nqac_encode, DecodeStrategy, NestedCode};
use qabench::solvers::{solve_exact, solve_sa, SolverConfig};

fn main() -> qabench::Result<()> {
    let logical = IsingInstance::new(
        4,
        vec![0.1, -0.2, 0.0, 0.05],
        [(0, 1, 1.0), (0, 2, 1.0), (0, 3, -0.5), (1, 2, 1.0), (1, 3, 0.5), (2, 3, 1.0)],
    )?;
    let e0 = solve_exact(&logical)?.ground_energy;
    let s = state_from_index(5, 4);
    for c in 1..=4 {
        let code = NestedCode::new(4, c, 0.5)?;
        let physical = nqac_encode(&logical, &code)?;
        let ratio = (physical.energy(&code.codeword(&s))? - code.penalty_offset()) / logical.energy(&s)?;
        let cfg = SolverConfig::default().with_sweeps(20).with_repetitions(1000);
        // a hot final temperature, where the code's energy boost matters
        let cfg = SolverConfig { beta_final: 0.5, ..cfg };
        let set = solve_sa(&physical, &cfg)?;
        let hits = set
            .states
            .iter()
            .filter(|x| {
                let d = nqac_decode(x, &code, DecodeStrategy::Majority, &logical).unwrap();
                logical.energy(&d.state).unwrap() <= e0 + 1e-9
            })
            .count();
        println!("C = {c}: physical {} spins, energy ratio {ratio:.1}, decoded success {:.3}", physical.n(), hits as f64 / 1000.0);
    }
    Ok(())
}
