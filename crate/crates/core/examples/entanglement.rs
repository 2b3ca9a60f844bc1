//! Negativity of the instantaneous state across an anneal of a small
//! ferromagnetic ring.

use qabench::instances::{default_schedule, IsingInstance};
use qabench::quantum_sim::{anneal_amplitudes, geometric_mean_negativity, negativity};

fn main() -> qabench::Result<()> {
    let ring = IsingInstance::from_couplers(4, [(0, 1, -1.0), (1, 2, -1.0), (2, 3, -1.0), (0, 3, -1.0)])?;
    let sched = default_schedule();
    // very short anneals barely leave |+⟩⁴; slow ones end near the GHZ-like
    // superposition of the two ferromagnetic ground states
    for t_f in [0.005, 0.02, 0.1, 5.0, 20.0] {
        let psi = anneal_amplitudes(&ring, &sched, t_f, 400)?;
        println!(
            "t_f = {t_f:>5} ns: N(0|123) = {:.4}, N(01|23) = {:.4}, geometric mean {:.4}",
            negativity(&psi, &[0])?,
            negativity(&psi, &[0, 1])?,
            geometric_mean_negativity(&psi)?
        );
    }
    Ok(())
}
