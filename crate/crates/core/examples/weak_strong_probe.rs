//! Two bound cells with mismatched fields: the all-aligned ground state and
//! the cells-opposed trap, and how often a quick SA run lands in the trap.

use qabench::instances::{gen_weak_strong, WeakStrongLayout};
use qabench::solvers::{solve_exact, solve_sa, SolverConfig};

fn main() -> qabench::Result<()> {
    for h_l in [0.1, 0.25, 0.44] {
        let p = gen_weak_strong(h_l)?;
        let exact = solve_exact(&p)?;
        let trap = p.energy(&WeakStrongLayout::opposed_state())?;
        println!(
            "h_L = {h_l}: E0 = {:.2} (degeneracy {}), trap at {:.2}",
            exact.ground_energy, exact.degeneracy, trap
        );
    }
    // a fast thermal quench frequently ends in the trap
    let p = gen_weak_strong(0.44)?;
    let cfg = SolverConfig::default().with_sweeps(20).with_repetitions(1000);
    let set = solve_sa(&p, &cfg)?;
    let count = |want: Vec<i8>| set.states.iter().filter(|s| **s == want).count();
    println!(
        "SA, 20 sweeps: aligned {} / trapped {} of 1000",
        count(WeakStrongLayout::aligned_state()),
        count(WeakStrongLayout::opposed_state())
    );
    Ok(())
}
