//! All sampling solvers on one planted instance, with gauge averaging.

use qabench::bench::gauge_average;
use qabench::instances::gen_frustrated_loops;
use qabench::solvers::{
    ParallelTempering, SimulatedAnnealing, SimulatedQuantumAnnealing, Solver, SolverConfig, SpinVectorMonteCarlo,
};
use qabench::topology::build_chimera;

fn main() -> qabench::Result<()> {
    let g = build_chimera(2, &[])?;
    let p = gen_frustrated_loops(&g, 0.3, 3.0, 11, None)?;
    let e0 = p.known_ground_energy().unwrap();
    let cfg = SolverConfig::default().with_sweeps(200).with_repetitions(100);
    let solvers: Vec<Box<dyn Solver>> = vec![
        Box::new(SimulatedAnnealing),
        Box::new(ParallelTempering),
        Box::new(SpinVectorMonteCarlo { schedule: Default::default() }),
        Box::new(SimulatedQuantumAnnealing { schedule: Default::default() }),
    ];
    println!("planted E0 = {e0}");
    for s in &solvers {
        let avg = gauge_average(&p, s.as_ref(), &cfg, 4, 1)?;
        let d = avg.dispersion(e0, 1e-9)?;
        println!(
            "{:>5}: per-gauge success {:.2?}, mean {:.3} variance {:.4}",
            s.id(),
            d.success,
            d.mean,
            d.variance
        );
    }
    Ok(())
}
