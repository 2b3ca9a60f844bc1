//! Frustrated-loop instances with planted solutions, SA success and the
//! optimal-sweeps scan.

use qabench::bench::{optimal_tf_scan, ScanOptions};
use qabench::instances::gen_frustrated_loops;
use qabench::solvers::{SimulatedAnnealing, SolverConfig};
use qabench::topology::build_chimera;

fn main() -> qabench::Result<()> {
    let g = build_chimera(2, &[])?;
    let instances: Vec<_> = (0..8)
        .map(|seed| gen_frustrated_loops(&g, 0.3, 3.0, seed, None))
        .collect::<Result<_, _>>()?;
    for p in &instances[..3] {
        println!("seed {:?}: planted energy {:?}", p.metadata().seed, p.known_ground_energy());
    }
    let template = SolverConfig::default().with_repetitions(200);
    let axis = [4, 8, 16, 32, 64, 128, 256];
    let report = optimal_tf_scan(&instances, &SimulatedAnnealing, &template, &axis, &ScanOptions::default())?;
    print!("{}", report.to_csv());
    println!("optimum {:?}, flags {:?}", report.optimum, report.flags);
    Ok(())
}
