//! Quantum annealing correction on an antiferromagnetic chain: decoded
//! success as a function of the penalty strength.

use qabench::bench::ScanOptions;
use qabench::instances::IsingInstance;
use qabench::qac::{penalty_scan, CodeFamily, DecodeStrategy, QacCode};
use qabench::solvers::{SimulatedAnnealing, SolverConfig};

fn main() -> qabench::Result<()> {
    let logical = IsingInstance::from_couplers(8, (0..7).map(|i| (i, i + 1, 1.0)))?;
    let code = CodeFamily::Qac(QacCode::linear(8, 1.0, 0.0, true)?);
    let cfg = SolverConfig::default().with_sweeps(8).with_repetitions(2000);
    let grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0];
    for strategy in [DecodeStrategy::Majority, DecodeStrategy::EnergyMin { seed: 1 }] {
        let scan = penalty_scan(&logical, &code, &grid, &SimulatedAnnealing, &cfg, strategy, &ScanOptions::default())?;
        println!("{strategy:?}");
        for (b, s) in scan.values.iter().zip(&scan.success) {
            println!("  β = {b:<4} p = {:.3} [{:.3}, {:.3}]", s.estimate, s.lower, s.upper);
        }
        println!("  best β = {}", scan.best);
    }
    Ok(())
}
