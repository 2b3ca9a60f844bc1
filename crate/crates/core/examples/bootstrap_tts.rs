//! Success probability with a Bayesian-bootstrap interval, the resulting
//! TTS and TTT, and the optimal-stopping summary.

use qabench::bench::{bayesian_bootstrap, stopping_reward, success_prob, tts, ttt, weighted_mean};
use qabench::instances::gen_frustrated_loops;
use qabench::solvers::{solve_sa, SolverConfig};
use qabench::topology::build_chimera;

fn main() -> qabench::Result<()> {
    let g = build_chimera(2, &[])?;
    let p = gen_frustrated_loops(&g, 0.3, 3.0, 7, None)?;
    let e0 = p.known_ground_energy().unwrap();
    let set = solve_sa(&p, &SolverConfig::default().with_sweeps(30).with_repetitions(500))?;
    let hits: Vec<f64> = set.energies.iter().map(|&e| f64::from(u8::from(e <= e0 + 1e-9))).collect();
    let ci = bayesian_bootstrap(&hits, weighted_mean, 2000, 0.95, 1)?;
    let p_hat = success_prob(&set, e0, 1e-9)?;
    println!("p = {p_hat:.3}, 95% CI [{:.3}, {:.3}]", ci.lower, ci.upper);
    println!("TTS(99%) = {:?} sweeps-worth of runs (t_f = 30)", tts(p_hat, 0.99, 30.0)?);
    println!("TTT to E0 + 4 = {:?}", ttt(&set, e0 + 4.0, 0.99, 30.0)?);
    let rewards: Vec<f64> = set.energies.iter().map(|e| -e).collect();
    let policy = stopping_reward(&rewards, 0.05, None)?;
    println!("stop after {} draws, expected reward {:.3}", policy.n_star, policy.expected_reward);
    Ok(())
}
