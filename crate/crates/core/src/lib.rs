//! Benchmarking and error-suppression toolkit for quantum annealers.
//!
//! The crate covers the whole experimental loop on Chimera hardware graphs:
//!
//! * [`topology`]: Chimera graphs with availability masks, clique embeddings and
//!   minor embedding of logical instances.
//! * [`instances`]: Ising instances `E(s) = Σ h_i s_i + Σ J_ij s_i s_j`, the
//!   benchmark instance families, gauge transformations and annealing schedules.
//! * [`solvers`]: exact enumeration plus SA, SVMC, SQA and parallel tempering
//!   sharing one [`solvers::SampleSet`] contract.
//! * [`quantum_sim`]: dense closed-system annealing, spectra and negativity.
//! * [`qac`]: quantum annealing correction (QAC, nested QAC) with majority and
//!   energy-minimization decoding.
//! * [`bench`]: success probability, TTS/TTT, optimal stopping, Bayesian
//!   bootstrap, gauge averaging, annealing-time scans and scaling fits.
//! * [`formats`] and [`cli`]: stable file formats and the `qabench` front end.

// NaN-rejecting parameter checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod formats;
pub mod instances;
pub mod qac;
pub mod quantum_sim;
pub mod rng;
pub mod solvers;
pub mod topology;

pub use error::{Error, Result};
pub use instances::{IsingInstance, Schedule, Spin};
pub use topology::{Embedding, HardwareGraph};

/// Toolkit version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
