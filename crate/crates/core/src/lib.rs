//! Divide-and-conquer maximum independent set on simulated constrained-mixer
//! circuits.
//!
//! The solver models MIS as a variational circuit whose mixers only ever
//! rotate a vertex qubit toward |1⟩ when every checked neighbor is |0⟩, so the
//! circuit can never leave the space of independent sets. An edge partition of
//! the input graph yields a vertex separator; placing all separator mixers at
//! the end of the circuit leaves the partition blocks fully disconnected from
//! one another, and the number of wires that must cross into the separator
//! block is just the separator's outside neighborhood. That count is the
//! communication cost a distributed backend would pay, and it can be driven
//! under a budget by deactivating separator mixers.
//!
//! Module map:
//!
//! - [`graph`]: graph type, file IO, random generators, classical MIS oracles.
//! - [`partition`]: balanced edge partitioning and separator extraction.
//! - [`ansatz`]: mixer schedules, restricted control sets, cut counting,
//!   separator sparsification.
//! - [`simulator`]: dense statevector simulation of the schedules.
//! - [`optimize`]: Nelder–Mead parameter search over the circuit loss.
//! - [`solver`]: the single-circuit and iterative end-to-end solvers.

pub mod ansatz;
pub mod graph;
pub mod optimize;
pub mod partition;
pub mod simulator;
pub mod solver;

pub(crate) mod rng;
