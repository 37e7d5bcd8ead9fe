//! Independent ground truth: Zielonka's algorithm, a solution verifier and
//! the lower-bound simulator.

mod simulate;
mod verify;
mod zielonka;

pub use simulate::{odd_free_witnesses, ring_space, simulate_lower_bound, SimStep, SimTrace};
pub use verify::{verify_solution, Failure, Verdict};
pub use zielonka::{attractor, zielonka, RegionPair};
