//! Heuristic and exact minimizers for degree-<=2 binary models.
//!
//! `exhaustive` is the reference: Gray-code enumeration with O(N) incremental
//! updates, exact up to a variable cap. `dsb` (ballistic simulated
//! bifurcation with discretized feedback) and `sa` (single-flip Metropolis
//! annealing) scale past it; `local` holds the greedy repair pass and a
//! random-sampling baseline shared by the outer loops.

pub mod dsb;
pub mod exhaustive;
pub mod local;
pub mod sa;

use std::time::Duration;

pub use dsb::{solve_dsb, DsbConfig, Xi0};
pub use local::greedy_bit_flip;
pub use sa::{solve_sa, SaConfig};

use crate::model::Assignment;

/// Outcome of a restart-based heuristic solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub assignment: Assignment,
    pub energy: f64,
    /// Restart that produced the best candidate.
    pub restart_index: usize,
    /// Final readout of every restart, in restart order. The winner is among
    /// them; the rest are near-minima that callers screening against side
    /// constraints may still want.
    pub finalists: Vec<Assignment>,
    pub wall_time: Duration,
}
