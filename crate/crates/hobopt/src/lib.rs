//! Binary optimization over Boolean and spin variables, built around four
//! pieces that compose into a constrained higher-order solver:
//!
//! * [`model`]: sparse multilinear polynomials, QUBO/Ising matrix forms, and
//!   exact conversions between the two variable domains.
//! * [`solvers`]: discrete simulated bifurcation, simulated annealing,
//!   Gray-code exhaustive search, greedy bit flips, and random search.
//! * [`hobo`]: iterated second-order Taylor surrogates that let the quadratic
//!   solvers minimize higher-order objectives.
//! * [`quadratize`]: an alternative route that rewrites higher-order terms
//!   with penalized auxiliary variables.
//!
//! [`constrained`] layers an augmented-Lagrangian outer loop (plus a squared
//! penalty baseline) on top, [`swipt`] generates the beamforming case study
//! the defaults are tuned for, and [`bench`] runs reproducible experiment
//! sweeps over all of it.

pub mod bench;
pub mod constrained;
pub mod error;
pub mod hobo;
pub mod model;
pub mod objective;
pub mod quadratize;
pub mod seeds;
pub mod solvers;
pub mod swipt;

pub use error::{Error, Result};
pub use model::{Assignment, BinaryPolynomial, IsingModel, QuboModel, SolverModel, VariableDomain};
pub use objective::BinaryObjective;
