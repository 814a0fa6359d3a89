//! Bifurcation dynamics against the exhaustive oracle on dense random spin
//! glasses. The solver should hit the ground state on nearly every draw at
//! this size.

use hobopt::model::{BinaryPolynomial, SolverModel, VariableDomain};
use hobopt::solvers::{dsb, exhaustive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_ising(n: usize, rng: &mut impl Rng) -> hobopt::Result<BinaryPolynomial> {
    let mut terms = Vec::new();
    for i in 0..n as u32 {
        for j in 0..i {
            terms.push((vec![j, i], rng.random_range(-1.0..1.0)));
        }
    }
    BinaryPolynomial::from_terms(n, VariableDomain::Ising, terms)
}

fn main() -> hobopt::Result<()> {
    let n = 12;
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let mut hits = 0;
    let runs = 20;

    for run in 0..runs {
        let poly = random_ising(n, &mut rng)?;
        let SolverModel::Ising(model) = poly.to_solver_model()? else {
            unreachable!()
        };

        let cfg = dsb::DsbConfig {
            seed: run,
            ..dsb::DsbConfig::default()
        };
        let found = dsb::solve_dsb(&model, &cfg)?;
        let (_, exact) = exhaustive::minimize_polynomial(&poly)?;

        let hit = (found.energy - exact).abs() <= 1e-9 * exact.abs().max(1.0);
        if hit {
            hits += 1;
        }
        println!(
            "run {run:>2}: dsb {:>10.4}  exact {:>10.4}  {}",
            found.energy,
            exact,
            if hit { "ground state" } else { "gap" }
        );
    }
    println!("{hits}/{runs} ground states");
    Ok(())
}
