//! Reduce a higher-order polynomial to quadratic with auxiliary variables,
//! check the reduction preserves the minimum, and project a quadratic
//! minimizer back to the original variables.

use hobopt::model::{BinaryPolynomial, VariableDomain};
use hobopt::quadratize::{project_assignment, quadratize};
use hobopt::solvers::exhaustive;

fn main() -> hobopt::Result<()> {
    let cubic = BinaryPolynomial::from_terms(
        5,
        VariableDomain::Boolean,
        [
            (vec![0, 1, 2], 2.5),
            (vec![1, 2, 3, 4], -3.0),
            (vec![0, 4], 1.0),
            (vec![2], -0.5),
        ],
    )?;

    let reduced = quadratize(&cubic);
    println!(
        "{} vars, degree {}  ->  {} vars, degree {}",
        cubic.num_vars(),
        cubic.degree(),
        reduced.quadratic.num_vars(),
        reduced.quadratic.degree()
    );
    for s in &reduced.substitutions {
        println!(
            "  pair ({}, {}) -> aux {:?}, penalty weight {}",
            s.pair.0, s.pair.1, s.aux, s.penalty_weight
        );
    }

    let (original_best, original_min) = exhaustive::minimize_polynomial(&cubic)?;
    let (extended_best, extended_min) = exhaustive::minimize_polynomial(&reduced.quadratic)?;
    assert!((original_min - extended_min).abs() < 1e-9, "reduction must not move the minimum");
    println!("shared minimum {original_min}");

    // the auxiliaries in any quadratic minimizer satisfy their product
    // identities, so dropping them recovers an original minimizer
    let projected = project_assignment(&reduced, &extended_best)?;
    println!(
        "projected {:?} -> value {}",
        projected.values(),
        cubic.evaluate(&projected)?
    );
    assert!((cubic.evaluate(&projected)? - original_min).abs() < 1e-9);
    let _ = original_best;
    Ok(())
}
