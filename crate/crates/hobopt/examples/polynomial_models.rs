//! Build binary polynomials, evaluate them, and move between the spin and
//! boolean matrix encodings without losing energy values.

use hobopt::model::{Assignment, BinaryPolynomial, SolverModel, VariableDomain};

fn main() -> hobopt::Result<()> {
    // f(s) = 2 s0 s1 - 1.5 s1 s2 s3 + 0.5 s2 + 3
    let mut f = BinaryPolynomial::from_terms(
        4,
        VariableDomain::Ising,
        [
            (vec![0, 1], 2.0),
            (vec![1, 2, 3], -1.5),
            (vec![2], 0.5),
        ],
    )?;
    f.add_constant(3.0);
    println!("degree {} over {} spins, {} terms", f.degree(), f.num_vars(), f.num_terms());

    let x = Assignment::spins(vec![1, -1, 1, 1])?;
    println!("f{:?} = {}", x.values(), f.evaluate(&x)?);

    // a degree-2 polynomial lowers straight to the matrix model its domain
    // dictates; spin models convert to bit models and back exactly
    let quad = BinaryPolynomial::from_terms(
        3,
        VariableDomain::Ising,
        [(vec![0, 1], 1.0), (vec![1, 2], -2.0), (vec![0], 0.25)],
    )?;
    let SolverModel::Ising(ising) = quad.to_solver_model()? else {
        unreachable!("spin polynomial lowers to a spin model");
    };
    let qubo = ising.to_qubo();

    let spins = Assignment::spins(vec![-1, 1, -1])?;
    let bits = spins.to_bits();
    println!(
        "spin energy {} == bit energy {}",
        ising.energy(&spins)?,
        qubo.energy(&bits)?
    );
    assert_eq!(ising.energy(&spins)?, qubo.energy(&bits)?);
    Ok(())
}
