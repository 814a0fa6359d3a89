//! Objective abstraction for the surrogate-descent loop.
//!
//! The Taylor machinery in [`crate::hobo`] only needs three things from an
//! objective: point evaluation, first/second derivatives of its multilinear
//! extension, and the variable domain. Materialized polynomials provide all
//! three generically; [`QuadraticFormComposite`] provides them in closed form
//! for objectives of the shape c1 x^T A x + c2 (x^T B x)^2 + c0 without ever
//! expanding the quartic, which is what keeps large constrained instances
//! cheap.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::model::{taylor_from_parts, Assignment, BinaryPolynomial, VariableDomain};

pub trait BinaryObjective {
    fn num_vars(&self) -> usize;

    fn domain(&self) -> VariableDomain;

    /// Objective value at a binary point. Panics on a point of the wrong
    /// shape; callers construct assignments to match.
    fn value(&self, point: &Assignment) -> f64;

    /// Gradient and Hessian of the multilinear extension at `point`. The
    /// Hessian must be symmetric with a zero diagonal.
    fn gradient_hessian(&self, point: &Assignment) -> (Array1<f64>, Array2<f64>);

    /// Second-order surrogate around `x0`:
    ///   f~(x) = f(x0) + g . (x - x0) + 1/2 sum_{i != j} H_ij Dx_i Dx_j.
    /// Satisfies f~(x0) = f(x0) and reproduces degree-<=2 objectives exactly.
    fn taylor_quadratic(&self, x0: &Assignment) -> BinaryPolynomial {
        let f0 = self.value(x0);
        let (grad, hess) = self.gradient_hessian(x0);
        taylor_from_parts(f0, &grad, &hess, x0)
    }
}

impl BinaryObjective for BinaryPolynomial {
    fn num_vars(&self) -> usize {
        BinaryPolynomial::num_vars(self)
    }

    fn domain(&self) -> VariableDomain {
        BinaryPolynomial::domain(self)
    }

    fn value(&self, point: &Assignment) -> f64 {
        self.evaluate(point).expect("point must match the polynomial")
    }

    fn gradient_hessian(&self, point: &Assignment) -> (Array1<f64>, Array2<f64>) {
        BinaryPolynomial::gradient_hessian(self, point)
    }

    fn taylor_quadratic(&self, x0: &Assignment) -> BinaryPolynomial {
        BinaryPolynomial::taylor_quadratic(self, x0)
    }
}

/// Spin objective  f(x) = c1 x^T A x + c2 (x^T B x)^2 + c0  kept in factored
/// form. A and B are symmetrized on construction.
#[derive(Debug, Clone)]
pub struct QuadraticFormComposite {
    c1: f64,
    a: Array2<f64>,
    c2: f64,
    b: Array2<f64>,
    c0: f64,
    num_vars: usize,
}

impl QuadraticFormComposite {
    pub fn new(
        c1: f64,
        a: Array2<f64>,
        c2: f64,
        b: Array2<f64>,
        c0: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "QuadraticFormComposite::new",
                expected: n,
                actual: a.ncols(),
            });
        }
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "QuadraticFormComposite::new",
                expected: n,
                actual: b.nrows().max(b.ncols()),
            });
        }
        Ok(QuadraticFormComposite {
            c1,
            a: symmetrize(a),
            c2,
            b: symmetrize(b),
            c0,
            num_vars: n,
        })
    }

    pub fn form_a(&self, spins: &[i8]) -> f64 {
        quadratic_form(&self.a, spins)
    }

    pub fn form_b(&self, spins: &[i8]) -> f64 {
        quadratic_form(&self.b, spins)
    }

    /// Expand into a canonical quartic polynomial over spins. Used by the
    /// quadratization route and by tests that cross-check the factored form.
    pub fn materialize(&self) -> BinaryPolynomial {
        let qa = BinaryPolynomial::from_quadratic_form(&self.a, VariableDomain::Ising);
        let qb = BinaryPolynomial::from_quadratic_form(&self.b, VariableDomain::Ising);
        let mut out = qb.mul(&qb).scaled(self.c2);
        out.add_scaled(&qa, self.c1);
        out.add_constant(self.c0);
        out
    }
}

impl BinaryObjective for QuadraticFormComposite {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn domain(&self) -> VariableDomain {
        VariableDomain::Ising
    }

    fn value(&self, point: &Assignment) -> f64 {
        assert_eq!(point.domain(), VariableDomain::Ising, "spin objective");
        assert_eq!(point.len(), self.num_vars, "point length mismatch");
        let s = point.values();
        let qa = quadratic_form(&self.a, s);
        let qb = quadratic_form(&self.b, s);
        self.c1 * qa + self.c2 * qb * qb + self.c0
    }

    fn gradient_hessian(&self, point: &Assignment) -> (Array1<f64>, Array2<f64>) {
        assert_eq!(point.domain(), VariableDomain::Ising, "spin objective");
        assert_eq!(point.len(), self.num_vars, "point length mismatch");
        let x = Array1::from_vec(point.values_f64());
        let ax = self.a.dot(&x);
        let bx = self.b.dot(&x);
        let qb = x.dot(&bx);

        let grad = 2.0 * self.c1 * &ax + 4.0 * self.c2 * qb * &bx;

        let n = self.num_vars;
        let mut hess = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // products grouped so H_ij and H_ji round identically
                hess[[i, j]] = 2.0 * self.c1 * self.a[[i, j]]
                    + 8.0 * self.c2 * (bx[i] * bx[j])
                    + 4.0 * self.c2 * qb * self.b[[i, j]];
            }
        }
        (grad, hess)
    }
}

fn symmetrize(m: Array2<f64>) -> Array2<f64> {
    let mt = m.t().to_owned();
    (&m + &mt) * 0.5
}

fn quadratic_form(m: &Array2<f64>, values: &[i8]) -> f64 {
    let n = values.len();
    debug_assert_eq!(m.nrows(), n);
    let mut total = 0.0;
    for i in 0..n {
        let vi = values[i] as f64;
        let mut row = 0.0;
        for j in 0..n {
            row += m[[i, j]] * values[j] as f64;
        }
        total += vi * row;
    }
    total
}
