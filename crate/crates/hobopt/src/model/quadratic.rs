use ndarray::{Array1, Array2};

use super::{Assignment, BinaryPolynomial, VariableDomain};
use crate::error::{Error, Result};

/// Quadratic Boolean model f(x) = x^T Q x + constant with x in {0,1}^N.
///
/// Q is stored lower-triangular; because x_i^2 = x_i, the diagonal holds the
/// linear coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    q: Array2<f64>,
    constant: f64,
}

impl QuboModel {
    /// `q` must be square and lower-triangular (strictly-upper entries zero).
    pub fn new(q: Array2<f64>, constant: f64) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "QuboModel::new",
                expected: n,
                actual: q.ncols(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if q[[i, j]] != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "Q[{i},{j}] = {} above the diagonal; store couplings lower-triangular",
                        q[[i, j]]
                    )));
                }
            }
        }
        Ok(QuboModel {
            num_vars: n,
            q,
            constant,
        })
    }

    /// Fold an arbitrary square matrix into lower-triangular storage by
    /// summing M_ij + M_ji into the (max, min) slot.
    pub fn fold_dense(m: &Array2<f64>, constant: f64) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "QuboModel::fold_dense",
                expected: n,
                actual: m.ncols(),
            });
        }
        let mut q = Array2::zeros((n, n));
        for i in 0..n {
            q[[i, i]] = m[[i, i]];
            for j in 0..i {
                q[[i, j]] = m[[i, j]] + m[[j, i]];
            }
        }
        QuboModel::new(q, constant)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn energy(&self, point: &Assignment) -> Result<f64> {
        if point.domain() != VariableDomain::Boolean {
            return Err(Error::DomainMismatch {
                expected: VariableDomain::Boolean,
                actual: point.domain(),
            });
        }
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                context: "QuboModel::energy",
                expected: self.num_vars,
                actual: point.len(),
            });
        }
        let x = point.values();
        let mut total = self.constant;
        for i in 0..self.num_vars {
            if x[i] == 0 {
                continue;
            }
            total += self.q[[i, i]];
            for j in 0..i {
                if x[j] == 1 {
                    total += self.q[[i, j]];
                }
            }
        }
        Ok(total)
    }

    /// Change of variables x = (s + 1)/2. Exact on representable inputs: the
    /// new couplings are quarters and halves of sums of old entries.
    pub fn to_ising(&self) -> IsingModel {
        let n = self.num_vars;
        let mut j = Array2::zeros((n, n));
        let mut a = Array1::zeros(n);
        let mut constant = self.constant;
        for i in 0..n {
            a[i] += self.q[[i, i]] / 2.0;
            constant += self.q[[i, i]] / 2.0;
            for k in 0..i {
                let qik = self.q[[i, k]];
                if qik != 0.0 {
                    j[[i, k]] = qik / 4.0;
                    a[i] += qik / 4.0;
                    a[k] += qik / 4.0;
                    constant += qik / 4.0;
                }
            }
        }
        IsingModel {
            num_vars: n,
            j,
            a,
            constant,
        }
    }
}

/// Quadratic spin model f(s) = sum_{i>j} J_ij s_i s_j + a . s + constant with
/// s in {-1,+1}^N. J is strictly lower-triangular (zero diagonal, since
/// s_i^2 = 1 contributes only constants).
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    num_vars: usize,
    j: Array2<f64>,
    a: Array1<f64>,
    constant: f64,
}

impl IsingModel {
    pub fn new(j: Array2<f64>, a: Array1<f64>, constant: f64) -> Result<Self> {
        let n = j.nrows();
        if j.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "IsingModel::new",
                expected: n,
                actual: j.ncols(),
            });
        }
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                context: "IsingModel::new",
                expected: n,
                actual: a.len(),
            });
        }
        for i in 0..n {
            for k in i..n {
                if j[[i, k]] != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "J[{i},{k}] = {} on or above the diagonal; store couplings strictly lower-triangular",
                        j[[i, k]]
                    )));
                }
            }
        }
        Ok(IsingModel {
            num_vars: n,
            j,
            a,
            constant,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn couplings(&self) -> &Array2<f64> {
        &self.j
    }

    pub fn linear(&self) -> &Array1<f64> {
        &self.a
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn has_linear_terms(&self) -> bool {
        self.a.iter().any(|&v| v != 0.0)
    }

    /// J + J^T: the symmetric coupling matrix that drives solver dynamics.
    pub fn symmetrized_couplings(&self) -> Array2<f64> {
        &self.j + &self.j.t()
    }

    pub fn energy(&self, point: &Assignment) -> Result<f64> {
        if point.domain() != VariableDomain::Ising {
            return Err(Error::DomainMismatch {
                expected: VariableDomain::Ising,
                actual: point.domain(),
            });
        }
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                context: "IsingModel::energy",
                expected: self.num_vars,
                actual: point.len(),
            });
        }
        Ok(self.energy_of(point.values()))
    }

    /// Energy without domain checks; `spins` must be +/-1 of the right length.
    pub fn energy_of(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.num_vars);
        let mut total = self.constant;
        for i in 0..self.num_vars {
            let si = spins[i] as f64;
            total += self.a[i] * si;
            for k in 0..i {
                let c = self.j[[i, k]];
                if c != 0.0 {
                    total += c * si * spins[k] as f64;
                }
            }
        }
        total
    }

    /// Change of variables s = 2x - 1: off-diagonal couplings scale by 4, the
    /// diagonal becomes 2a - 2(J + J^T)1, and the constant shifts by
    /// 1^T J 1 - a^T 1.
    pub fn to_qubo(&self) -> QuboModel {
        let n = self.num_vars;
        let mut q = Array2::zeros((n, n));
        let mut coupling_sums = vec![0.0; n];
        let mut grand_sum = 0.0;
        for i in 0..n {
            for k in 0..i {
                let c = self.j[[i, k]];
                if c != 0.0 {
                    q[[i, k]] = 4.0 * c;
                    coupling_sums[i] += c;
                    coupling_sums[k] += c;
                    grand_sum += c;
                }
            }
        }
        let mut a_sum = 0.0;
        for i in 0..n {
            q[[i, i]] = 2.0 * self.a[i] - 2.0 * coupling_sums[i];
            a_sum += self.a[i];
        }
        QuboModel {
            num_vars: n,
            q,
            constant: self.constant + grand_sum - a_sum,
        }
    }

    /// Fold the linear terms into couplings to one extra ancilla spin, added
    /// as the last variable. Fixing the ancilla to +1 recovers the original
    /// energy; because the extended model is invariant under a global spin
    /// flip, its minimum equals the original minimum. Returns the extended
    /// model and the ancilla index.
    pub fn absorb_linear_terms(&self) -> (IsingModel, usize) {
        let n = self.num_vars;
        let mut j = Array2::zeros((n + 1, n + 1));
        for i in 0..n {
            for k in 0..i {
                j[[i, k]] = self.j[[i, k]];
            }
            j[[n, i]] = self.a[i];
        }
        (
            IsingModel {
                num_vars: n + 1,
                j,
                a: Array1::zeros(n + 1),
                constant: self.constant,
            },
            n,
        )
    }
}

/// Undo [`IsingModel::absorb_linear_terms`] on a solution of the extended
/// model: if the ancilla (last spin) is -1, negate every spin, then drop it.
pub fn restore_from_ancilla(extended: &Assignment) -> Assignment {
    assert_eq!(extended.domain(), VariableDomain::Ising);
    assert!(!extended.is_empty(), "extended assignment has no ancilla");
    let values = extended.values();
    let sign = values[values.len() - 1];
    let restored: Vec<i8> = values[..values.len() - 1]
        .iter()
        .map(|&s| s * sign)
        .collect();
    Assignment::spins(restored).expect("spin products stay in domain")
}

/// A degree-<=2 polynomial lowered to the matrix model its domain dictates.
#[derive(Debug, Clone)]
pub enum SolverModel {
    Qubo(QuboModel),
    Ising(IsingModel),
}

impl SolverModel {
    pub fn from_polynomial(p: &BinaryPolynomial) -> Result<SolverModel> {
        if p.degree() > 2 {
            return Err(Error::DegreeTooHigh {
                degree: p.degree(),
                context: "SolverModel::from_polynomial",
            });
        }
        let n = p.num_vars();
        match p.domain() {
            VariableDomain::Boolean => {
                let mut q = Array2::zeros((n, n));
                for (key, coeff) in p.terms() {
                    match key {
                        [i] => q[[*i as usize, *i as usize]] += coeff,
                        [i, j] => q[[*j as usize, *i as usize]] += coeff,
                        _ => unreachable!("degree checked above"),
                    }
                }
                Ok(SolverModel::Qubo(QuboModel {
                    num_vars: n,
                    q,
                    constant: p.constant(),
                }))
            }
            VariableDomain::Ising => {
                let mut j = Array2::zeros((n, n));
                let mut a = Array1::zeros(n);
                for (key, coeff) in p.terms() {
                    match key {
                        [i] => a[*i as usize] += coeff,
                        [i, k] => j[[*k as usize, *i as usize]] += coeff,
                        _ => unreachable!("degree checked above"),
                    }
                }
                Ok(SolverModel::Ising(IsingModel {
                    num_vars: n,
                    j,
                    a,
                    constant: p.constant(),
                }))
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            SolverModel::Qubo(m) => m.num_vars(),
            SolverModel::Ising(m) => m.num_vars(),
        }
    }

    pub fn domain(&self) -> VariableDomain {
        match self {
            SolverModel::Qubo(_) => VariableDomain::Boolean,
            SolverModel::Ising(_) => VariableDomain::Ising,
        }
    }

    pub fn energy(&self, point: &Assignment) -> Result<f64> {
        match self {
            SolverModel::Qubo(m) => m.energy(point),
            SolverModel::Ising(m) => m.energy(point),
        }
    }
}

impl BinaryPolynomial {
    /// Lower a degree-<=2 polynomial to the matrix model for its domain.
    pub fn to_solver_model(&self) -> Result<SolverModel> {
        SolverModel::from_polynomial(self)
    }
}
