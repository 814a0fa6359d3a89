//! Model types: sparse multilinear polynomials over binary variables, their
//! quadratic matrix forms, and conversions between the two variable domains.

mod poly;
mod quadratic;
pub mod text;

pub use poly::BinaryPolynomial;
pub(crate) use poly::taylor_from_parts;
pub use quadratic::{restore_from_ancilla, IsingModel, QuboModel, SolverModel};

use crate::error::{Error, Result};

/// The two variable conventions: `Boolean` variables take values in {0, 1},
/// `Ising` spins take values in {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableDomain {
    Boolean,
    Ising,
}

impl VariableDomain {
    pub fn contains(self, value: i8) -> bool {
        match self {
            VariableDomain::Boolean => value == 0 || value == 1,
            VariableDomain::Ising => value == -1 || value == 1,
        }
    }

    /// The two admissible values, low then high.
    pub fn values(self) -> [i8; 2] {
        match self {
            VariableDomain::Boolean => [0, 1],
            VariableDomain::Ising => [-1, 1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VariableDomain::Boolean => "boolean",
            VariableDomain::Ising => "ising",
        }
    }
}

impl std::str::FromStr for VariableDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(VariableDomain::Boolean),
            "ising" => Ok(VariableDomain::Ising),
            other => Err(Error::InvalidConfig(format!(
                "unknown domain {other:?}; expected \"boolean\" or \"ising\""
            ))),
        }
    }
}

/// A complete binary assignment: one value per variable, all drawn from the
/// same domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    domain: VariableDomain,
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(domain: VariableDomain, values: Vec<i8>) -> Result<Self> {
        for &v in &values {
            if !domain.contains(v) {
                return Err(Error::InvalidConfig(format!(
                    "value {v} is not a {} variable value",
                    domain.name()
                )));
            }
        }
        Ok(Assignment { domain, values })
    }

    /// Spin vector in {-1, +1}.
    pub fn spins(values: Vec<i8>) -> Result<Self> {
        Assignment::new(VariableDomain::Ising, values)
    }

    /// Bit vector in {0, 1}.
    pub fn bits(values: Vec<i8>) -> Result<Self> {
        Assignment::new(VariableDomain::Boolean, values)
    }

    /// Uniform random assignment.
    pub fn random<R: rand::Rng + ?Sized>(
        num_vars: usize,
        domain: VariableDomain,
        rng: &mut R,
    ) -> Self {
        let [lo, hi] = domain.values();
        let values = (0..num_vars)
            .map(|_| if rng.random::<bool>() { hi } else { lo })
            .collect();
        Assignment { domain, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> VariableDomain {
        self.domain
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.values[i]
    }

    /// Replace the value at `i`; the new value must belong to the domain.
    pub fn set(&mut self, i: usize, value: i8) {
        assert!(
            self.domain.contains(value),
            "value {value} is not a {} value",
            self.domain.name()
        );
        self.values[i] = value;
    }

    /// Flip variable `i` to the other admissible value.
    pub fn flip(&mut self, i: usize) {
        let [lo, hi] = self.domain.values();
        self.values[i] = if self.values[i] == hi { lo } else { hi };
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    /// Map bits to spins via s = 2x - 1. Identity on spin assignments.
    pub fn to_spins(&self) -> Assignment {
        match self.domain {
            VariableDomain::Ising => self.clone(),
            VariableDomain::Boolean => Assignment {
                domain: VariableDomain::Ising,
                values: self.values.iter().map(|&x| 2 * x - 1).collect(),
            },
        }
    }

    /// Map spins to bits via x = (s + 1) / 2. Identity on bit assignments.
    pub fn to_bits(&self) -> Assignment {
        match self.domain {
            VariableDomain::Boolean => self.clone(),
            VariableDomain::Ising => Assignment {
                domain: VariableDomain::Boolean,
                values: self.values.iter().map(|&s| (s + 1) / 2).collect(),
            },
        }
    }
}
