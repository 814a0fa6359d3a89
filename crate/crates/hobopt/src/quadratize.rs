//! Order reduction to degree <= 2 via penalized auxiliary variables.
//!
//! Each round picks the variable pair contained in the most degree-3+
//! monomials, replaces it with a fresh auxiliary everywhere it appears, and
//! adds a penalty that makes the auxiliary track the product exactly at any
//! optimum. Boolean substitutions cost one auxiliary (Rosenberg's
//! polynomial); spin substitutions cost two, because equality of three spins'
//! product cannot be written quadratically without a helper.
//!
//! The penalty weight is sized per substitution: 1 plus the total magnitude
//! of every coefficient the substitution touches, which upper-bounds any
//! energy the constraint violation could buy. One global "large M" would do,
//! but it would also be orders of magnitude stiffer than necessary.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Assignment, BinaryPolynomial, VariableDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    /// Replaced pair; either index may itself be an auxiliary from an
    /// earlier substitution.
    pub pair: (u32, u32),
    /// One fresh index (Boolean: y) or two (Ising: y, d).
    pub aux: Vec<u32>,
    pub penalty_weight: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratizationResult {
    pub quadratic: BinaryPolynomial,
    pub substitutions: Vec<Substitution>,
    pub original_num_vars: usize,
}

/// Penalty weight covering a set of affected coefficients: 1 + Σ|c|.
pub fn penalty_weight_for<I: IntoIterator<Item = f64>>(coeffs: I) -> f64 {
    let mut total = 1.0;
    let mut any = false;
    for c in coeffs {
        total += c.abs();
        any = true;
    }
    assert!(any, "a substitution must affect at least one term");
    total
}

pub fn quadratize(poly: &BinaryPolynomial) -> QuadratizationResult {
    let domain = poly.domain();
    let original_num_vars = poly.num_vars();

    // split terms once; `high` keys mutate as substitutions land
    let mut low: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), poly.constant())];
    let mut high: Vec<(Vec<u32>, f64)> = Vec::new();
    for (key, coeff) in poly.terms() {
        if key.len() <= 2 {
            low.push((key.to_vec(), coeff));
        } else {
            high.push((key.to_vec(), coeff));
        }
    }

    // pair -> ids of degree-3+ monomials containing both indices
    let mut coverage: BTreeMap<(u32, u32), BTreeSet<usize>> = BTreeMap::new();
    let index_pairs = |key: &[u32], id: usize, map: &mut BTreeMap<(u32, u32), BTreeSet<usize>>| {
        for (a_pos, &a) in key.iter().enumerate() {
            for &b in &key[a_pos + 1..] {
                map.entry((a, b)).or_default().insert(id);
            }
        }
    };
    for (id, (key, _)) in high.iter().enumerate() {
        index_pairs(key, id, &mut coverage);
    }

    let mut substitutions = Vec::new();
    let mut next_var = original_num_vars as u32;

    while let Some((&pair, _)) = coverage
        .iter()
        .max_by(|(pa, ids_a), (pb, ids_b)| {
            // most covering wins; ties fall to the lexicographically lowest
            // pair, which BTreeMap order makes the *first* maximum
            ids_a.len().cmp(&ids_b.len()).then(pb.cmp(pa))
        })
    {
        let ids = coverage.remove(&pair).expect("selected pair is present");
        let m = penalty_weight_for(ids.iter().map(|&id| high[id].1));
        let y = next_var;
        next_var += 1;

        for &id in &ids {
            let old_key = std::mem::take(&mut high[id].0);
            // drop this monomial from every pair it contributed to
            for (a_pos, &a) in old_key.iter().enumerate() {
                for &b in &old_key[a_pos + 1..] {
                    if (a, b) == pair {
                        continue;
                    }
                    if let Some(set) = coverage.get_mut(&(a, b)) {
                        set.remove(&id);
                        if set.is_empty() {
                            coverage.remove(&(a, b));
                        }
                    }
                }
            }
            // y is fresh and larger than everything, so push keeps order
            let mut new_key: Vec<u32> = old_key
                .iter()
                .copied()
                .filter(|&v| v != pair.0 && v != pair.1)
                .collect();
            new_key.push(y);
            if new_key.len() >= 3 {
                index_pairs(&new_key, id, &mut coverage);
                high[id].0 = new_key;
            } else {
                low.push((new_key, high[id].1));
            }
        }

        let (xi, xj) = (pair.0, pair.1);
        let aux = match domain {
            VariableDomain::Boolean => {
                // M (3y + x_i x_j - 2 x_i y - 2 x_j y)
                low.push((vec![y], 3.0 * m));
                low.push((vec![xi, xj], m));
                low.push((vec![xi, y], -2.0 * m));
                low.push((vec![xj, y], -2.0 * m));
                vec![y]
            }
            VariableDomain::Ising => {
                let d = next_var;
                next_var += 1;
                // M (4 + x_i + x_j - y - 2d + x_i x_j - x_i y - x_j y
                //    - 2 x_i d - 2 x_j d + 2 y d)
                low.push((vec![], 4.0 * m));
                low.push((vec![xi], m));
                low.push((vec![xj], m));
                low.push((vec![y], -m));
                low.push((vec![d], -2.0 * m));
                low.push((vec![xi, xj], m));
                low.push((vec![xi, y], -m));
                low.push((vec![xj, y], -m));
                low.push((vec![xi, d], -2.0 * m));
                low.push((vec![xj, d], -2.0 * m));
                low.push((vec![y, d], 2.0 * m));
                vec![y, d]
            }
        };
        substitutions.push(Substitution {
            pair,
            aux,
            penalty_weight: m,
        });
    }

    let quadratic = BinaryPolynomial::from_terms(next_var as usize, domain, low)
        .expect("substituted keys stay canonical");
    debug_assert!(quadratic.degree() <= 2);
    QuadratizationResult {
        quadratic,
        substitutions,
        original_num_vars,
    }
}

/// Restrict a solution of the quadratized model to the original variables.
pub fn project_assignment(
    r: &QuadratizationResult,
    extended: &Assignment,
) -> Result<Assignment> {
    if extended.domain() != r.quadratic.domain() {
        return Err(Error::DomainMismatch {
            expected: r.quadratic.domain(),
            actual: extended.domain(),
        });
    }
    if extended.len() != r.quadratic.num_vars() {
        return Err(Error::DimensionMismatch {
            context: "project_assignment",
            expected: r.quadratic.num_vars(),
            actual: extended.len(),
        });
    }
    let values = extended.values()[..r.original_num_vars].to_vec();
    Ok(Assignment::new(extended.domain(), values).expect("truncation preserves domain"))
}
