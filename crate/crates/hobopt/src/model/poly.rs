use std::collections::BTreeMap;

use ndarray::{Array1, Array2};

use super::{Assignment, VariableDomain};
use crate::error::{Error, Result};

/// A sparse multilinear polynomial over binary variables.
///
/// Terms are kept canonical at all times: index sets are sorted, duplicate
/// indices are reduced by the domain identity (x_i^2 = x_i for Boolean
/// variables, s_i^2 = 1 for spins), terms that reduce to the empty set are
/// folded into the constant, and zero-coefficient terms are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPolynomial {
    num_vars: usize,
    domain: VariableDomain,
    constant: f64,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl BinaryPolynomial {
    pub fn new(num_vars: usize, domain: VariableDomain) -> Self {
        BinaryPolynomial {
            num_vars,
            domain,
            constant: 0.0,
            terms: BTreeMap::new(),
        }
    }

    /// Build from raw (index multiset, coefficient) pairs, canonicalizing and
    /// merging as it goes.
    pub fn from_terms<I>(num_vars: usize, domain: VariableDomain, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = BinaryPolynomial::new(num_vars, domain);
        for (indices, coeff) in raw {
            p.add_term(&indices, coeff)?;
        }
        Ok(p)
    }

    /// The quadratic form x^T M x as a polynomial. Diagonal entries become
    /// constants in the spin domain (s_i^2 = 1) and linear terms in the
    /// Boolean domain (x_i^2 = x_i); symmetric off-diagonal pairs merge.
    pub fn from_quadratic_form(matrix: &Array2<f64>, domain: VariableDomain) -> Self {
        let n = matrix.nrows();
        assert_eq!(n, matrix.ncols(), "quadratic form matrix must be square");
        let mut p = BinaryPolynomial::new(n, domain);
        for i in 0..n {
            let diag = matrix[[i, i]];
            if diag != 0.0 {
                match domain {
                    VariableDomain::Ising => p.constant += diag,
                    VariableDomain::Boolean => {
                        p.add_term(&[i as u32], diag).expect("index in range")
                    }
                }
            }
            for j in 0..i {
                let c = matrix[[i, j]] + matrix[[j, i]];
                if c != 0.0 {
                    p.add_term(&[j as u32, i as u32], c).expect("index in range");
                }
            }
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn domain(&self) -> VariableDomain {
        self.domain
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest term degree; 0 for a constant polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    /// Canonical terms in deterministic (lexicographic index-set) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    /// Coefficient of the canonical form of `indices` (0.0 when absent).
    pub fn coefficient(&self, indices: &[u32]) -> f64 {
        match self.canonical_key(indices) {
            Ok(Some(key)) => self.terms.get(&key).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Add `coeff` times the monomial over `indices` (a multiset; repeats are
    /// reduced by the domain identity). Merges into an existing term and drops
    /// the term if the merged coefficient is exactly zero.
    pub fn add_term(&mut self, indices: &[u32], coeff: f64) -> Result<()> {
        let key = self.canonical_key(indices)?;
        match key {
            None => self.constant += coeff,
            Some(key) => self.merge_canonical(key, coeff),
        }
        Ok(())
    }

    fn merge_canonical(&mut self, key: Vec<u32>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = *o.get() + coeff;
                if merged == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = merged;
                }
            }
        }
    }

    /// Sort the multiset and apply the domain's square reduction. Returns
    /// `None` when the term collapses to a constant.
    fn canonical_key(&self, indices: &[u32]) -> Result<Option<Vec<u32>>> {
        for &i in indices {
            if i as usize >= self.num_vars {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    num_vars: self.num_vars,
                });
            }
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let reduced = match self.domain {
            // x_i^2 = x_i: keep one copy of each index.
            VariableDomain::Boolean => {
                sorted.dedup();
                sorted
            }
            // s_i^2 = 1: keep indices that appear an odd number of times.
            VariableDomain::Ising => {
                let mut kept = Vec::with_capacity(sorted.len());
                let mut run = 0usize;
                for (pos, &i) in sorted.iter().enumerate() {
                    run += 1;
                    let end_of_run = pos + 1 == sorted.len() || sorted[pos + 1] != i;
                    if end_of_run {
                        if run % 2 == 1 {
                            kept.push(i);
                        }
                        run = 0;
                    }
                }
                kept
            }
        };
        Ok(if reduced.is_empty() { None } else { Some(reduced) })
    }

    /// Evaluate at a binary point.
    pub fn evaluate(&self, point: &Assignment) -> Result<f64> {
        if point.domain() != self.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain,
                actual: point.domain(),
            });
        }
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                context: "evaluate",
                expected: self.num_vars,
                actual: point.len(),
            });
        }
        Ok(self.value_at(point.values()))
    }

    /// Evaluate at raw values without domain checks. Callers must pass a
    /// vector of the right length drawn from this polynomial's domain.
    pub fn value_at(&self, values: &[i8]) -> f64 {
        debug_assert_eq!(values.len(), self.num_vars);
        let mut total = self.constant;
        match self.domain {
            VariableDomain::Boolean => {
                'terms: for (key, coeff) in &self.terms {
                    for &i in key {
                        if values[i as usize] == 0 {
                            continue 'terms;
                        }
                    }
                    total += coeff;
                }
            }
            VariableDomain::Ising => {
                for (key, coeff) in &self.terms {
                    let mut negatives = 0usize;
                    for &i in key {
                        if values[i as usize] < 0 {
                            negatives += 1;
                        }
                    }
                    total += if negatives % 2 == 0 { *coeff } else { -coeff };
                }
            }
        }
        total
    }

    /// The multilinear extension evaluated at a real point.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.num_vars, "point length mismatch");
        let mut total = self.constant;
        for (key, coeff) in &self.terms {
            let mut prod = *coeff;
            for &i in key {
                prod *= x[i as usize];
            }
            total += prod;
        }
        total
    }

    /// First and second partial derivatives of the multilinear extension at a
    /// binary point. The Hessian is symmetric with a zero diagonal (no term
    /// contains a repeated index in canonical form).
    pub fn gradient_hessian(&self, x0: &Assignment) -> (Array1<f64>, Array2<f64>) {
        assert_eq!(x0.domain(), self.domain, "domain mismatch");
        assert_eq!(x0.len(), self.num_vars, "point length mismatch");
        let x = x0.values_f64();
        let n = self.num_vars;
        let mut grad = Array1::zeros(n);
        let mut hess = Array2::zeros((n, n));
        for (key, &coeff) in &self.terms {
            let d = key.len();
            for (ai, &i) in key.iter().enumerate() {
                let mut prod = coeff;
                for (bi, &k) in key.iter().enumerate() {
                    if bi != ai {
                        prod *= x[k as usize];
                    }
                }
                grad[i as usize] += prod;
                if d >= 2 {
                    for (aj, &j) in key.iter().enumerate().skip(ai + 1) {
                        let mut pp = coeff;
                        for (bk, &k) in key.iter().enumerate() {
                            if bk != ai && bk != aj {
                                pp *= x[k as usize];
                            }
                        }
                        hess[[i as usize, j as usize]] += pp;
                        hess[[j as usize, i as usize]] += pp;
                    }
                }
            }
        }
        (grad, hess)
    }

    /// Second-order Taylor surrogate around the binary point `x0`; see
    /// [`taylor_from_parts`]. Exact for polynomials of degree <= 2.
    pub fn taylor_quadratic(&self, x0: &Assignment) -> BinaryPolynomial {
        let f0 = self.evaluate(x0).expect("x0 must match the polynomial");
        let (grad, hess) = self.gradient_hessian(x0);
        taylor_from_parts(f0, &grad, &hess, x0)
    }

    /// Add `scale` times `other` into `self`. Both must share the variable
    /// count and domain.
    pub fn add_scaled(&mut self, other: &BinaryPolynomial, scale: f64) {
        assert_eq!(self.domain, other.domain, "domain mismatch");
        assert_eq!(self.num_vars, other.num_vars, "variable count mismatch");
        self.constant += scale * other.constant;
        for (key, &coeff) in &other.terms {
            self.merge_canonical(key.clone(), scale * coeff);
        }
    }

    pub fn scaled(&self, scale: f64) -> BinaryPolynomial {
        let mut out = BinaryPolynomial::new(self.num_vars, self.domain);
        out.add_scaled(self, scale);
        out
    }

    /// Polynomial product. Term keys combine by union in the Boolean domain
    /// and by symmetric difference in the spin domain (s_i^2 = 1).
    pub fn mul(&self, other: &BinaryPolynomial) -> BinaryPolynomial {
        assert_eq!(self.domain, other.domain, "domain mismatch");
        assert_eq!(self.num_vars, other.num_vars, "variable count mismatch");
        let mut out = BinaryPolynomial::new(self.num_vars, self.domain);
        out.constant = self.constant * other.constant;
        for (key, &coeff) in &self.terms {
            let c = coeff * other.constant;
            if c != 0.0 {
                out.merge_canonical(key.clone(), c);
            }
        }
        for (key, &coeff) in &other.terms {
            let c = coeff * self.constant;
            if c != 0.0 {
                out.merge_canonical(key.clone(), c);
            }
        }
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let c = ca * cb;
                if c == 0.0 {
                    continue;
                }
                match combine_sorted(ka, kb, self.domain) {
                    None => out.constant += c,
                    Some(key) => out.merge_canonical(key, c),
                }
            }
        }
        out
    }
}

/// Merge two sorted duplicate-free index sets under the domain identity:
/// union for Boolean variables, symmetric difference for spins. Returns
/// `None` when the product reduces to a constant.
fn combine_sorted(a: &[u32], b: &[u32], domain: VariableDomain) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if domain == VariableDomain::Boolean {
                    out.push(a[i]);
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Assemble the surrogate
///   f~(x) = f0 + g . (x - x0) + 1/2 sum_{i != j} H_ij (x_i - x0_i)(x_j - x0_j)
/// as a canonical polynomial of degree <= 2. `hess` must be symmetric with a
/// zero diagonal; the half factor makes the surrogate reproduce quadratic
/// polynomials exactly.
pub(crate) fn taylor_from_parts(
    f0: f64,
    grad: &Array1<f64>,
    hess: &Array2<f64>,
    x0: &Assignment,
) -> BinaryPolynomial {
    let n = x0.len();
    assert_eq!(grad.len(), n, "gradient length mismatch");
    assert_eq!(hess.nrows(), n, "hessian shape mismatch");
    assert_eq!(hess.ncols(), n, "hessian shape mismatch");
    let a = x0.values_f64();
    let mut p = BinaryPolynomial::new(n, x0.domain());

    // 1/2 sum_{i != j} H_ij D_i D_j = sum_{i<j} H_ij D_i D_j for symmetric H.
    let mut constant = f0;
    for i in 0..n {
        let mut row_dot = 0.0;
        for j in 0..n {
            if j != i {
                row_dot += hess[[i, j]] * a[j];
            }
            if j > i && hess[[i, j]] != 0.0 {
                p.add_term(&[i as u32, j as u32], hess[[i, j]])
                    .expect("index in range");
                constant += hess[[i, j]] * a[i] * a[j];
            }
        }
        let linear = grad[i] - row_dot;
        if linear != 0.0 {
            p.add_term(&[i as u32], linear).expect("index in range");
        }
        constant -= grad[i] * a[i];
    }
    p.add_constant(constant);
    p
}
