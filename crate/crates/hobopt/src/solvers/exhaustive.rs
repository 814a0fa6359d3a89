//! Exact enumeration over all binary assignments.
//!
//! States are visited in Gray-code order so each step flips exactly one
//! variable, and every flip is scored incrementally: polynomials keep a
//! per-term activity state, quadratic forms keep the matrix-vector product.
//! Incremental energies are re-anchored to an exact evaluation periodically
//! so accumulated rounding cannot leak into the reported optimum.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{Assignment, BinaryPolynomial, VariableDomain};

/// Enumeration refuses instances larger than this unless the caller raises
/// the cap explicitly.
pub const DEFAULT_VAR_CAP: usize = 26;

/// Hard ceiling: the Gray-code step counter must fit in u64.
const ABSOLUTE_VAR_CAP: usize = 40;

/// Re-anchor incremental energy to an exact evaluation this often.
const REANCHOR_PERIOD: u64 = 1 << 18;

/// Global minimum of a polynomial by full enumeration, capped at
/// [`DEFAULT_VAR_CAP`] variables.
pub fn minimize_polynomial(poly: &BinaryPolynomial) -> Result<(Assignment, f64)> {
    minimize_polynomial_capped(poly, DEFAULT_VAR_CAP)
}

pub fn minimize_polynomial_capped(
    poly: &BinaryPolynomial,
    var_cap: usize,
) -> Result<(Assignment, f64)> {
    let mut walker = PolyWalker::new(poly, var_cap)?;
    let mut best_state = walker.values.clone();
    let mut best_energy = walker.energy;
    walker.walk(|energy, values| {
        if energy < best_energy {
            best_energy = energy;
            best_state.copy_from_slice(values);
        }
    });
    let assignment = Assignment::new(poly.domain(), best_state).expect("walker keeps domain");
    let exact = poly.value_at(assignment.values());
    Ok((assignment, exact))
}

/// All assignments within `tol` of the global minimum, in ascending bit-mask
/// order, together with the exact minimum value. Two passes: the first finds
/// the minimum, the second collects and re-verifies candidates exactly.
pub fn minimizers_within(
    poly: &BinaryPolynomial,
    tol: f64,
    var_cap: usize,
) -> Result<(Vec<Assignment>, f64)> {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let (_, exact_min) = minimize_polynomial_capped(poly, var_cap)?;

    // Guard widens the incremental screen; exact evaluation decides.
    let guard = 1e-9 * exact_min.abs().max(1.0);
    let mut hits: Vec<Assignment> = Vec::new();
    let mut walker = PolyWalker::new(poly, var_cap)?;
    let mut consider = |energy: f64, values: &[i8]| {
        if energy <= exact_min + tol + guard {
            let exact = poly.value_at(values);
            if exact <= exact_min + tol {
                hits.push(
                    Assignment::new(poly.domain(), values.to_vec()).expect("domain preserved"),
                );
            }
        }
    };
    consider(walker.energy, &walker.values.clone());
    walker.walk(consider);
    hits.sort_by_key(|a| mask_of(a.values()));
    Ok((hits, exact_min))
}

fn mask_of(values: &[i8]) -> u64 {
    let mut mask = 0u64;
    for (i, &v) in values.iter().enumerate() {
        if v > 0 {
            mask |= 1 << i;
        }
    }
    mask
}

/// Incremental Gray-code evaluator for one polynomial.
struct PolyWalker<'a> {
    poly: &'a BinaryPolynomial,
    domain: VariableDomain,
    values: Vec<i8>,
    energy: f64,
    /// Term keys and coefficients, constant excluded.
    coeffs: Vec<f64>,
    /// term_state[t]: Ising carries the signed term value; Boolean counts
    /// variables currently 0 (term active iff the count is 0).
    term_state: Vec<f64>,
    zero_count: Vec<u32>,
    incidence: Vec<Vec<u32>>,
    steps: u64,
}

impl<'a> PolyWalker<'a> {
    fn new(poly: &'a BinaryPolynomial, var_cap: usize) -> Result<Self> {
        let n = poly.num_vars();
        let cap = var_cap.min(ABSOLUTE_VAR_CAP);
        if n > cap {
            return Err(Error::TooManyVariables {
                num_vars: n,
                cap,
            });
        }
        let domain = poly.domain();
        let low = domain.values()[0];
        let values = vec![low; n];

        let mut coeffs = Vec::new();
        let mut keys: Vec<&[u32]> = Vec::new();
        for (key, coeff) in poly.terms() {
            if key.is_empty() {
                continue;
            }
            keys.push(key);
            coeffs.push(coeff);
        }
        let mut incidence = vec![Vec::new(); n];
        for (t, key) in keys.iter().enumerate() {
            for &i in key.iter() {
                incidence[i as usize].push(t as u32);
            }
        }
        let mut term_state = Vec::new();
        let mut zero_count = Vec::new();
        let mut energy = poly.constant();
        match domain {
            VariableDomain::Ising => {
                for (t, key) in keys.iter().enumerate() {
                    // all spins start at -1
                    let val = if key.len() % 2 == 0 {
                        coeffs[t]
                    } else {
                        -coeffs[t]
                    };
                    term_state.push(val);
                    energy += val;
                }
            }
            VariableDomain::Boolean => {
                // all bits start at 0, so every nonconstant term is inactive
                for key in &keys {
                    zero_count.push(key.len() as u32);
                }
            }
        }
        Ok(PolyWalker {
            poly,
            domain,
            values,
            energy,
            coeffs,
            term_state,
            zero_count,
            incidence,
            steps: 0,
        })
    }

    /// Visit the remaining 2^n - 1 states (the constructor's state counts as
    /// visited). The callback sees the incremental energy and current values.
    fn walk<F: FnMut(f64, &[i8])>(&mut self, mut visit: F) {
        let n = self.values.len();
        if n == 0 {
            return;
        }
        let total: u64 = 1 << n;
        for step in 1..total {
            let k = step.trailing_zeros() as usize;
            self.flip(k);
            self.steps += 1;
            if self.steps % REANCHOR_PERIOD == 0 {
                self.energy = self.poly.value_at(&self.values);
            }
            visit(self.energy, &self.values);
        }
    }

    fn flip(&mut self, k: usize) {
        match self.domain {
            VariableDomain::Ising => {
                for &t in &self.incidence[k] {
                    let t = t as usize;
                    self.energy -= 2.0 * self.term_state[t];
                    self.term_state[t] = -self.term_state[t];
                }
                self.values[k] = -self.values[k];
            }
            VariableDomain::Boolean => {
                if self.values[k] == 0 {
                    for &t in &self.incidence[k] {
                        let t = t as usize;
                        self.zero_count[t] -= 1;
                        if self.zero_count[t] == 0 {
                            self.energy += self.coeffs[t];
                        }
                    }
                    self.values[k] = 1;
                } else {
                    for &t in &self.incidence[k] {
                        let t = t as usize;
                        if self.zero_count[t] == 0 {
                            self.energy -= self.coeffs[t];
                        }
                        self.zero_count[t] += 1;
                    }
                    self.values[k] = 0;
                }
            }
        }
    }
}

/// Best feasible point of  max x^T R x  s.t.  x^T J x >= c - feas_tol  over
/// spin vectors, exploiting sign symmetry by pinning x_0 = +1.
#[derive(Debug, Clone)]
pub struct ConstrainedBest {
    pub spins: Vec<i8>,
    /// x^T R x at the winner, exactly re-evaluated.
    pub objective: f64,
    /// x^T J x at the winner, exactly re-evaluated.
    pub constraint: f64,
}

/// Maximum of the quadratic form x^T M x over spin vectors with x_0 pinned
/// to +1 (the form is even, so this loses nothing).
pub fn maximize_form(m: &Array2<f64>) -> (Vec<i8>, f64) {
    let n = m.nrows();
    assert_eq!(m.ncols(), n, "square matrix required");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let s = symmetrize(m);
    let mut walker = FormWalker::new(&s);
    let mut best = walker.value;
    let mut best_state = walker.spins.clone();
    walker.walk(|q, spins| {
        if q > best {
            best = q;
            best_state.copy_from_slice(spins);
        }
    });
    let exact = form_value(&s, &best_state);
    (best_state, exact)
}

pub fn maximize_form_constrained(
    r: &Array2<f64>,
    j: &Array2<f64>,
    c: f64,
    feas_tol: f64,
) -> Option<ConstrainedBest> {
    let n = r.nrows();
    assert_eq!(r.ncols(), n, "square matrix required");
    assert_eq!(j.nrows(), n, "matching matrix sizes required");
    assert_eq!(j.ncols(), n, "matching matrix sizes required");
    if n == 0 {
        return None;
    }
    let rs = symmetrize(r);
    let js = symmetrize(j);
    let mut rw = FormWalker::new(&rs);
    let mut jw = FormWalker::new(&js);

    let mut best: Option<(f64, Vec<i8>)> = None;
    let mut check = |q_r: f64, q_j: f64, spins: &[i8]| {
        if q_j >= c - feas_tol && best.as_ref().is_none_or(|(b, _)| q_r > *b) {
            best = Some((q_r, spins.to_vec()));
        }
    };
    check(rw.value, jw.value, &rw.spins.clone());

    let total: u64 = 1 << (n - 1);
    for step in 1..total {
        let k = 1 + step.trailing_zeros() as usize;
        rw.flip(k);
        jw.flip(k);
        if step % REANCHOR_PERIOD == 0 {
            rw.reanchor();
            jw.reanchor();
        }
        check(rw.value, jw.value, &rw.spins);
    }

    best.map(|(_, spins)| {
        let objective = form_value(&rs, &spins);
        let constraint = form_value(&js, &spins);
        ConstrainedBest {
            spins,
            objective,
            constraint,
        }
    })
}

/// Incremental x^T S x under single-spin flips, S symmetric. x_0 stays +1.
struct FormWalker<'a> {
    s: &'a Array2<f64>,
    spins: Vec<i8>,
    /// w = S x
    w: Vec<f64>,
    value: f64,
}

impl<'a> FormWalker<'a> {
    fn new(s: &'a Array2<f64>) -> Self {
        let n = s.nrows();
        let spins = vec![1i8; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            for k in 0..n {
                w[i] += s[[i, k]];
            }
        }
        let value = w.iter().sum();
        FormWalker { s, spins, w, value }
    }

    fn walk<F: FnMut(f64, &[i8])>(&mut self, mut visit: F) {
        let n = self.spins.len();
        if n <= 1 {
            return;
        }
        let total: u64 = 1 << (n - 1);
        for step in 1..total {
            let k = 1 + step.trailing_zeros() as usize;
            self.flip(k);
            if step % REANCHOR_PERIOD == 0 {
                self.reanchor();
            }
            visit(self.value, &self.spins);
        }
    }

    fn flip(&mut self, k: usize) {
        let xk = self.spins[k] as f64;
        // x_k^2 = 1, so the flip changes the form by -4 x_k w_k + 4 S_kk
        self.value += -4.0 * xk * self.w[k] + 4.0 * self.s[[k, k]];
        let delta = -2.0 * xk;
        for i in 0..self.w.len() {
            self.w[i] += delta * self.s[[i, k]];
        }
        self.spins[k] = -self.spins[k];
    }

    fn reanchor(&mut self) {
        let n = self.spins.len();
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += self.s[[i, k]] * self.spins[k] as f64;
            }
            self.w[i] = acc;
        }
        self.value = self
            .w
            .iter()
            .zip(&self.spins)
            .map(|(wi, &xi)| wi * xi as f64)
            .sum();
    }
}

fn symmetrize(m: &Array2<f64>) -> Array2<f64> {
    (m + &m.t()) * 0.5
}

fn form_value(s: &Array2<f64>, spins: &[i8]) -> f64 {
    let n = spins.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            row += s[[i, k]] * spins[k] as f64;
        }
        total += row * spins[i] as f64;
    }
    total
}
