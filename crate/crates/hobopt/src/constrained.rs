//! Constrained binary optimization by multiplier methods.
//!
//! The driver is an augmented-Lagrangian loop with the inequality slack
//! eliminated in closed form: for fixed x the optimal slack is
//! v = max(0, -[g(x) + lambda/mu]), so no continuous variable ever needs a
//! binary encoding. Each outer iteration minimizes the resulting
//! unconstrained surface with the surrogate-descent loop (or, alternatively,
//! order reduction plus a quadratic solver), then updates multipliers and
//! the penalty weight.
//!
//! Objectives and constraints are kept in factored quadratic-form shape
//! whenever they have one: the augmented Lagrangian of
//! (-x^T R x, c - x^T J x <= 0) stays a composite with a (x^T J x)^2 term
//! instead of a materialized O(N^4)-monomial polynomial.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::hobo::{minimize_hobo, HoboConfig, InitialPoint, SurrogateSolver};
use crate::model::{Assignment, BinaryPolynomial, VariableDomain};
use crate::objective::{BinaryObjective, QuadraticFormComposite};
use crate::quadratize::{project_assignment, quadratize};
use crate::seeds::derive;
use crate::solvers::{dsb, exhaustive, sa};

#[derive(Debug, Clone)]
pub enum ObjectiveExpr {
    Polynomial(BinaryPolynomial),
    /// c1 * x^T A x + c0 over spins, kept factored.
    ScaledQuadraticForm { c1: f64, a: Array2<f64>, c0: f64 },
}

impl ObjectiveExpr {
    pub fn num_vars(&self) -> usize {
        match self {
            ObjectiveExpr::Polynomial(p) => p.num_vars(),
            ObjectiveExpr::ScaledQuadraticForm { a, .. } => a.nrows(),
        }
    }

    pub fn domain(&self) -> VariableDomain {
        match self {
            ObjectiveExpr::Polynomial(p) => p.domain(),
            ObjectiveExpr::ScaledQuadraticForm { .. } => VariableDomain::Ising,
        }
    }

    pub fn value(&self, point: &Assignment) -> f64 {
        match self {
            ObjectiveExpr::Polynomial(p) => p.value_at(point.values()),
            ObjectiveExpr::ScaledQuadraticForm { c1, a, c0 } => {
                c1 * spin_form(a, point.values()) + c0
            }
        }
    }

    pub fn to_polynomial(&self) -> BinaryPolynomial {
        match self {
            ObjectiveExpr::Polynomial(p) => p.clone(),
            ObjectiveExpr::ScaledQuadraticForm { c1, a, c0 } => {
                let mut p = BinaryPolynomial::from_quadratic_form(a, VariableDomain::Ising)
                    .scaled(*c1);
                p.add_constant(*c0);
                p
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum ConstraintExpr {
    /// g(x) as an explicit polynomial.
    Polynomial(BinaryPolynomial),
    /// g(x) = threshold - x^T J x, kept factored (spins).
    ThresholdMinusForm { threshold: f64, j: Array2<f64> },
}

impl ConstraintExpr {
    pub fn num_vars(&self) -> usize {
        match self {
            ConstraintExpr::Polynomial(p) => p.num_vars(),
            ConstraintExpr::ThresholdMinusForm { j, .. } => j.nrows(),
        }
    }

    pub fn domain(&self) -> VariableDomain {
        match self {
            ConstraintExpr::Polynomial(p) => p.domain(),
            ConstraintExpr::ThresholdMinusForm { .. } => VariableDomain::Ising,
        }
    }

    pub fn value(&self, point: &Assignment) -> f64 {
        match self {
            ConstraintExpr::Polynomial(p) => p.value_at(point.values()),
            ConstraintExpr::ThresholdMinusForm { threshold, j } => {
                threshold - spin_form(j, point.values())
            }
        }
    }

    pub fn to_polynomial(&self) -> BinaryPolynomial {
        match self {
            ConstraintExpr::Polynomial(p) => p.clone(),
            ConstraintExpr::ThresholdMinusForm { threshold, j } => {
                let mut p = BinaryPolynomial::from_quadratic_form(j, VariableDomain::Ising)
                    .scaled(-1.0);
                p.add_constant(*threshold);
                p
            }
        }
    }

    /// Anchor for relative feasibility tolerances.
    pub fn feasibility_scale(&self) -> f64 {
        let anchor = match self {
            ConstraintExpr::Polynomial(p) => p.constant(),
            ConstraintExpr::ThresholdMinusForm { threshold, .. } => *threshold,
        };
        anchor.abs().max(1.0)
    }
}

fn spin_form(m: &Array2<f64>, values: &[i8]) -> f64 {
    let n = values.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            row += m[[i, k]] * values[k] as f64;
        }
        total += row * values[i] as f64;
    }
    total
}

#[derive(Debug, Clone)]
pub struct ConstrainedProblem {
    pub objective: ObjectiveExpr,
    /// g_k(x) <= 0.
    pub inequalities: Vec<ConstraintExpr>,
    /// h_k(x) = 0.
    pub equalities: Vec<ConstraintExpr>,
}

impl ConstrainedProblem {
    pub fn new(
        objective: ObjectiveExpr,
        inequalities: Vec<ConstraintExpr>,
        equalities: Vec<ConstraintExpr>,
    ) -> Result<Self> {
        let n = objective.num_vars();
        let domain = objective.domain();
        for c in inequalities.iter().chain(&equalities) {
            if c.num_vars() != n {
                return Err(Error::DimensionMismatch {
                    context: "ConstrainedProblem::new",
                    expected: n,
                    actual: c.num_vars(),
                });
            }
            if c.domain() != domain {
                return Err(Error::DomainMismatch {
                    expected: domain,
                    actual: c.domain(),
                });
            }
        }
        Ok(ConstrainedProblem {
            objective,
            inequalities,
            equalities,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    pub fn domain(&self) -> VariableDomain {
        self.objective.domain()
    }

    /// Worst constraint violation at a point (0 when feasible exactly).
    pub fn violation(&self, point: &Assignment) -> f64 {
        let mut worst: f64 = 0.0;
        for g in &self.inequalities {
            worst = worst.max(g.value(point).max(0.0));
        }
        for h in &self.equalities {
            worst = worst.max(h.value(point).abs());
        }
        worst
    }

    /// Feasibility under per-constraint relative tolerances.
    pub fn is_feasible(&self, point: &Assignment, tol_rel: f64) -> bool {
        self.inequalities
            .iter()
            .all(|g| g.value(point) <= tol_rel * g.feasibility_scale())
            && self
                .equalities
                .iter()
                .all(|h| h.value(point).abs() <= tol_rel * h.feasibility_scale())
    }
}

/// Multiplier/penalty state of the outer loop.
#[derive(Debug, Clone)]
pub struct AlmState {
    /// One multiplier per constraint, inequalities first. Inequality
    /// multipliers stay >= 0.
    pub lambdas: Vec<f64>,
    pub mu: f64,
    /// Closed-form slack per inequality, >= 0.
    pub vs: Vec<f64>,
    pub best_feasible: Option<(Assignment, f64)>,
    pub iteration: usize,
}

/// F(x) = f(x) + sum_k [lam_k (g_k + v_k) + mu/2 (g_k + v_k)^2]
///             + sum_k [lam_k h_k + mu/2 h_k^2], with the slacks frozen.
#[derive(Debug, Clone)]
pub enum AugmentedObjective {
    Polynomial(BinaryPolynomial),
    Composite(QuadraticFormComposite),
}

impl AugmentedObjective {
    pub fn materialize(&self) -> BinaryPolynomial {
        match self {
            AugmentedObjective::Polynomial(p) => p.clone(),
            AugmentedObjective::Composite(c) => c.materialize(),
        }
    }
}

impl BinaryObjective for AugmentedObjective {
    fn num_vars(&self) -> usize {
        match self {
            AugmentedObjective::Polynomial(p) => BinaryObjective::num_vars(p),
            AugmentedObjective::Composite(c) => c.num_vars(),
        }
    }

    fn domain(&self) -> VariableDomain {
        match self {
            AugmentedObjective::Polynomial(p) => BinaryObjective::domain(p),
            AugmentedObjective::Composite(c) => BinaryObjective::domain(c),
        }
    }

    fn value(&self, point: &Assignment) -> f64 {
        match self {
            AugmentedObjective::Polynomial(p) => BinaryObjective::value(p, point),
            AugmentedObjective::Composite(c) => c.value(point),
        }
    }

    fn gradient_hessian(&self, point: &Assignment) -> (ndarray::Array1<f64>, Array2<f64>) {
        match self {
            AugmentedObjective::Polynomial(p) => BinaryObjective::gradient_hessian(p, point),
            AugmentedObjective::Composite(c) => c.gradient_hessian(point),
        }
    }
}

pub fn build_augmented_lagrangian(
    p: &ConstrainedProblem,
    state: &AlmState,
) -> Result<AugmentedObjective> {
    let n_ineq = p.inequalities.len();
    if state.lambdas.len() != n_ineq + p.equalities.len() {
        return Err(Error::DimensionMismatch {
            context: "build_augmented_lagrangian lambdas",
            expected: n_ineq + p.equalities.len(),
            actual: state.lambdas.len(),
        });
    }
    if state.vs.len() != n_ineq {
        return Err(Error::DimensionMismatch {
            context: "build_augmented_lagrangian slacks",
            expected: n_ineq,
            actual: state.vs.len(),
        });
    }

    // factored fast path: objective c1 x^T A x + c0 with one
    // threshold-minus-form inequality stays a quartic composite
    if let (
        ObjectiveExpr::ScaledQuadraticForm { c1, a, c0 },
        [ConstraintExpr::ThresholdMinusForm { threshold, j }],
        [],
    ) = (&p.objective, p.inequalities.as_slice(), p.equalities.as_slice())
    {
        let lambda = state.lambdas[0];
        let v = state.vs[0];
        let mu = state.mu;
        let shifted = threshold + v;
        // lam (g+v) + mu/2 (g+v)^2 with g = threshold - x^T J x expands to
        //   -(lam + mu (threshold+v)) x^T J x + mu/2 (x^T J x)^2
        //   + lam (threshold+v) + mu/2 (threshold+v)^2
        let mut combined = j * -(lambda + mu * shifted);
        combined = combined + &(a * *c1);
        let constant = c0 + lambda * shifted + 0.5 * mu * shifted * shifted;
        let composite =
            QuadraticFormComposite::new(1.0, combined, 0.5 * mu, j.clone(), constant)?;
        return Ok(AugmentedObjective::Composite(composite));
    }

    let mut f = p.objective.to_polynomial();
    for (k, g) in p.inequalities.iter().enumerate() {
        let lambda = state.lambdas[k];
        let mut shifted = g.to_polynomial();
        shifted.add_constant(state.vs[k]);
        let squared = shifted.mul(&shifted);
        f.add_scaled(&shifted, lambda);
        f.add_scaled(&squared, 0.5 * state.mu);
    }
    for (k, h) in p.equalities.iter().enumerate() {
        let lambda = state.lambdas[n_ineq + k];
        let hp = h.to_polynomial();
        let squared = hp.mul(&hp);
        f.add_scaled(&hp, lambda);
        f.add_scaled(&squared, 0.5 * state.mu);
    }
    Ok(AugmentedObjective::Polynomial(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerRoute {
    /// Surrogate-descent loop directly on the augmented objective.
    Hobo,
    /// Materialize, reduce order with auxiliaries, solve the quadratic with
    /// the configured solver, project. Bypasses Taylor surrogates entirely.
    Quadratize,
}

#[derive(Debug, Clone)]
pub struct AlmConfig {
    pub lambda0: f64,
    pub mu0: f64,
    pub rho: f64,
    pub min_iters: usize,
    pub max_iters: usize,
    pub stall_iters: usize,
    pub feasibility_tol: f64,
    pub inner: HoboConfig,
    pub inner_route: InnerRoute,
}

impl Default for AlmConfig {
    fn default() -> Self {
        AlmConfig {
            lambda0: 3.0,
            mu0: 5.5,
            rho: 1.1,
            min_iters: 10,
            max_iters: 50,
            stall_iters: 5,
            feasibility_tol: 1e-6,
            inner: HoboConfig::default(),
            inner_route: InnerRoute::Hobo,
        }
    }
}

impl AlmConfig {
    fn validate(&self) -> Result<()> {
        if self.min_iters == 0 || self.max_iters < self.min_iters {
            return Err(Error::InvalidConfig(
                "alm: need max_iters >= min_iters >= 1".into(),
            ));
        }
        if !(self.mu0 > 0.0) {
            return Err(Error::InvalidConfig("alm: mu0 must be > 0".into()));
        }
        if !(self.rho > 1.0) {
            return Err(Error::InvalidConfig("alm: rho must be > 1".into()));
        }
        if self.stall_iters == 0 {
            return Err(Error::InvalidConfig("alm: stall_iters must be >= 1".into()));
        }
        if !(self.feasibility_tol >= 0.0) {
            return Err(Error::InvalidConfig("alm: feasibility_tol must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AlmIteration {
    pub iteration: usize,
    /// Multiplier(s) used to build this iteration's surface.
    pub lambdas: Vec<f64>,
    pub mu: f64,
    pub vs: Vec<f64>,
    /// g_k(x) for inequalities then h_k(x) for equalities, at the iterate.
    pub constraint_values: Vec<f64>,
    /// Original objective at the iterate.
    pub objective: f64,
    pub feasible: bool,
    pub best_so_far: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AlmOutcome {
    pub best_feasible: Option<(Assignment, f64)>,
    /// Smallest worst-constraint violation over all iterates; 0 whenever
    /// some iterate was feasible.
    pub min_violation: f64,
    pub trace: Vec<AlmIteration>,
}

fn set_solver_seed(solver: &mut SurrogateSolver, seed: u64) {
    match solver {
        SurrogateSolver::Dsb(cfg) => cfg.seed = seed,
        SurrogateSolver::Sa(cfg) => cfg.seed = seed,
        SurrogateSolver::Exhaustive => {}
    }
}

fn solver_seed(solver: &SurrogateSolver) -> u64 {
    match solver {
        SurrogateSolver::Dsb(cfg) => cfg.seed,
        SurrogateSolver::Sa(cfg) => cfg.seed,
        SurrogateSolver::Exhaustive => 0,
    }
}

/// One inner minimization of the augmented surface. Returns the minimizer
/// plus every candidate the inner loop evaluated along the way; the frozen
/// slack prices real feasible points dishonestly, so the outer loop screens
/// the whole stream against the true constraint rather than trusting the
/// single returned optimum.
fn minimize_inner(
    augmented: &AugmentedObjective,
    inner: &HoboConfig,
    route: InnerRoute,
) -> Result<(Assignment, Vec<Assignment>)> {
    match route {
        InnerRoute::Hobo => {
            let outcome = minimize_hobo(augmented, inner)?;
            Ok((outcome.assignment, outcome.visited))
        }
        InnerRoute::Quadratize => {
            let reduced = quadratize(&augmented.materialize());
            let seed = solver_seed(&inner.solver);
            let extended = match &inner.solver {
                SurrogateSolver::Exhaustive => {
                    exhaustive::minimize_polynomial_capped(&reduced.quadratic, 30)?.0
                }
                SurrogateSolver::Dsb(cfg) => {
                    let mut cfg = cfg.clone();
                    cfg.seed = seed;
                    let model = match reduced.quadratic.to_solver_model()? {
                        crate::model::SolverModel::Ising(m) => m,
                        crate::model::SolverModel::Qubo(q) => q.to_ising(),
                    };
                    let result = dsb::solve_dsb(&model, &cfg)?;
                    match reduced.quadratic.domain() {
                        VariableDomain::Ising => result.assignment,
                        VariableDomain::Boolean => result.assignment.to_bits(),
                    }
                }
                SurrogateSolver::Sa(cfg) => {
                    let mut cfg = cfg.clone();
                    cfg.seed = seed;
                    let model = match reduced.quadratic.to_solver_model()? {
                        crate::model::SolverModel::Ising(m) => m,
                        crate::model::SolverModel::Qubo(q) => q.to_ising(),
                    };
                    let result = sa::solve_sa(&model, &cfg)?;
                    match reduced.quadratic.domain() {
                        VariableDomain::Ising => result.assignment,
                        VariableDomain::Boolean => result.assignment.to_bits(),
                    }
                }
            };
            let projected = project_assignment(&reduced, &extended)?;
            let visited = vec![projected.clone()];
            Ok((projected, visited))
        }
    }
}

pub fn solve_alm(p: &ConstrainedProblem, cfg: &AlmConfig) -> Result<AlmOutcome> {
    cfg.validate()?;
    let n_ineq = p.inequalities.len();
    let n_cons = n_ineq + p.equalities.len();
    let mut state = AlmState {
        lambdas: vec![cfg.lambda0; n_cons],
        mu: cfg.mu0,
        vs: vec![0.0; n_ineq],
        best_feasible: None,
        iteration: 0,
    };
    let base_seed = solver_seed(&cfg.inner.solver);

    let mut trace = Vec::new();
    let mut min_violation = f64::INFINITY;
    let mut stall = 0usize;
    let mut warm: Option<Assignment> = None;

    while state.iteration < cfg.max_iters {
        let augmented = build_augmented_lagrangian(p, &state)?;
        let mut inner = cfg.inner.clone();
        set_solver_seed(&mut inner.solver, derive(base_seed, &[state.iteration as u64]));
        if let Some(prev) = &warm {
            inner.initial_point = InitialPoint::Fixed(prev.clone());
        }
        let (x, candidates) = minimize_inner(&augmented, &inner, cfg.inner_route)?;

        // screen every candidate against the true constraint: the frozen
        // quadratic can price a heavily overshooting feasible point above an
        // almost-feasible one, so the inner minimizer alone would discard it
        let mut improved = false;
        for candidate in &candidates {
            min_violation = min_violation.min(p.violation(candidate));
            if !p.is_feasible(candidate, cfg.feasibility_tol) {
                continue;
            }
            let value = p.objective.value(candidate);
            if state
                .best_feasible
                .as_ref()
                .is_none_or(|(_, best)| value < *best)
            {
                state.best_feasible = Some((candidate.clone(), value));
                improved = true;
            }
        }
        let objective = p.objective.value(&x);
        let feasible = p.is_feasible(&x, cfg.feasibility_tol);

        let g_values: Vec<f64> = p
            .inequalities
            .iter()
            .chain(&p.equalities)
            .map(|c| c.value(&x))
            .collect();
        trace.push(AlmIteration {
            iteration: state.iteration,
            lambdas: state.lambdas.clone(),
            mu: state.mu,
            vs: state.vs.clone(),
            constraint_values: g_values.clone(),
            objective,
            feasible,
            best_so_far: state.best_feasible.as_ref().map(|(_, b)| *b),
        });

        for k in 0..n_ineq {
            let g = g_values[k];
            state.vs[k] = (-(g + state.lambdas[k] / state.mu)).max(0.0);
            state.lambdas[k] = (state.lambdas[k] + state.mu * g).max(0.0);
        }
        for k in 0..p.equalities.len() {
            state.lambdas[n_ineq + k] += state.mu * g_values[n_ineq + k];
        }
        state.mu *= cfg.rho;
        state.iteration += 1;
        warm = Some(x);

        stall = if improved { 0 } else { stall + 1 };
        if state.best_feasible.is_some()
            && state.iteration >= cfg.min_iters
            && stall >= cfg.stall_iters
        {
            break;
        }
    }

    if state.best_feasible.is_some() {
        min_violation = 0.0;
    }
    Ok(AlmOutcome {
        best_feasible: state.best_feasible,
        min_violation,
        trace,
    })
}

/// f + lambda * max(g, 0)^2 with the active branch differentiated exactly:
/// where g > 0 the term contributes gradient 2*lambda*g*grad_g and Hessian
/// 2*lambda*(grad_g grad_g^T + g*H_g); where g <= 0 it contributes nothing.
#[derive(Debug, Clone)]
pub struct PenaltyObjective {
    objective: ObjectiveExpr,
    constraint: ConstraintExpr,
    lambda: f64,
}

impl PenaltyObjective {
    pub fn new(objective: ObjectiveExpr, constraint: ConstraintExpr, lambda: f64) -> Result<Self> {
        if objective.num_vars() != constraint.num_vars() {
            return Err(Error::DimensionMismatch {
                context: "PenaltyObjective::new",
                expected: objective.num_vars(),
                actual: constraint.num_vars(),
            });
        }
        if objective.domain() != constraint.domain() {
            return Err(Error::DomainMismatch {
                expected: objective.domain(),
                actual: constraint.domain(),
            });
        }
        Ok(PenaltyObjective {
            objective,
            constraint,
            lambda,
        })
    }
}

fn expr_gradient_hessian(
    expr: &ObjectiveExpr,
    point: &Assignment,
) -> (ndarray::Array1<f64>, Array2<f64>) {
    match expr {
        ObjectiveExpr::Polynomial(p) => p.gradient_hessian(point),
        ObjectiveExpr::ScaledQuadraticForm { c1, a, .. } => {
            let x = ndarray::Array1::from_vec(point.values_f64());
            let sym = (a + &a.t()) * 0.5;
            let grad = sym.dot(&x) * (2.0 * c1);
            let mut hess = sym * (2.0 * c1);
            for i in 0..hess.nrows() {
                hess[[i, i]] = 0.0;
            }
            (grad, hess)
        }
    }
}

fn constraint_gradient_hessian(
    expr: &ConstraintExpr,
    point: &Assignment,
) -> (ndarray::Array1<f64>, Array2<f64>) {
    match expr {
        ConstraintExpr::Polynomial(p) => p.gradient_hessian(point),
        ConstraintExpr::ThresholdMinusForm { j, .. } => {
            let x = ndarray::Array1::from_vec(point.values_f64());
            let sym = (j + &j.t()) * 0.5;
            let grad = sym.dot(&x) * -2.0;
            let mut hess = sym * -2.0;
            for i in 0..hess.nrows() {
                hess[[i, i]] = 0.0;
            }
            (grad, hess)
        }
    }
}

impl BinaryObjective for PenaltyObjective {
    fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    fn domain(&self) -> VariableDomain {
        self.objective.domain()
    }

    fn value(&self, point: &Assignment) -> f64 {
        let u = self.constraint.value(point).max(0.0);
        self.objective.value(point) + self.lambda * u * u
    }

    fn gradient_hessian(&self, point: &Assignment) -> (ndarray::Array1<f64>, Array2<f64>) {
        let (mut grad, mut hess) = expr_gradient_hessian(&self.objective, point);
        let g = self.constraint.value(point);
        if g > 0.0 {
            let (g_grad, g_hess) = constraint_gradient_hessian(&self.constraint, point);
            let n = grad.len();
            grad = grad + &g_grad * (2.0 * self.lambda * g);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    hess[[i, j]] +=
                        2.0 * self.lambda * (g_grad[i] * g_grad[j] + g * g_hess[[i, j]]);
                }
            }
        }
        (grad, hess)
    }
}

#[derive(Debug, Clone)]
pub struct PenaltyConfig {
    pub lambda0: f64,
    pub growth: f64,
    pub max_rounds: usize,
    pub feasibility_tol: f64,
    pub inner: HoboConfig,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            lambda0: 1.0,
            growth: 10.0,
            max_rounds: 5,
            feasibility_tol: 1e-6,
            inner: HoboConfig::default(),
        }
    }
}

/// Squared-penalty baseline: minimize f + lambda*max(g,0)^2, escalating
/// lambda by `growth` until the minimizer is feasible or rounds run out.
pub fn solve_penalty(p: &ConstrainedProblem, cfg: &PenaltyConfig) -> Result<AlmOutcome> {
    if p.inequalities.len() != 1 || !p.equalities.is_empty() {
        return Err(Error::InvalidConfig(
            "penalty baseline handles exactly one inequality".into(),
        ));
    }
    if cfg.max_rounds == 0 || !(cfg.growth > 1.0) || !(cfg.lambda0 > 0.0) {
        return Err(Error::InvalidConfig(
            "penalty: need max_rounds >= 1, growth > 1, lambda0 > 0".into(),
        ));
    }
    let base_seed = solver_seed(&cfg.inner.solver);
    let mut trace = Vec::new();
    let mut min_violation = f64::INFINITY;
    let mut best_feasible: Option<(Assignment, f64)> = None;
    let mut warm: Option<Assignment> = None;
    let mut lambda = cfg.lambda0;

    for round in 0..cfg.max_rounds {
        let surface = PenaltyObjective::new(
            p.objective.clone(),
            p.inequalities[0].clone(),
            lambda,
        )?;
        let mut inner = cfg.inner.clone();
        set_solver_seed(&mut inner.solver, derive(base_seed, &[round as u64]));
        if let Some(prev) = &warm {
            inner.initial_point = InitialPoint::Fixed(prev.clone());
        }
        let outcome = minimize_hobo(&surface, &inner)?;
        let x = outcome.assignment;

        // same candidate screening as the multiplier loop: any visited point
        // that truly satisfies the constraint is worth keeping
        for candidate in &outcome.visited {
            min_violation = min_violation.min(p.violation(candidate));
            if !p.is_feasible(candidate, cfg.feasibility_tol) {
                continue;
            }
            let value = p.objective.value(candidate);
            if best_feasible.as_ref().is_none_or(|(_, b)| value < *b) {
                best_feasible = Some((candidate.clone(), value));
            }
        }
        let objective = p.objective.value(&x);
        let g = p.inequalities[0].value(&x);
        let feasible = p.is_feasible(&x, cfg.feasibility_tol);
        trace.push(AlmIteration {
            iteration: round,
            lambdas: vec![lambda],
            mu: 0.0,
            vs: vec![],
            constraint_values: vec![g],
            objective,
            feasible,
            best_so_far: best_feasible.as_ref().map(|(_, b)| *b),
        });
        if best_feasible.is_some() {
            break;
        }
        warm = Some(x);
        lambda *= cfg.growth;
    }

    if best_feasible.is_some() {
        min_violation = 0.0;
    }
    Ok(AlmOutcome {
        best_feasible,
        min_violation,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_spin_points(n: usize) -> Vec<Assignment> {
        (0..1usize << n)
            .map(|mask| {
                Assignment::spins(
                    (0..n)
                        .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                        .collect(),
                )
                .unwrap()
            })
            .collect()
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let mut m = Array2::zeros((n, n));
        for _ in 0..2 {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for i in 0..n {
                for j in 0..n {
                    m[[i, j]] += w[i] * w[j];
                }
            }
        }
        m
    }

    fn swipt_shape(
        n: usize,
        threshold_frac: f64,
        rng: &mut ChaCha8Rng,
    ) -> (ConstrainedProblem, Array2<f64>, Array2<f64>, f64) {
        let r = random_psd(n, rng);
        let j = random_psd(n, rng);
        let forms: Vec<f64> = all_spin_points(n)
            .iter()
            .map(|p| spin_form(&j, p.values()))
            .collect();
        let max = forms.iter().cloned().fold(f64::MIN, f64::max);
        let c = threshold_frac * max;
        let problem = ConstrainedProblem::new(
            ObjectiveExpr::ScaledQuadraticForm { c1: -1.0, a: r.clone(), c0: 0.0 },
            vec![ConstraintExpr::ThresholdMinusForm { threshold: c, j: j.clone() }],
            vec![],
        )
        .unwrap();
        (problem, r, j, c)
    }

    fn exhaustive_alm_cfg(seed: u64) -> AlmConfig {
        AlmConfig {
            inner: HoboConfig {
                solver: SurrogateSolver::Exhaustive,
                initial_point: InitialPoint::Random { seed },
                always_repair: true,
                ..HoboConfig::default()
            },
            ..AlmConfig::default()
        }
    }

    #[test]
    fn unconstrained_problem_reduces_to_the_objective() {
        let poly = BinaryPolynomial::from_terms(
            3,
            VariableDomain::Ising,
            vec![(vec![0, 1], 1.0), (vec![2], -0.5)],
        )
        .unwrap();
        let p = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial(poly.clone()),
            vec![],
            vec![],
        )
        .unwrap();
        let state = AlmState {
            lambdas: vec![],
            mu: 5.5,
            vs: vec![],
            best_feasible: None,
            iteration: 0,
        };
        let f = build_augmented_lagrangian(&p, &state).unwrap();
        for point in all_spin_points(3) {
            assert_eq!(f.value(&point), poly.value_at(point.values()));
        }
    }

    #[test]
    fn zero_multiplier_zero_slack_is_a_pure_quadratic_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4;
        let f_poly = BinaryPolynomial::from_terms(
            n,
            VariableDomain::Ising,
            vec![(vec![0, 1], 1.0), (vec![2, 3], -1.0)],
        )
        .unwrap();
        let g_poly = BinaryPolynomial::from_terms(
            n,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![1, 2], 0.5), (vec![], -0.25)],
        )
        .unwrap();
        let _ = &mut rng;
        let p = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial(f_poly.clone()),
            vec![ConstraintExpr::Polynomial(g_poly.clone())],
            vec![],
        )
        .unwrap();
        let mu = 0.125;
        let state = AlmState {
            lambdas: vec![0.0],
            mu,
            vs: vec![0.0],
            best_feasible: None,
            iteration: 0,
        };
        let built = build_augmented_lagrangian(&p, &state).unwrap();
        for point in all_spin_points(n) {
            let g = g_poly.value_at(point.values());
            let expected = f_poly.value_at(point.values()) + 0.5 * mu * g * g;
            let got = built.value(&point);
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn factored_and_materialized_routes_agree_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        let (problem, r, j, c) = swipt_shape(n, 0.6, &mut rng);
        let state = AlmState {
            lambdas: vec![3.0],
            mu: 5.5,
            vs: vec![1.0],
            best_feasible: None,
            iteration: 0,
        };
        let fast = build_augmented_lagrangian(&problem, &state).unwrap();
        assert!(matches!(fast, AugmentedObjective::Composite(_)));

        // same problem with everything materialized up front
        let slow_problem = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial({
                let mut p =
                    BinaryPolynomial::from_quadratic_form(&r, VariableDomain::Ising).scaled(-1.0);
                p.add_constant(0.0);
                p
            }),
            vec![ConstraintExpr::Polynomial({
                let mut p =
                    BinaryPolynomial::from_quadratic_form(&j, VariableDomain::Ising).scaled(-1.0);
                p.add_constant(c);
                p
            })],
            vec![],
        )
        .unwrap();
        let slow = build_augmented_lagrangian(&slow_problem, &state).unwrap();
        assert!(matches!(slow, AugmentedObjective::Polynomial(_)));

        for point in all_spin_points(n) {
            let a = fast.value(&point);
            let b = slow.value(&point);
            assert!(
                (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                "composite {a} vs materialized {b}"
            );
        }
        // the materialized composite must agree with itself too
        let fast_poly = fast.materialize();
        for point in all_spin_points(n) {
            let a = fast.value(&point);
            let b = fast_poly.value_at(point.values());
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn slack_and_multiplier_updates_satisfy_their_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g: f64 = rng.random_range(-5.0..5.0);
            let lambda: f64 = rng.random_range(0.0..4.0);
            let mu: f64 = rng.random_range(0.5..8.0);
            let v = (-(g + lambda / mu)).max(0.0);
            let lambda_next = (lambda + mu * g).max(0.0);
            assert!(
                (lambda + mu * (g + v) - lambda_next).abs() <= 1e-12,
                "multiplier identity"
            );
            // chosen v minimizes lam (g+v) + mu/2 (g+v)^2 over v >= 0
            let fv = |v: f64| lambda * (g + v) + 0.5 * mu * (g + v) * (g + v);
            let chosen = fv(v);
            for i in 0..=400 {
                let grid_v = i as f64 * 0.025;
                assert!(
                    chosen <= fv(grid_v) + 1e-9,
                    "v={v} beaten by grid v={grid_v}"
                );
            }
        }
    }

    #[test]
    fn inactive_constraint_collapses_the_multiplier() {
        // g = s0 - 5 < 0 everywhere, so lambda must hit zero at the first
        // update and stay there. The frozen slack keeps a residual pull
        // toward the previous boundary distance, so the iterate is only
        // guaranteed feasible, not unconstrained-optimal.
        let f = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![1], 2.0)],
        )
        .unwrap();
        let g = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![], -5.0)],
        )
        .unwrap();
        let p = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial(f),
            vec![ConstraintExpr::Polynomial(g)],
            vec![],
        )
        .unwrap();
        let outcome = solve_alm(&p, &exhaustive_alm_cfg(1)).unwrap();
        let (best, _) = outcome.best_feasible.unwrap();
        assert!(p.is_feasible(&best, 1e-6));
        for row in &outcome.trace[1..] {
            assert_eq!(row.lambdas[0], 0.0);
        }
    }

    #[test]
    fn alm_matches_the_constrained_oracle_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..6 {
            let (problem, r, j, c) = swipt_shape(4, 0.9, &mut rng);
            let oracle = exhaustive::maximize_form_constrained(&r, &j, c, 0.0)
                .expect("threshold at 60% of max is feasible");
            let outcome = solve_alm(&problem, &exhaustive_alm_cfg(trial)).unwrap();
            let (best, value) = outcome.best_feasible.expect("oracle-feasible instance");
            // frozen-slack iterations track binding constraints tightly but
            // give no exactness guarantee, hence a small relative margin
            assert!(
                -value >= 0.95 * oracle.objective,
                "trial {trial}: alm {} vs oracle {}",
                -value,
                oracle.objective
            );
            assert!(-value <= oracle.objective * (1.0 + 1e-9));
            assert!(problem.is_feasible(&best, 1e-6));
        }
    }

    #[test]
    fn mu_grows_and_best_feasible_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (problem, _, _, _) = swipt_shape(4, 0.9, &mut rng);
        let outcome = solve_alm(&problem, &exhaustive_alm_cfg(2)).unwrap();
        let mut prev_mu = 0.0;
        let mut prev_best = f64::INFINITY;
        for row in &outcome.trace {
            assert!(row.mu > prev_mu, "mu must grow strictly");
            prev_mu = row.mu;
            assert!(row.lambdas[0] >= 0.0);
            for &v in &row.vs {
                assert!(v >= 0.0);
            }
            if let Some(best) = row.best_so_far {
                assert!(best <= prev_best + 1e-12);
                prev_best = best;
            }
        }
    }

    #[test]
    fn infeasible_problems_are_reported_as_such() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let n = 3;
        let r = random_psd(n, &mut rng);
        let j = random_psd(n, &mut rng);
        let max = all_spin_points(n)
            .iter()
            .map(|p| spin_form(&j, p.values()))
            .fold(f64::MIN, f64::max);
        let p = ConstrainedProblem::new(
            ObjectiveExpr::ScaledQuadraticForm { c1: -1.0, a: r, c0: 0.0 },
            vec![ConstraintExpr::ThresholdMinusForm { threshold: max + 1.0, j }],
            vec![],
        )
        .unwrap();
        let outcome = solve_alm(&p, &exhaustive_alm_cfg(0)).unwrap();
        assert!(outcome.best_feasible.is_none());
        assert!(outcome.min_violation > 0.0);
        assert_eq!(outcome.trace.len(), 50, "runs to max_iters when infeasible");
    }

    #[test]
    fn equality_constraints_are_supported() {
        // f = s0 + 2 s1 subject to s0 = s1: candidates (1,1) -> 3, (-1,-1) -> -3
        let f = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![1], 2.0)],
        )
        .unwrap();
        let h = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![1], -1.0)],
        )
        .unwrap();
        let p = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial(f),
            vec![],
            vec![ConstraintExpr::Polynomial(h)],
        )
        .unwrap();
        let outcome = solve_alm(&p, &exhaustive_alm_cfg(4)).unwrap();
        let (best, value) = outcome.best_feasible.unwrap();
        assert_eq!(best.values(), &[-1, -1]);
        assert_eq!(value, -3.0);
    }

    #[test]
    fn quadratize_route_solves_the_same_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (problem, r, j, c) = swipt_shape(4, 0.9, &mut rng);
        let oracle = exhaustive::maximize_form_constrained(&r, &j, c, 0.0).unwrap();
        let cfg = AlmConfig {
            inner_route: InnerRoute::Quadratize,
            inner: HoboConfig {
                solver: SurrogateSolver::Sa(sa::SaConfig {
                    restarts: 6,
                    ..sa::SaConfig::default()
                }),
                ..HoboConfig::default()
            },
            ..AlmConfig::default()
        };
        let outcome = solve_alm(&problem, &cfg).unwrap();
        let (_, value) = outcome.best_feasible.expect("feasible instance");
        assert!(
            (-value - oracle.objective).abs() <= 0.05 * oracle.objective.abs().max(1.0),
            "quadratize route {} vs oracle {}",
            -value,
            oracle.objective
        );
    }

    #[test]
    fn penalty_baseline_handles_the_three_contract_cases() {
        // inactive constraint: unconstrained optimum in round one
        let f = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![1], 2.0)],
        )
        .unwrap();
        let g_inactive = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0], 1.0), (vec![], -5.0)],
        )
        .unwrap();
        let p = ConstrainedProblem::new(
            ObjectiveExpr::Polynomial(f),
            vec![ConstraintExpr::Polynomial(g_inactive)],
            vec![],
        )
        .unwrap();
        let cfg = PenaltyConfig {
            inner: HoboConfig {
                solver: SurrogateSolver::Exhaustive,
                ..HoboConfig::default()
            },
            ..PenaltyConfig::default()
        };
        let outcome = solve_penalty(&p, &cfg).unwrap();
        assert_eq!(outcome.trace.len(), 1);
        assert_eq!(outcome.best_feasible.as_ref().unwrap().1, -3.0);

        // crafted instances: within 10% of the constrained oracle
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for trial in 0..5 {
            let (problem, r, j, c) = swipt_shape(4, 0.6, &mut rng);
            let oracle = exhaustive::maximize_form_constrained(&r, &j, c, 0.0).unwrap();
            let cfg = PenaltyConfig {
                inner: HoboConfig {
                    solver: SurrogateSolver::Exhaustive,
                    initial_point: InitialPoint::Random { seed: trial },
                    ..HoboConfig::default()
                },
                ..PenaltyConfig::default()
            };
            let outcome = solve_penalty(&problem, &cfg).unwrap();
            let (best, value) = outcome.best_feasible.expect("feasible instance");
            assert!(problem.is_feasible(&best, 1e-6));
            assert!(
                -value >= 0.9 * oracle.objective,
                "trial {trial}: penalty {} vs oracle {}",
                -value,
                oracle.objective
            );
        }

        // unreachable threshold: explicit infeasible report
        let j_small = random_psd(3, &mut rng);
        let r_small = random_psd(3, &mut rng);
        let max = all_spin_points(3)
            .iter()
            .map(|p| spin_form(&j_small, p.values()))
            .fold(f64::MIN, f64::max);
        let p_inf = ConstrainedProblem::new(
            ObjectiveExpr::ScaledQuadraticForm { c1: -1.0, a: r_small, c0: 0.0 },
            vec![ConstraintExpr::ThresholdMinusForm { threshold: max + 1.0, j: j_small }],
            vec![],
        )
        .unwrap();
        let outcome = solve_penalty(&p_inf, &cfg).unwrap();
        assert!(outcome.best_feasible.is_none());
        assert!(outcome.min_violation > 0.0);
        assert_eq!(outcome.trace.len(), 5, "escalates through every round");
    }

    #[test]
    fn penalty_gradient_matches_finite_differences_on_the_active_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 4;
        let r = random_psd(n, &mut rng);
        let j = random_psd(n, &mut rng);
        // huge threshold: the constraint is active everywhere
        let pen = PenaltyObjective::new(
            ObjectiveExpr::ScaledQuadraticForm { c1: -1.0, a: r, c0: 0.0 },
            ConstraintExpr::ThresholdMinusForm { threshold: 1e3, j },
            2.5,
        )
        .unwrap();
        let x0 = Assignment::random(n, VariableDomain::Ising, &mut rng);
        let surrogate = pen.taylor_quadratic(&x0);
        assert!(
            (surrogate.evaluate(&x0).unwrap() - pen.value(&x0)).abs()
                <= 1e-9 * pen.value(&x0).abs().max(1.0),
            "surrogate anchors at the expansion point"
        );
        let (grad, hess) = pen.gradient_hessian(&x0);
        for i in 0..n {
            assert_eq!(hess[[i, i]], 0.0);
            for k in 0..n {
                assert!((hess[[i, k]] - hess[[k, i]]).abs() <= 1e-9);
            }
            let _ = grad[i];
        }
    }
}
