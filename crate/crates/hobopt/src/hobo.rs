//! Higher-order minimization by iterated second-order surrogates.
//!
//! Degree-3+ objectives are out of reach for the quadratic solvers, so each
//! round builds the Taylor surrogate at the incumbent, lets a quadratic
//! solver minimize it, optionally repairs the proposal with greedy bit
//! flips, and moves the incumbent there unconditionally. The incumbent may
//! wander uphill (that is what lets it escape); the returned point is the
//! best ever evaluated, so the reported trajectory is monotone.

use crate::error::{Error, Result};
use crate::model::{Assignment, BinaryPolynomial, SolverModel};
use crate::objective::BinaryObjective;
use crate::seeds::derive;
use crate::solvers::{dsb, exhaustive, greedy_bit_flip, sa};

#[derive(Debug, Clone)]
pub enum SurrogateSolver {
    Dsb(dsb::DsbConfig),
    Sa(sa::SaConfig),
    Exhaustive,
}

#[derive(Debug, Clone)]
pub enum InitialPoint {
    Random { seed: u64 },
    Fixed(Assignment),
}

#[derive(Debug, Clone)]
pub struct HoboConfig {
    pub max_iters: usize,
    /// Stop after this many consecutive iterations without a best-so-far
    /// improvement.
    pub stall_limit: usize,
    pub solver: SurrogateSolver,
    pub initial_point: InitialPoint,
    /// Run greedy repair on every proposal, not only on those worse than
    /// the incumbent.
    pub always_repair: bool,
}

impl Default for HoboConfig {
    fn default() -> Self {
        HoboConfig {
            max_iters: 30,
            stall_limit: 3,
            solver: SurrogateSolver::Dsb(dsb::DsbConfig::default()),
            initial_point: InitialPoint::Random { seed: 0 },
            always_repair: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HoboIteration {
    /// Optimum value of the quadratic surrogate, as reported by the solver.
    pub surrogate_value: f64,
    /// True objective at the (possibly repaired) proposal.
    pub true_value: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, Default)]
pub struct HoboTrace {
    pub iterations: Vec<HoboIteration>,
}

#[derive(Debug, Clone)]
pub struct HoboOutcome {
    pub assignment: Assignment,
    pub value: f64,
    pub trace: HoboTrace,
    /// Every point the loop evaluated, in visit order: the start, each raw
    /// surrogate solution, and each repaired proposal. Callers with side
    /// information (a constraint the surrogate only models softly, say) can
    /// screen these instead of settling for the single returned minimizer.
    pub visited: Vec<Assignment>,
}

/// Solve one quadratic surrogate with the configured inner solver. Heuristic
/// solvers run on the Ising side; Boolean surrogates are converted and the
/// winner mapped back. The final vec carries every restart readout the
/// solver produced, winner included, in the surrogate's domain.
fn solve_surrogate(
    surrogate: &BinaryPolynomial,
    solver: &SurrogateSolver,
    iter_seed: u64,
) -> Result<(Assignment, f64, Vec<Assignment>)> {
    match solver {
        SurrogateSolver::Exhaustive => {
            let (x, value) = exhaustive::minimize_polynomial(surrogate)?;
            Ok((x, value, Vec::new()))
        }
        SurrogateSolver::Dsb(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = iter_seed;
            match surrogate.to_solver_model()? {
                SolverModel::Ising(m) => {
                    let r = dsb::solve_dsb(&m, &cfg)?;
                    Ok((r.assignment, r.energy, r.finalists))
                }
                SolverModel::Qubo(q) => {
                    let r = dsb::solve_dsb(&q.to_ising(), &cfg)?;
                    let bits = r.assignment.to_bits();
                    let energy = q.energy(&bits)?;
                    let finalists = r.finalists.iter().map(|f| f.to_bits()).collect();
                    Ok((bits, energy, finalists))
                }
            }
        }
        SurrogateSolver::Sa(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = iter_seed;
            match surrogate.to_solver_model()? {
                SolverModel::Ising(m) => {
                    let r = sa::solve_sa(&m, &cfg)?;
                    Ok((r.assignment, r.energy, r.finalists))
                }
                SolverModel::Qubo(q) => {
                    let r = sa::solve_sa(&q.to_ising(), &cfg)?;
                    let bits = r.assignment.to_bits();
                    let energy = q.energy(&bits)?;
                    let finalists = r.finalists.iter().map(|f| f.to_bits()).collect();
                    Ok((bits, energy, finalists))
                }
            }
        }
    }
}

fn solver_base_seed(solver: &SurrogateSolver) -> u64 {
    match solver {
        SurrogateSolver::Dsb(cfg) => cfg.seed,
        SurrogateSolver::Sa(cfg) => cfg.seed,
        SurrogateSolver::Exhaustive => 0,
    }
}

pub fn minimize_hobo<O: BinaryObjective + ?Sized>(
    f: &O,
    cfg: &HoboConfig,
) -> Result<HoboOutcome> {
    if cfg.max_iters == 0 {
        return Err(Error::InvalidConfig("hobo: max_iters must be >= 1".into()));
    }
    if cfg.stall_limit == 0 {
        return Err(Error::InvalidConfig("hobo: stall_limit must be >= 1".into()));
    }

    let n = f.num_vars();
    let mut x0 = match &cfg.initial_point {
        InitialPoint::Random { seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            Assignment::random(n, f.domain(), &mut rng)
        }
        InitialPoint::Fixed(point) => {
            if point.domain() != f.domain() {
                return Err(Error::DomainMismatch {
                    expected: f.domain(),
                    actual: point.domain(),
                });
            }
            if point.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "hobo initial point",
                    expected: n,
                    actual: point.len(),
                });
            }
            point.clone()
        }
    };

    let mut fx0 = f.value(&x0);
    let mut best = x0.clone();
    let mut best_value = fx0;
    let mut trace = HoboTrace::default();
    let mut visited = vec![x0.clone()];

    if n == 0 {
        return Ok(HoboOutcome {
            assignment: best,
            value: best_value,
            trace,
            visited,
        });
    }

    let base_seed = solver_base_seed(&cfg.solver);
    let mut stall = 0usize;
    for iter in 0..cfg.max_iters {
        let surrogate = f.taylor_quadratic(&x0);
        let (mut proposal, surrogate_value, readouts) =
            solve_surrogate(&surrogate, &cfg.solver, derive(base_seed, &[iter as u64]))?;
        visited.extend(readouts);

        let mut f_proposal = f.value(&proposal);
        if f_proposal > fx0 || cfg.always_repair {
            proposal = greedy_bit_flip(f, &proposal);
            f_proposal = f.value(&proposal);
        }
        visited.push(proposal.clone());

        let improved = f_proposal < best_value;
        if improved {
            best = proposal.clone();
            best_value = f_proposal;
        }
        trace.iterations.push(HoboIteration {
            surrogate_value,
            true_value: f_proposal,
            best_so_far: best_value,
        });

        let fixed_point = proposal.values() == x0.values();
        x0 = proposal;
        fx0 = f_proposal;
        if fixed_point {
            break;
        }
        stall = if improved { 0 } else { stall + 1 };
        if stall >= cfg.stall_limit {
            break;
        }
    }

    Ok(HoboOutcome {
        assignment: best,
        value: best_value,
        trace,
        visited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_quartic(n: usize, rng: &mut ChaCha8Rng) -> BinaryPolynomial {
        let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
        for _ in 0..3 * n {
            let deg = rng.random_range(1..=4);
            let mut key: Vec<u32> = (0..deg).map(|_| rng.random_range(0..n as u32)).collect();
            key.sort_unstable();
            key.dedup();
            terms.push((key, rng.random_range(-1.0..1.0)));
        }
        BinaryPolynomial::from_terms(n, VariableDomain::Ising, terms).unwrap()
    }

    fn exhaustive_cfg(seed: u64) -> HoboConfig {
        HoboConfig {
            solver: SurrogateSolver::Exhaustive,
            initial_point: InitialPoint::Random { seed },
            ..HoboConfig::default()
        }
    }

    #[test]
    fn quadratic_objective_converges_in_one_solve() {
        // surrogate of a quadratic is the quadratic itself
        let poly = BinaryPolynomial::from_terms(
            3,
            VariableDomain::Ising,
            vec![(vec![0, 1], 1.0), (vec![1, 2], -2.0), (vec![0], 0.5)],
        )
        .unwrap();
        let outcome = minimize_hobo(&poly, &exhaustive_cfg(1)).unwrap();
        let (_, exact) = exhaustive::minimize_polynomial(&poly).unwrap();
        assert_eq!(outcome.value, exact);
        assert!(outcome.trace.iterations.len() <= 2, "solve + fixed-point stop");
    }

    #[test]
    fn starting_at_the_optimum_terminates_immediately() {
        let poly = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0, 1], -1.0), (vec![0], 0.25)],
        )
        .unwrap();
        let (argmin, exact) = exhaustive::minimize_polynomial(&poly).unwrap();
        let cfg = HoboConfig {
            solver: SurrogateSolver::Exhaustive,
            initial_point: InitialPoint::Fixed(argmin.clone()),
            ..HoboConfig::default()
        };
        let outcome = minimize_hobo(&poly, &cfg).unwrap();
        assert_eq!(outcome.value, exact);
        assert_eq!(outcome.assignment.values(), argmin.values());
        assert_eq!(outcome.trace.iterations.len(), 1);
    }

    #[test]
    fn best_so_far_is_monotone_and_never_worse_than_the_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..10 {
            let poly = random_quartic(8, &mut rng);
            let start = Assignment::random(8, VariableDomain::Ising, &mut rng);
            let f_start = poly.value_at(start.values());
            let cfg = HoboConfig {
                solver: SurrogateSolver::Exhaustive,
                initial_point: InitialPoint::Fixed(start),
                ..HoboConfig::default()
            };
            let outcome = minimize_hobo(&poly, &cfg).unwrap();
            assert!(outcome.value <= f_start, "trial {trial}");
            let mut prev = f64::INFINITY;
            for row in &outcome.trace.iterations {
                assert!(row.best_so_far <= prev, "best-so-far must not increase");
                assert!(row.best_so_far <= row.true_value + 1e-12);
                prev = row.best_so_far;
            }
        }
    }

    #[test]
    fn random_quartics_land_near_the_exhaustive_optimum() {
        // A stochastic inner solver keeps the proposals moving; an exact one
        // reaches a surrogate fixed point after a couple of rounds.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut gaps = Vec::new();
        for trial in 0..20 {
            let poly = random_quartic(10, &mut rng);
            let (_, exact) = exhaustive::minimize_polynomial(&poly).unwrap();
            let cfg = HoboConfig {
                solver: SurrogateSolver::Dsb(dsb::DsbConfig {
                    steps: 300,
                    restarts: 2,
                    seed: trial,
                    ..dsb::DsbConfig::default()
                }),
                initial_point: InitialPoint::Random { seed: 100 + trial },
                always_repair: true,
                ..HoboConfig::default()
            };
            let outcome = minimize_hobo(&poly, &cfg).unwrap();
            assert!(outcome.value >= exact - 1e-9 * exact.abs().max(1.0));
            gaps.push((outcome.value - exact) / exact.abs().max(1e-12));
        }
        gaps.sort_by(f64::total_cmp);
        let median = gaps[gaps.len() / 2];
        assert!(median <= 0.05, "median relative gap {median} too large");
    }

    #[test]
    fn dsb_and_sa_inner_solvers_work_on_both_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for domain in [VariableDomain::Ising, VariableDomain::Boolean] {
            let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
            for _ in 0..12 {
                let deg = rng.random_range(1..=3);
                let mut key: Vec<u32> = (0..deg).map(|_| rng.random_range(0..6)).collect();
                key.sort_unstable();
                key.dedup();
                terms.push((key, rng.random_range(-1.0..1.0)));
            }
            let poly = BinaryPolynomial::from_terms(6, domain, terms).unwrap();
            let (_, exact) = exhaustive::minimize_polynomial(&poly).unwrap();
            for solver in [
                SurrogateSolver::Dsb(dsb::DsbConfig::default()),
                SurrogateSolver::Sa(sa::SaConfig::default()),
            ] {
                let cfg = HoboConfig {
                    solver,
                    initial_point: InitialPoint::Random { seed: 3 },
                    ..HoboConfig::default()
                };
                let outcome = minimize_hobo(&poly, &cfg).unwrap();
                assert!(
                    outcome.value >= exact - 1e-9 * exact.abs().max(1.0),
                    "heuristics cannot beat exhaustive"
                );
                let gap = (outcome.value - exact) / exact.abs().max(1e-12);
                assert!(gap <= 0.10, "{domain:?}: gap {gap}");
            }
        }
    }

    #[test]
    fn always_repair_returns_a_one_flip_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let poly = random_quartic(7, &mut rng);
        let cfg = HoboConfig {
            solver: SurrogateSolver::Exhaustive,
            initial_point: InitialPoint::Random { seed: 8 },
            always_repair: true,
            ..HoboConfig::default()
        };
        let outcome = minimize_hobo(&poly, &cfg).unwrap();
        for i in 0..7 {
            let neighbor = outcome.assignment.flipped(i);
            assert!(poly.value_at(neighbor.values()) >= outcome.value);
        }
    }

    #[test]
    fn config_and_point_validation() {
        let poly = BinaryPolynomial::from_terms(
            2,
            VariableDomain::Ising,
            vec![(vec![0, 1], 1.0)],
        )
        .unwrap();
        let bad_domain = HoboConfig {
            solver: SurrogateSolver::Exhaustive,
            initial_point: InitialPoint::Fixed(Assignment::bits(vec![0, 1]).unwrap()),
            ..HoboConfig::default()
        };
        assert!(matches!(
            minimize_hobo(&poly, &bad_domain),
            Err(Error::DomainMismatch { .. })
        ));
        let bad_len = HoboConfig {
            solver: SurrogateSolver::Exhaustive,
            initial_point: InitialPoint::Fixed(Assignment::spins(vec![1]).unwrap()),
            ..HoboConfig::default()
        };
        assert!(matches!(
            minimize_hobo(&poly, &bad_len),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad_iters = HoboConfig { max_iters: 0, ..exhaustive_cfg(0) };
        assert!(matches!(
            minimize_hobo(&poly, &bad_iters),
            Err(Error::InvalidConfig(_))
        ));
    }
}
