//! Single-spin-flip Metropolis annealing over Ising models.
//!
//! Temperatures follow a geometric ramp from hot to cold across the sweeps.
//! Both ends default to scales read off the model: the hottest temperature
//! makes the worst possible flip acceptable with probability ~1/e, the
//! coldest is two orders of magnitude below it.

use std::time::Instant;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Assignment, IsingModel, VariableDomain};
use crate::seeds::derive;
use crate::solvers::SolveResult;

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub sweeps: usize,
    /// Hottest temperature; `None` derives 2·max_i(Σ_j |J^sym|_ij + |a_i|).
    pub t_hot: Option<f64>,
    /// Coldest temperature; `None` derives t_hot / 100.
    pub t_cold: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            sweeps: 200,
            t_hot: None,
            t_cold: None,
            restarts: 4,
            seed: 0,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidConfig("sa: sweeps must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("sa: restarts must be >= 1".into()));
        }
        for (name, t) in [("t_hot", self.t_hot), ("t_cold", self.t_cold)] {
            if let Some(t) = t {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "sa: {name} must be a positive number"
                    )));
                }
            }
        }
        if let (Some(hot), Some(cold)) = (self.t_hot, self.t_cold) {
            if cold > hot {
                return Err(Error::InvalidConfig("sa: t_cold must not exceed t_hot".into()));
            }
        }
        Ok(())
    }
}

/// Largest single-flip energy change the model can produce.
fn flip_scale(model: &IsingModel) -> f64 {
    let jsym = model.symmetrized_couplings();
    let n = model.num_vars();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut row = model.linear()[i].abs();
        for j in 0..n {
            row += jsym[[i, j]].abs();
        }
        worst = worst.max(row);
    }
    2.0 * worst
}

pub fn solve_sa(model: &IsingModel, cfg: &SaConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = model.num_vars();

    let scale = flip_scale(model);
    let t_hot = cfg.t_hot.unwrap_or(if scale > 0.0 { scale } else { 1.0 });
    let t_cold = cfg.t_cold.unwrap_or(t_hot / 100.0).min(t_hot);
    let jsym = model.symmetrized_couplings();

    let mut best: Option<(Vec<i8>, f64, usize)> = None;
    let mut finalists = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(cfg.seed, &[restart as u64]));
        let point = Assignment::random(n, VariableDomain::Ising, &mut rng);
        let mut spins = point.values().to_vec();

        // h_i = (J^sym s)_i + a_i, so flipping spin i changes E by -2 s_i h_i
        let spins_f = Array1::from_vec(point.values_f64());
        let mut h = jsym.dot(&spins_f) + model.linear();
        let mut energy = model.energy_of(&spins);
        if best.as_ref().is_none_or(|(_, b, _)| energy < *b) {
            best = Some((spins.clone(), energy, restart));
        }

        for sweep in 0..cfg.sweeps {
            let temp = if cfg.sweeps == 1 {
                t_cold
            } else {
                t_hot * (t_cold / t_hot).powf(sweep as f64 / (cfg.sweeps - 1) as f64)
            };
            for i in 0..n {
                let delta = -2.0 * spins[i] as f64 * h[i];
                let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp();
                if !accept {
                    continue;
                }
                let old = spins[i] as f64;
                spins[i] = -spins[i];
                energy += delta;
                for j in 0..n {
                    h[j] -= 2.0 * old * jsym[[j, i]];
                }
                if best.as_ref().is_none_or(|(_, b, _)| energy < *b) {
                    best = Some((spins.clone(), energy, restart));
                }
            }
            // re-anchor the drifting incremental energy once per sweep
            energy = model.energy_of(&spins);
        }
        finalists.push(Assignment::spins(spins).expect("sa keeps spins in domain"));
    }

    let (spins, _, restart_index) = best.expect("restarts >= 1 seeds a candidate");
    let assignment = Assignment::spins(spins).expect("sa keeps spins in domain");
    let energy = model.energy_of(assignment.values());
    Ok(SolveResult {
        assignment,
        energy,
        restart_index,
        finalists,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BinaryPolynomial;
    use crate::solvers::exhaustive;
    use ndarray::Array2;
    use rand_distr::{Distribution, StandardNormal};

    fn ising(n: usize, couplings: &[(usize, usize, f64)], linear: &[f64], c: f64) -> IsingModel {
        let mut j = Array2::zeros((n, n));
        for &(i, k, v) in couplings {
            j[[i, k]] = v;
        }
        IsingModel::new(j, Array1::from_vec(linear.to_vec()), c).unwrap()
    }

    #[test]
    fn two_spin_ferromagnet_aligns() {
        let model = ising(2, &[(1, 0, -1.0)], &[0.0, 0.0], 0.0);
        let result = solve_sa(&model, &SaConfig::default()).unwrap();
        assert_eq!(result.energy, -1.0);
        assert_eq!(result.assignment.values()[0], result.assignment.values()[1]);
    }

    #[test]
    fn zero_model_returns_the_constant() {
        let model = ising(3, &[], &[0.0; 3], -4.0);
        let result = solve_sa(&model, &SaConfig::default()).unwrap();
        assert_eq!(result.energy, -4.0);
    }

    #[test]
    fn empty_model_returns_an_empty_assignment() {
        let model = IsingModel::new(Array2::zeros((0, 0)), Array1::zeros(0), 1.5).unwrap();
        let result = solve_sa(&model, &SaConfig::default()).unwrap();
        assert!(result.assignment.is_empty());
        assert_eq!(result.energy, 1.5);
    }

    #[test]
    fn identical_seeds_reproduce_identical_results() {
        let model = ising(6, &[(1, 0, 0.4), (3, 2, -1.0), (5, 4, 0.9)], &[0.2; 6], 0.0);
        let cfg = SaConfig { seed: 9, ..SaConfig::default() };
        let a = solve_sa(&model, &cfg).unwrap();
        let b = solve_sa(&model, &cfg).unwrap();
        assert_eq!(a.assignment.values(), b.assignment.values());
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    }

    #[test]
    fn reported_energy_matches_reevaluation() {
        let model = ising(5, &[(2, 0, 1.1), (4, 1, -0.6)], &[0.3, 0.0, -0.2, 0.0, 0.5], 2.0);
        let result = solve_sa(&model, &SaConfig::default()).unwrap();
        assert_eq!(result.energy, model.energy(&result.assignment).unwrap());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let model = ising(2, &[(1, 0, 1.0)], &[0.0, 0.0], 0.0);
        for cfg in [
            SaConfig { sweeps: 0, ..SaConfig::default() },
            SaConfig { restarts: 0, ..SaConfig::default() },
            SaConfig { t_hot: Some(-1.0), ..SaConfig::default() },
            SaConfig { t_hot: Some(1.0), t_cold: Some(2.0), ..SaConfig::default() },
        ] {
            assert!(matches!(solve_sa(&model, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    fn random_dense_ising(n: usize, rng: &mut ChaCha8Rng) -> IsingModel {
        let mut j = Array2::zeros((n, n));
        for i in 1..n {
            for k in 0..i {
                j[[i, k]] = StandardNormal.sample(rng);
            }
        }
        IsingModel::new(j, Array1::zeros(n), 0.0).unwrap()
    }

    fn ising_to_poly(model: &IsingModel) -> BinaryPolynomial {
        let n = model.num_vars();
        let mut terms: Vec<(Vec<u32>, f64)> = vec![(vec![], model.constant())];
        for i in 0..n {
            if model.linear()[i] != 0.0 {
                terms.push((vec![i as u32], model.linear()[i]));
            }
            for k in 0..i {
                if model.couplings()[[i, k]] != 0.0 {
                    terms.push((vec![k as u32, i as u32], model.couplings()[[i, k]]));
                }
            }
        }
        BinaryPolynomial::from_terms(n, VariableDomain::Ising, terms).unwrap()
    }

    #[test]
    fn dense_gaussian_instances_reach_the_ground_state_mostly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut matched = 0;
        let total = 10;
        for trial in 0..total {
            let model = random_dense_ising(10, &mut rng);
            let (_, ground) = exhaustive::minimize_polynomial(&ising_to_poly(&model)).unwrap();
            let cfg = SaConfig {
                restarts: 10,
                seed: 500 + trial,
                ..SaConfig::default()
            };
            let result = solve_sa(&model, &cfg).unwrap();
            assert!(result.energy >= ground - 1e-9 * ground.abs().max(1.0));
            if (result.energy - ground).abs() <= 1e-9 * ground.abs().max(1.0) {
                matched += 1;
            }
        }
        assert!(matched >= 8, "only {matched}/{total} instances hit the ground state");
    }
}
