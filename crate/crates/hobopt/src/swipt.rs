//! Reflecting-surface SWIPT scenario generator.
//!
//! A transmitter illuminates an N-element reflecting surface; each element
//! applies a phase of 0 or pi (a spin). One receiver decodes information,
//! another harvests power through a nonlinear rectifier. Selecting the
//! element phases to maximize the information SNR subject to a harvested
//! power floor is the constrained quadratic-form problem this crate's
//! multiplier loop consumes.
//!
//! Unit convention: channel coefficients and transmit power are SI (meters,
//! watts). Received powers, the rectifier curve, and everything stored in a
//! generated instance are in microwatts; the microwatt scale keeps the
//! quadratic-form entries near unity, which the fixed multiplier defaults
//! assume. SNR computations convert back to watts against the noise floor.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constrained::{ConstrainedProblem, ConstraintExpr, ObjectiveExpr};
use crate::error::{Error, Result};
use crate::model::Assignment;
use crate::seeds::derive;

pub const SPEED_OF_LIGHT_M_S: f64 = 2.99792458e8;

/// Rectifier transfer curve: harvested = a1*p^2 + a2*p + a3, microwatts in
/// and out, valid on the rising side of the parabola.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Default for EhParams {
    fn default() -> Self {
        EhParams {
            a1: -1.2006e-4,
            a2: 0.6734,
            a3: -3.5988,
        }
    }
}

/// How the harvested-power floor delta is translated into a threshold on
/// received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Closed-form variant with the discriminant reduced to 4*a1*(a3-delta),
    /// dropping the a2^2 term. Kept for comparison; not self-consistent.
    ReducedDiscriminant,
    /// Exact lower root of a1*c^2 + a2*c + a3 = delta.
    QuadraticRoot,
}

impl std::str::FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reduced_discriminant" | "reduced-discriminant" | "reduced" => {
                Ok(ThresholdMode::ReducedDiscriminant)
            }
            "quadratic_root" | "quadratic-root" | "quadratic" => Ok(ThresholdMode::QuadraticRoot),
            other => Err(Error::InvalidConfig(format!(
                "unknown threshold mode '{other}' (expected reduced_discriminant or quadratic_root)"
            ))),
        }
    }
}

impl std::fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdMode::ReducedDiscriminant => write!(f, "reduced_discriminant"),
            ThresholdMode::QuadraticRoot => write!(f, "quadratic_root"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub n_elements: usize,
    pub carrier_hz: f64,
    pub tx_power_w: f64,
    pub noise_w: f64,
    /// Rician K factor (linear, not dB).
    pub rician_k: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub tx_distance_m: f64,
    pub tx_angle_rad: f64,
    /// Information receiver distance is drawn uniformly from this range.
    pub info_distance_m: (f64, f64),
    /// Harvesting receiver distance range.
    pub eh_distance_m: (f64, f64),
    pub eh_params: EhParams,
    /// Harvested power floor, microwatts.
    pub delta_uw: f64,
    pub threshold_mode: ThresholdMode,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_elements: 16,
            carrier_hz: 915e6,
            tx_power_w: 10.0,
            noise_w: 1e-9,
            rician_k: 10f64.sqrt(),
            tx_gain_dbi: 8.0,
            rx_gain_dbi: 0.0,
            tx_distance_m: 3.0,
            tx_angle_rad: std::f64::consts::FRAC_PI_4,
            info_distance_m: (5.0, 30.0),
            eh_distance_m: (1.0, 2.5),
            eh_params: EhParams::default(),
            delta_uw: 500.0,
            threshold_mode: ThresholdMode::QuadraticRoot,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.carrier_hz
    }

    fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidConfig("scenario: n_elements must be >= 1".into()));
        }
        if !(self.carrier_hz > 0.0 && self.tx_power_w > 0.0 && self.noise_w > 0.0) {
            return Err(Error::InvalidConfig(
                "scenario: carrier, power and noise must be positive".into(),
            ));
        }
        if !(self.rician_k >= 0.0) {
            return Err(Error::InvalidConfig("scenario: rician_k must be >= 0".into()));
        }
        for (lo, hi) in [self.info_distance_m, self.eh_distance_m] {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidConfig(
                    "scenario: distance ranges must satisfy 0 < lo < hi".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Line-of-sight path amplitude sqrt(Gt*Gr) * lambda / (4 pi d).
pub fn path_amplitude(tx_gain_dbi: f64, rx_gain_dbi: f64, wavelength_m: f64, distance_m: f64) -> f64 {
    let gain = 10f64.powf((tx_gain_dbi + rx_gain_dbi) / 20.0);
    gain * wavelength_m / (4.0 * std::f64::consts::PI * distance_m)
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub channel_id: u64,
    /// Transmitter -> surface.
    pub h: Vec<Complex64>,
    /// Surface -> information receiver.
    pub g: Vec<Complex64>,
    /// Surface -> harvesting receiver.
    pub f: Vec<Complex64>,
    pub info_distance_m: f64,
    pub info_angle_rad: f64,
    pub eh_distance_m: f64,
    pub eh_angle_rad: f64,
}

fn rician_link(
    amp: f64,
    k: f64,
    angle_rad: f64,
    nlos: &[Complex64],
) -> Vec<Complex64> {
    let w_los = (k / (1.0 + k)).sqrt();
    let w_nlos = (1.0 / (1.0 + k)).sqrt();
    let phase = -std::f64::consts::PI * angle_rad.sin();
    nlos.iter()
        .enumerate()
        .map(|(n, &scatter)| {
            let los = Complex64::from_polar(1.0, phase * n as f64);
            (los * w_los + scatter * w_nlos) * amp
        })
        .collect()
}

/// One draw per channel id; same (seed, id) always reproduces the same
/// realization. Draw order is fixed: information receiver distance, then
/// its angle, then harvester distance and angle, then the scatter
/// components of h, g, f in that order (real before imaginary, element by
/// element).
pub fn sample_channel(cfg: &ScenarioConfig, channel_id: u64) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive(cfg.seed, &[channel_id]));
    let info_distance_m = rng.random_range(cfg.info_distance_m.0..cfg.info_distance_m.1);
    let info_angle_rad =
        rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
    let eh_distance_m = rng.random_range(cfg.eh_distance_m.0..cfg.eh_distance_m.1);
    let eh_angle_rad =
        rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);

    let mut scatter = |n: usize| -> Vec<Complex64> {
        (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect()
    };
    let nlos_h = scatter(cfg.n_elements);
    let nlos_g = scatter(cfg.n_elements);
    let nlos_f = scatter(cfg.n_elements);

    let lambda = cfg.wavelength_m();
    let amp = |d: f64| path_amplitude(cfg.tx_gain_dbi, cfg.rx_gain_dbi, lambda, d);
    Ok(ChannelRealization {
        channel_id,
        h: rician_link(amp(cfg.tx_distance_m), cfg.rician_k, cfg.tx_angle_rad, &nlos_h),
        g: rician_link(amp(info_distance_m), cfg.rician_k, info_angle_rad, &nlos_g),
        f: rician_link(amp(eh_distance_m), cfg.rician_k, eh_angle_rad, &nlos_f),
        info_distance_m,
        info_angle_rad,
        eh_distance_m,
        eh_angle_rad,
    })
}

pub fn sample_channels(cfg: &ScenarioConfig, count: usize) -> Result<Vec<ChannelRealization>> {
    (0..count as u64).map(|id| sample_channel(cfg, id)).collect()
}

pub fn harvested_uw(params: &EhParams, received_uw: f64) -> f64 {
    params.a1 * received_uw * received_uw + params.a2 * received_uw + params.a3
}

/// Apex of the rectifier parabola: (input power, harvested power), both in
/// microwatts. Targets above the harvested value are unattainable.
pub fn eh_peak(params: &EhParams) -> (f64, f64) {
    let p_star = -params.a2 / (2.0 * params.a1);
    (p_star, harvested_uw(params, p_star))
}

/// Received-power threshold c with harvested(c) = delta, lower root.
pub fn eh_threshold(params: &EhParams, delta_uw: f64, mode: ThresholdMode) -> Result<f64> {
    let (_, max_uw) = eh_peak(params);
    if delta_uw > max_uw {
        return Err(Error::UnattainableHarvestTarget { delta_uw, max_uw });
    }
    let root = match mode {
        ThresholdMode::QuadraticRoot => {
            let disc = params.a2 * params.a2 - 4.0 * params.a1 * (params.a3 - delta_uw);
            (-params.a2 + disc.sqrt()) / (2.0 * params.a1)
        }
        ThresholdMode::ReducedDiscriminant => {
            let disc = 4.0 * params.a1 * (params.a3 - delta_uw);
            (-params.a2 + disc.sqrt()) / (2.0 * params.a1)
        }
    };
    if !root.is_finite() || root < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "threshold for delta={delta_uw} uW is not usable (got {root})"
        )));
    }
    Ok(root)
}

/// Upper root of harvested(p) = delta: beyond this input the parabola dips
/// back under the target, so reported-feasible operating points must stay
/// below it.
pub fn eh_upper_root(params: &EhParams, delta_uw: f64) -> Result<f64> {
    let (_, max_uw) = eh_peak(params);
    if delta_uw > max_uw {
        return Err(Error::UnattainableHarvestTarget { delta_uw, max_uw });
    }
    let disc = params.a2 * params.a2 - 4.0 * params.a1 * (params.a3 - delta_uw);
    Ok((-params.a2 - disc.sqrt()) / (2.0 * params.a1))
}

/// A concrete constrained instance: maximize x^T R x subject to
/// x^T J x >= c_uw, spins x. Both forms are stored dense row-major in
/// microwatts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwiptInstance {
    pub n: usize,
    pub r_uw: Vec<f64>,
    pub j_uw: Vec<f64>,
    pub c_uw: f64,
    pub noise_w: f64,
    pub channel_id: u64,
    pub seed: u64,
    pub threshold_mode: ThresholdMode,
}

fn rank_one_form_uw(power_w: f64, weights: &[Complex64]) -> Vec<f64> {
    let n = weights.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            out[i * n + k] = power_w * (weights[i] * weights[k].conj()).re * 1e6;
        }
    }
    out
}

fn form_value(matrix_row_major: &[f64], n: usize, values: &[i8]) -> f64 {
    debug_assert_eq!(values.len(), n);
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            row += matrix_row_major[i * n + k] * values[k] as f64;
        }
        total += row * values[i] as f64;
    }
    total
}

pub fn build_instance(cfg: &ScenarioConfig, ch: &ChannelRealization) -> Result<SwiptInstance> {
    let n = cfg.n_elements;
    if ch.h.len() != n || ch.g.len() != n || ch.f.len() != n {
        return Err(Error::DimensionMismatch {
            context: "build_instance channel",
            expected: n,
            actual: ch.h.len(),
        });
    }
    // cascaded per-element weights; x^T R x then equals P |sum_i u_i x_i|^2
    let u: Vec<Complex64> = (0..n).map(|i| ch.h[i] * ch.g[i]).collect();
    let v: Vec<Complex64> = (0..n).map(|i| ch.h[i] * ch.f[i]).collect();
    Ok(SwiptInstance {
        n,
        r_uw: rank_one_form_uw(cfg.tx_power_w, &u),
        j_uw: rank_one_form_uw(cfg.tx_power_w, &v),
        c_uw: eh_threshold(&cfg.eh_params, cfg.delta_uw, cfg.threshold_mode)?,
        noise_w: cfg.noise_w,
        channel_id: ch.channel_id,
        seed: cfg.seed,
        threshold_mode: cfg.threshold_mode,
    })
}

impl SwiptInstance {
    pub fn r_matrix(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.n, self.n), self.r_uw.clone()).expect("square instance")
    }

    pub fn j_matrix(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.n, self.n), self.j_uw.clone()).expect("square instance")
    }

    /// x^T R x, microwatts.
    pub fn received_info_uw(&self, values: &[i8]) -> f64 {
        form_value(&self.r_uw, self.n, values)
    }

    /// x^T J x, microwatts.
    pub fn received_eh_uw(&self, values: &[i8]) -> f64 {
        form_value(&self.j_uw, self.n, values)
    }

    /// Linear SNR of the information link.
    pub fn snr(&self, values: &[i8]) -> f64 {
        self.received_info_uw(values) * 1e-6 / self.noise_w
    }

    /// Harvest constraint satisfied up to a tolerance relative to the
    /// threshold scale.
    pub fn is_feasible(&self, values: &[i8], tol_rel: f64) -> bool {
        self.c_uw - self.received_eh_uw(values) <= tol_rel * self.c_uw.abs().max(1.0)
    }

    /// Objective is the negated SNR, -x^T R x / N0, not raw microwatts: the
    /// multiplier schedule (lambda0 = 3, mu0 = 5.5) balances against the
    /// microwatt-scale harvest penalty only at this normalization.  Feasibility
    /// and relative SNR are invariant to the positive rescale.
    pub fn to_constrained_problem(&self) -> Result<ConstrainedProblem> {
        ConstrainedProblem::new(
            ObjectiveExpr::ScaledQuadraticForm {
                c1: -1e-6 / self.noise_w,
                a: self.r_matrix(),
                c0: 0.0,
            },
            vec![ConstraintExpr::ThresholdMinusForm {
                threshold: self.c_uw,
                j: self.j_matrix(),
            }],
            vec![],
        )
    }

    pub fn snr_of(&self, point: &Assignment) -> f64 {
        self.snr(point.values())
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spins_of_mask(n: usize, mask: usize) -> Vec<i8> {
        (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
    }

    #[test]
    fn path_amplitude_matches_free_space_at_one_meter() {
        let lambda = SPEED_OF_LIGHT_M_S / 915e6;
        let amp = path_amplitude(0.0, 0.0, lambda, 1.0);
        assert!((amp - lambda / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((amp - 0.0260725).abs() < 1e-6, "amp = {amp}");
        // 8 dBi on one end scales the amplitude by 10^(8/20)
        let gained = path_amplitude(8.0, 0.0, lambda, 1.0);
        assert!((gained / amp - 10f64.powf(0.4)).abs() < 1e-12);
    }

    #[test]
    fn infinite_k_collapses_to_the_steering_vector() {
        let cfg = ScenarioConfig {
            rician_k: 1e16,
            n_elements: 8,
            ..ScenarioConfig::default()
        };
        let ch = sample_channel(&cfg, 3).unwrap();
        let amp_h = path_amplitude(cfg.tx_gain_dbi, cfg.rx_gain_dbi, cfg.wavelength_m(), 3.0);
        for hn in &ch.h {
            assert!((hn.norm() - amp_h).abs() <= 1e-5 * amp_h, "|h| = {}", hn.norm());
        }
        let amp_g = path_amplitude(
            cfg.tx_gain_dbi,
            cfg.rx_gain_dbi,
            cfg.wavelength_m(),
            ch.info_distance_m,
        );
        for gn in &ch.g {
            assert!((gn.norm() - amp_g).abs() <= 1e-5 * amp_g);
        }
        // consecutive element phases differ by pi sin(theta)
        let expect = -std::f64::consts::PI * cfg.tx_angle_rad.sin();
        for w in ch.h.windows(2) {
            let got = (w[1] / w[0]).arg();
            assert!((got - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_k_scatter_has_unit_mean_power() {
        let cfg = ScenarioConfig {
            rician_k: 0.0,
            n_elements: 16,
            ..ScenarioConfig::default()
        };
        let amp = path_amplitude(cfg.tx_gain_dbi, cfg.rx_gain_dbi, cfg.wavelength_m(), 3.0);
        let mut total = 0.0;
        let draws = 6_250;
        for id in 0..draws {
            let ch = sample_channel(&cfg, id).unwrap();
            for hn in &ch.h {
                total += hn.norm_sqr();
            }
        }
        let mean = total / (draws as f64 * cfg.n_elements as f64) / (amp * amp);
        assert!((mean - 1.0).abs() < 0.02, "normalized mean power {mean}");
    }

    #[test]
    fn channel_draws_are_reproducible_and_distinct() {
        let cfg = ScenarioConfig::default();
        let a = sample_channel(&cfg, 7).unwrap();
        let b = sample_channel(&cfg, 7).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.g, b.g);
        assert_eq!(a.f, b.f);
        assert_eq!(a.info_distance_m, b.info_distance_m);
        let c = sample_channel(&cfg, 8).unwrap();
        assert_ne!(a.h, c.h);
    }

    #[test]
    fn received_power_is_the_squared_aligned_sum() {
        let cfg = ScenarioConfig {
            n_elements: 6,
            ..ScenarioConfig::default()
        };
        let ch = sample_channel(&cfg, 11).unwrap();
        let inst = build_instance(&cfg, &ch).unwrap();
        for mask in 0..1usize << 6 {
            let x = spins_of_mask(6, mask);
            let sum: Complex64 = (0..6)
                .map(|i| ch.h[i] * ch.g[i] * x[i] as f64)
                .sum();
            let expected = cfg.tx_power_w * sum.norm_sqr() * 1e6;
            let got = inst.received_info_uw(&x);
            assert!(
                (got - expected).abs() <= 1e-9 * expected.abs().max(1.0),
                "mask {mask}: {got} vs {expected}"
            );
            assert!(got >= -1e-9, "the form is positive semidefinite");
        }
    }

    #[test]
    fn threshold_roots_hit_the_target_exactly() {
        let params = EhParams::default();
        let (p_star, max_uw) = eh_peak(&params);
        assert!((p_star - 2804.4).abs() < 0.1, "apex input {p_star}");
        assert!((max_uw - 940.65).abs() < 0.05, "apex harvest {max_uw}");

        for delta in [200.0, 300.0, 500.0, 700.0, 800.0] {
            let c = eh_threshold(&params, delta, ThresholdMode::QuadraticRoot).unwrap();
            assert!(
                (harvested_uw(&params, c) - delta).abs() <= 1e-6,
                "delta {delta}: EH({c}) = {}",
                harvested_uw(&params, c)
            );
            let upper = eh_upper_root(&params, delta).unwrap();
            assert!(upper > c);
            assert!((harvested_uw(&params, upper) - delta).abs() <= 1e-6);
        }

        let c_exact = eh_threshold(&params, 500.0, ThresholdMode::QuadraticRoot).unwrap();
        assert!((c_exact - 888.6).abs() < 0.1, "quadratic root {c_exact}");
        let c_reduced = eh_threshold(&params, 500.0, ThresholdMode::ReducedDiscriminant).unwrap();
        assert!((c_reduced - 756.4).abs() < 0.1, "closed-form variant {c_reduced}");
        assert!((c_exact - c_reduced).abs() > 1.0, "the two modes must differ");
        let upper = eh_upper_root(&params, 500.0).unwrap();
        assert!((upper - 4720.2).abs() < 1.0, "upper root {upper}");

        match eh_threshold(&params, 941.0, ThresholdMode::QuadraticRoot) {
            Err(Error::UnattainableHarvestTarget { delta_uw, max_uw }) => {
                assert_eq!(delta_uw, 941.0);
                assert!((max_uw - 940.65).abs() < 0.05);
            }
            other => panic!("expected unattainable target, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_agrees_with_the_rectifier_curve() {
        let cfg = ScenarioConfig {
            n_elements: 8,
            ..ScenarioConfig::default()
        };
        let params = cfg.eh_params;
        let upper = eh_upper_root(&params, cfg.delta_uw).unwrap();
        let mut checked = 0;
        for id in 0..40 {
            let ch = sample_channel(&cfg, id).unwrap();
            let inst = build_instance(&cfg, &ch).unwrap();
            for mask in (0..1usize << 8).step_by(7) {
                let x = spins_of_mask(8, mask);
                let p = inst.received_eh_uw(&x);
                if p > upper {
                    continue;
                }
                // away from the boundary the threshold test and the curve agree
                if (p - inst.c_uw).abs() < 1e-6 {
                    continue;
                }
                let by_threshold = inst.is_feasible(&x, 0.0);
                let by_curve = harvested_uw(&params, p) >= cfg.delta_uw;
                assert_eq!(by_threshold, by_curve, "p = {p}, c = {}", inst.c_uw);
                checked += 1;
            }
        }
        assert!(checked > 100, "exercised {checked} points");
    }

    #[test]
    fn instance_json_round_trips() {
        let cfg = ScenarioConfig {
            n_elements: 5,
            ..ScenarioConfig::default()
        };
        let ch = sample_channel(&cfg, 2).unwrap();
        let inst = build_instance(&cfg, &ch).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.json");
        inst.write_json(&path).unwrap();
        let back = SwiptInstance::read_json(&path).unwrap();
        assert_eq!(inst, back);

        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for key in ["n", "r_uw", "j_uw", "c_uw", "noise_w", "channel_id", "seed", "threshold_mode"] {
            assert!(value.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(value["r_uw"].as_array().unwrap().len(), 25);
    }

    #[test]
    fn constrained_problem_mirrors_the_instance() {
        let cfg = ScenarioConfig {
            n_elements: 6,
            ..ScenarioConfig::default()
        };
        let ch = sample_channel(&cfg, 5).unwrap();
        let inst = build_instance(&cfg, &ch).unwrap();
        let problem = inst.to_constrained_problem().unwrap();
        for mask in 0..1usize << 6 {
            let x = spins_of_mask(6, mask);
            let point = Assignment::spins(x.clone()).unwrap();
            let objective = problem.objective.value(&point);
            assert!((objective + inst.snr(&x)).abs() <= 1e-9 * objective.abs().max(1.0));
            let g = problem.inequalities[0].value(&point);
            assert!((g - (inst.c_uw - inst.received_eh_uw(&x))).abs() <= 1e-9);
            assert_eq!(problem.is_feasible(&point, 1e-6), inst.is_feasible(&x, 1e-6));
        }
    }

    #[test]
    fn raw_feasibility_rates_sit_in_the_expected_bands() {
        // with the default geometry the harvest floor is only reachable for
        // a minority of small surfaces and most large ones
        let rate = |n: usize, channels: u64| -> f64 {
            let cfg = ScenarioConfig {
                n_elements: n,
                ..ScenarioConfig::default()
            };
            let mut feasible = 0;
            for id in 0..channels {
                let ch = sample_channel(&cfg, id).unwrap();
                let inst = build_instance(&cfg, &ch).unwrap();
                let j = inst.j_matrix();
                let best = crate::solvers::exhaustive::maximize_form(&j);
                if best.1 >= inst.c_uw {
                    feasible += 1;
                }
            }
            feasible as f64 / channels as f64
        };
        let r10 = rate(10, 200);
        assert!(r10 > 0.005 && r10 < 0.30, "N=10 feasibility {r10}");
        let r14 = rate(14, 100);
        assert!(r14 > 0.10 && r14 < 0.60, "N=14 feasibility {r14}");
        assert!(r14 > r10, "feasibility grows with surface size");
    }
}
