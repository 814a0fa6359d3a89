//! Solve one reflecting-surface channel end to end: screen for a channel
//! whose harvest constraint is attainable, run the multiplier method with a
//! bifurcation inner solver, and compare against the exhaustive optimum.

use hobopt::bench::{screen_channels, SchemeKnobs, FEASIBILITY_TOL_REL};
use hobopt::constrained::solve_alm;
use hobopt::solvers::exhaustive;
use hobopt::swipt::{build_instance, sample_channel, ScenarioConfig};

fn main() -> hobopt::Result<()> {
    let scenario = ScenarioConfig {
        n_elements: 14,
        delta_uw: 500.0,
        seed: 7,
        ..ScenarioConfig::default()
    };

    // most random channels cannot harvest 500 uW at all; walk ids until one can
    let screened = screen_channels(&scenario, 1, 10_000)?;
    let id = screened.channel_ids[0];
    println!(
        "channel {id} is the first of {} attempts that can meet the harvest threshold",
        screened.attempts
    );

    let ch = sample_channel(&scenario, id)?;
    let inst = build_instance(&scenario, &ch)?;
    println!(
        "n = {}, harvest threshold = {:.1} uW, noise = {:.1e} W",
        inst.n, inst.c_uw, inst.noise_w
    );

    let oracle = exhaustive::maximize_form_constrained(
        &inst.r_matrix(),
        &inst.j_matrix(),
        inst.c_uw,
        FEASIBILITY_TOL_REL * inst.c_uw,
    )
    .expect("screening guaranteed a feasible point");
    let oracle_snr = inst.snr(&oracle.spins);
    println!(
        "exhaustive: snr {:.1} ({:.2} dB), harvested {:.1} uW",
        oracle_snr,
        10.0 * oracle_snr.log10(),
        oracle.constraint
    );

    let knobs = SchemeKnobs::default();
    let outcome = solve_alm(&inst.to_constrained_problem()?, &knobs.alm_dsb)?;
    let (point, _) = outcome
        .best_feasible
        .as_ref()
        .expect("multiplier method should find a feasible point here");
    let snr = inst.snr(point.values());
    println!(
        "multiplier:  snr {:.1} ({:.2} dB), harvested {:.1} uW, {} outer iterations",
        snr,
        10.0 * snr.log10(),
        inst.received_eh_uw(point.values()),
        outcome.trace.len()
    );
    println!("relative snr = {:.4}", snr / oracle_snr);
    assert!(inst.is_feasible(point.values(), FEASIBILITY_TOL_REL));
    Ok(())
}
