//! Run a small benchmark sweep over surface sizes and print the summary
//! table: feasibility rate and SNR relative to the exhaustive reference,
//! per scheme and sweep point.

use hobopt::bench::{run_sweep, ExperimentConfig, Scheme};

fn main() -> hobopt::Result<()> {
    let cfg = ExperimentConfig {
        ns: vec![10, 12, 14],
        deltas_uw: vec![500.0],
        channels: 15,
        schemes: vec![Scheme::AlmDsb, Scheme::PenaltySa, Scheme::Random, Scheme::Exhaustive],
        seed: 11,
        ..ExperimentConfig::default()
    };
    let outcome = run_sweep(&cfg)?;

    println!(
        "{:<18} {:>3} {:>6} {:>9} {:>9} {:>11} {:>9}",
        "scheme", "n", "delta", "feasible", "rel_snr", "p(rel>=95%)", "ms/chan"
    );
    for s in &outcome.summaries {
        println!(
            "{:<18} {:>3} {:>6.0} {:>9.3} {:>9} {:>11} {:>9.1}",
            s.scheme,
            s.n,
            s.delta_uw,
            s.feasibility_rate,
            s.mean_relative_snr.map_or_else(|| "-".into(), |v| format!("{v:.4}")),
            s.prob_relative_snr_ge_95.map_or_else(|| "-".into(), |v| format!("{v:.3}")),
            s.median_wall_ms,
        );
    }

    let records = outcome.records.len();
    let feasible = outcome.records.iter().filter(|r| r.feasible).count();
    println!("\n{records} channel solves, {feasible} produced a feasible beam pattern");
    Ok(())
}
