//! Counting estimate of the clone fidelities from a million simulated pairs.

use phasecov::counting::estimator_sigma;
use phasecov::*;

fn main() -> Result<()> {
    let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
    let input = Qubit::equatorial(0.0);
    let report = model.run(&input)?;
    let dist = outcome_distribution(&report, &input);
    println!("pattern probabilities ++ +- -+ --: {dist:.4?}");

    let rec = simulate_counts(
        &model,
        &NoiseConfig::default(),
        &input,
        1_000_000,
        &DetectorBank::default(),
        42,
    )?;
    let (f1, f2) = fidelity_from_counts(&rec).ok_or(Error::NoCoincidence)?;
    let sigma = estimator_sigma(report.f1, rec.c_sum());
    println!(
        "counts ({}, {}, {}, {}) of {} pairs",
        rec.c_pp, rec.c_pm, rec.c_mp, rec.c_mm, rec.n_pairs
    );
    println!("F1 = {f1:.4} +- {sigma:.4}, F2 = {f2:.4} +- {sigma:.4}");
    println!("P_succ = {:.4}", success_probability_estimate(&rec));
    Ok(())
}
