//! A weak D2+ biases the estimate of clone 2; three ways to undo it.

use phasecov::*;

fn main() -> Result<()> {
    let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
    let input = Qubit::equatorial(0.0);
    let bank = DetectorBank::new(1.0, 1.0, 0.8, 1.0)?;
    let n = 1_000_000;

    let raw = simulate_counts(&model, &NoiseConfig::default(), &input, n, &bank, 5)?;
    let (f1, f2) = fidelity_from_counts(&raw).ok_or(Error::NoCoincidence)?;
    println!("uncompensated  F1={f1:.4} F2={f2:.4}");

    let setup = CountingSetup::new(model, input, n, 5);
    for method in BalanceMethod::ALL {
        let est = balance_detectors(method, &setup, &bank)?;
        println!(
            "{:<14} F1={:.4} F2={:.4}  ({} coincidences)",
            format!("{method:?}"),
            est.f1,
            est.f2,
            est.record.c_sum()
        );
    }
    Ok(())
}
