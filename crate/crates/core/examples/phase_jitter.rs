use phasecov::*;

fn main() -> Result<()> {
    let model = ClonerParams::MachZehnder(MachZehnderParams::ideal());
    let input = Qubit::equatorial(1.2);

    let walk = sample_phase_jitter(&NoiseConfig::with_jitter(0.01, 50), 7, 200)?;
    let worst = walk.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("200 trials, reset every 50: largest drift {worst:.4} rad");

    println!("\nsigma   reset   F1       F2");
    for (sigma, reset) in [(0.0, 100), (0.005, 100), (0.01, 100), (0.01, 20), (0.03, 20)] {
        let noise = NoiseConfig::with_jitter(sigma, reset);
        let r = evaluate_with_noise(&model, &noise, &input, 1)?;
        println!("{sigma:<7} {reset:<7} {:.5}  {:.5}", r.f1, r.f2);
    }
    Ok(())
}
