//! The fiber cloner seen through its own detection blocks, including a
//! drifting analyzer.

use phasecov::counting::{analyzer_distribution, model_analyzers};
use phasecov::fock::postselect_coincidence;
use phasecov::*;

fn main() -> Result<()> {
    let model = ClonerParams::Fiber(FiberParams::experimental());
    let input = Qubit::equatorial(2.0);
    let r = model.run(&input)?;
    println!("79:21 / 21:79  F1={:.6} F2={:.6} P={:.4}", r.f1, r.f2, r.p_succ);

    let dist = analyzer_distribution(&r.joint, &model_analyzers(&model, &input));
    println!("detector pairs ++ +- -+ --: {dist:.4?}");

    // same numbers from the full circuit with both detection blocks
    let post = postselect_coincidence(&model.fiber_detection_circuit(&input, 1.0, 0.0)?);
    let sigma = post.density();
    let circuit: Vec<f64> = (0..4).map(|k| sigma[k][k].re / post.probability).collect();
    println!("from circuit:               {circuit:.4?}");

    let noise = NoiseConfig::with_jitter(0.02, 100);
    let noisy = evaluate_with_noise(&model, &noise, &input, 3)?;
    println!("with drift     F1={:.6} F2={:.6}", noisy.f1, noisy.f2);
    Ok(())
}
