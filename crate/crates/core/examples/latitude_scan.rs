//! Clone fidelity from the pole to the equator, north-hemisphere cloner.

use std::f64::consts::FRAC_PI_2;

use phasecov::*;

fn main() -> Result<()> {
    let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
    println!(" theta     F       P_succ");
    for k in 0..=9 {
        let theta = FRAC_PI_2 * k as f64 / 9.0;
        let r = model.run(&Qubit::new(theta, 0.0)?)?;
        println!("{theta:6.3}  {:.6}  {:.4}", r.f1, r.p_succ);
    }
    Ok(())
}
