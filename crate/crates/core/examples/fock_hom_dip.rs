//! Hong-Ou-Mandel dip on a balanced coupler, straight from the Fock layer.

use std::f64::consts::FRAC_1_SQRT_2;

use phasecov::fock::enumerate_basis;
use phasecov::*;

fn main() -> Result<()> {
    println!("two photons in 8 modes: {} basis states", enumerate_basis(2, 8)?.len());

    let a = Photon::in_mode(Mode::principal(Port::Out1, Rail::R0));
    let b = Photon::in_mode(Mode::principal(Port::Out2, Rail::R0));
    let out = StateVector::two_photon(&a, &b).apply_two_mode_coupler(
        Mode::principal(Port::Out1, Rail::R0),
        Mode::principal(Port::Out2, Rail::R0),
        FRAC_1_SQRT_2,
        FRAC_1_SQRT_2,
    )?;
    let s = out.port_statistics();
    println!(
        "identical photons: coincidence {:.3}, bunched {:.3} + {:.3}",
        s.coincidence, s.both_out1, s.both_out2
    );

    println!("\n   M   P_coinc  visibility");
    for k in 0..=10 {
        let m = k as f64 / 10.0;
        println!(
            "{m:5.2}  {:.5}   {:.5}",
            hom_coincidence_probability(m)?,
            hom_visibility(m)?
        );
    }
    Ok(())
}
