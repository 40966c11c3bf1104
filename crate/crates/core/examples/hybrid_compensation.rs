//! Filter and plate settings that keep the hybrid cloner optimal when its
//! second splitter is not balanced.

use phasecov::*;

fn main() -> Result<()> {
    for (r0_sq, r1_sq) in [(0.5, 0.5), (0.52, 0.48), (0.49, 0.51), (0.45, 0.6)] {
        let bs2 = RailAmplitudes {
            r0: f64::sqrt(r0_sq),
            t0: f64::sqrt(1.0 - r0_sq),
            r1: f64::sqrt(r1_sq),
            t1: f64::sqrt(1.0 - r1_sq),
        };
        let s = solve_hybrid_compensation(&bs2)?;
        let [eta0, eta1, nu0, nu1] = s.capped_values;
        println!(
            "R0={r0_sq:.2} R1={r1_sq:.2}: nu0/nu1={:.5} eta1/eta0={:.5} \
             -> eta=({eta0:.4}, {eta1:.4}) nu=({nu0:.4}, {nu1:.4}) F={:.6}/{:.6} P={:.5}",
            s.nu_ratio, s.eta_ratio, s.predicted.f1, s.predicted.f2, s.predicted.p_succ
        );
    }
    Ok(())
}
