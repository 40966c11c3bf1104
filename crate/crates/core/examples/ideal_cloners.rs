//! Fidelity and success probability of every ideal cloner on the equator.

use phasecov::cloner::{ideal_pc_report, Hemisphere};
use phasecov::*;

fn main() -> Result<()> {
    let input = Qubit::equatorial(0.9);
    let limits = theoretical_limits();
    println!(
        "bounds: phase-covariant {:.6}, universal {:.6}, measure-and-prepare {:.2}",
        limits.phase_covariant, limits.universal, limits.semi_classical
    );

    let ideal = ideal_pc_report(&input, Hemisphere::North)?;
    println!("{:<14} F1={:.10} F2={:.10} P={:.4}", "ideal map", ideal.f1, ideal.f2, ideal.p_succ);

    let models = [
        ClonerParams::SpecialBs(SpecialBsParams::ideal()),
        ClonerParams::MachZehnder(MachZehnderParams::ideal()),
        ClonerParams::Hybrid(HybridParams::ideal()),
        ClonerParams::Fiber(FiberParams::ideal()),
        ClonerParams::Hybrid(HybridParams::universal()),
    ];
    for model in models {
        let r = model.run(&input)?;
        println!(
            "{:<14} F1={:.10} F2={:.10} P={:.4}",
            model.variant_name(),
            r.f1,
            r.f2,
            r.p_succ
        );
    }
    // the last line is the hybrid without its filter: the universal cloner
    Ok(())
}
