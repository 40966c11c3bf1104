//! Partially distinguishable photons push the average fidelity below the
//! universal bound once the HOM visibility drops far enough.

use phasecov::*;

fn main() -> Result<()> {
    let input = Qubit::equatorial(0.0);
    let models = [
        ClonerParams::SpecialBs(SpecialBsParams::ideal()),
        ClonerParams::Hybrid(HybridParams::ideal()),
        ClonerParams::Fiber(FiberParams::experimental()),
    ];
    println!("universal bound {:.4}", 5.0 / 6.0);
    println!("visibility  {:>10} {:>10} {:>10}", "special_bs", "hybrid", "fiber");
    for vis in [1.0, 0.98, 0.95, 0.92, 0.85] {
        let m = NoiseConfig::with_visibility(vis).overlap_m;
        print!("{vis:>10.2}");
        for model in &models {
            print!(" {:>10.4}", with_distinguishability(model, m, &input)?.mean_fidelity());
        }
        println!();
    }
    Ok(())
}
