//! An unbalanced special splitter made symmetric by a lossy plate on one
//! output rail, then the best reflectance found numerically.

use phasecov::*;

fn main() -> Result<()> {
    let input = Qubit::equatorial(0.0);
    let mut p = SpecialBsParams::with_reflectance(0.80);
    p.r1 = Some(0.25);
    let model = ClonerParams::SpecialBs(p);
    let before = model.run(&input)?;
    println!("before: F1={:.5} F2={:.5} P={:.4}", before.f1, before.f2, before.p_succ);

    let res = optimize_symmetry(
        &model,
        &[FreeParameter::new(Knob::PlateEta1, 0.0, 1.0)],
        Objective::MinFidelityGap,
        &input,
    )?;
    println!(
        "after:  F1={:.5} F2={:.5} P={:.4} with plate eta1={:.5} ({} evaluations)",
        res.report.f1, res.report.f2, res.report.p_succ, res.values[0], res.evaluations
    );

    let best = optimize_symmetry(
        &ClonerParams::SpecialBs(SpecialBsParams::with_reflectance(0.6)),
        &[FreeParameter::new(Knob::R0, 0.5, 1.0)],
        Objective::MaxAvgFidelity,
        &input,
    )?;
    println!(
        "best R0 = {:.6} (analytic {:.6})",
        best.values[0],
        solve_ideal_reflectance()
    );
    Ok(())
}
