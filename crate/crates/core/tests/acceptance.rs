//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::result::Result;
use std::time::Instant;

use num_complex::Complex64;
use phasecov::cloner::{ideal_pc_report, Hemisphere};
use phasecov::counting::{estimator_sigma, CountingSetup};
use phasecov::fock::postselect_coincidence;
use phasecov::optimize::reflectance_residuals;
use phasecov::qubit::outer4;
use phasecov::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F_PC: f64 = 0.853_553_390_593_273_7;
const F_UNIV: f64 = 5.0 / 6.0;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ideal_models() -> Vec<ClonerParams> {
    vec![
        ClonerParams::SpecialBs(SpecialBsParams::ideal()),
        ClonerParams::MachZehnder(MachZehnderParams::ideal()),
        ClonerParams::Hybrid(HybridParams::ideal()),
        ClonerParams::Fiber(FiberParams::ideal()),
    ]
}

fn optimal_fidelity() -> Result<String, String> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for model in [
        ClonerParams::SpecialBs(SpecialBsParams::ideal()),
        ClonerParams::Hybrid(HybridParams::ideal()),
        ClonerParams::Fiber(FiberParams::ideal()),
    ] {
        for k in 0..32 {
            let r = model
                .run(&Qubit::equatorial(2.0 * PI * k as f64 / 32.0))
                .map_err(|e| e.to_string())?;
            worst = worst.max((r.f1 - F_PC).abs()).max((r.f2 - F_PC).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(worst < 1e-9, || format!("max |F - F_pc| = {worst:e}"))?;
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!("max |F - 0.8535533906| = {worst:.1e} over 3 x 32 states in {elapsed:.3} s"))
}

fn success_probabilities() -> Result<String, String> {
    let q = Qubit::equatorial(0.4);
    let sb = run_special_bs(&SpecialBsParams::ideal(), &q).map_err(|e| e.to_string())?;
    let fi = run_fiber(&FiberParams::ideal(), &q).map_err(|e| e.to_string())?;
    let hy = run_hybrid(&HybridParams::ideal(), &q).map_err(|e| e.to_string())?;
    ensure((sb.p_succ - 1.0 / 3.0).abs() < 1e-9, || format!("special bs {}", sb.p_succ))?;
    ensure((fi.p_succ - 1.0 / 3.0).abs() < 1e-9, || format!("fiber {}", fi.p_succ))?;
    ensure((hy.p_succ - 1.0 / 16.0).abs() < 1e-9, || format!("hybrid {}", hy.p_succ))?;
    Ok(format!(
        "special bs {:.10}, fiber {:.10}, hybrid {:.10}",
        sb.p_succ, fi.p_succ, hy.p_succ
    ))
}

fn optimal_reflectance() -> Result<String, String> {
    let r = solve_ideal_reflectance();
    let res = reflectance_residuals(&SpecialBsParams::with_reflectance(r).amplitudes());
    ensure((r - 0.788_675_134_6).abs() < 1e-9, || format!("R0 = {r}"))?;
    ensure(res.iter().all(|x| x.abs() < 1e-12), || format!("residuals {res:?}"))?;
    Ok(format!("R0 = {r:.10}, residuals ({:.1e}, {:.1e})", res[0], res[1]))
}

fn universal_baseline() -> Result<String, String> {
    let mut worst = 0.0f64;
    for eta in [1.0, 0.8, 0.5] {
        let mut p = HybridParams::ideal();
        p.eta0 = eta;
        p.eta1 = eta;
        for k in 0..32 {
            let r = run_hybrid(&p, &Qubit::equatorial(2.0 * PI * k as f64 / 32.0))
                .map_err(|e| e.to_string())?;
            worst = worst.max((r.f1 - F_UNIV).abs()).max((r.f2 - F_UNIV).abs());
        }
    }
    ensure(worst < 1e-9, || format!("max |F - 5/6| = {worst:e}"))?;
    Ok(format!("eta0 = eta1 in {{1, 0.8, 0.5}}: max |F - 5/6| = {worst:.1e}"))
}

fn phase_covariance() -> Result<String, String> {
    let mut worst = 0.0f64;
    for model in ideal_models() {
        let f0 = model.run(&Qubit::equatorial(0.0)).map_err(|e| e.to_string())?;
        for k in 0..100 {
            let r = model
                .run(&Qubit::equatorial(2.0 * PI * k as f64 / 100.0))
                .map_err(|e| e.to_string())?;
            worst = worst.max((r.f1 - f0.f1).abs()).max((r.f2 - f0.f2).abs());
        }
    }
    for k in 0..100 {
        let r = ideal_pc_report(&Qubit::equatorial(2.0 * PI * k as f64 / 100.0), Hemisphere::North)
            .map_err(|e| e.to_string())?;
        worst = worst.max((r.f1 - F_PC).abs());
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("5 architectures x 100 phases: max |F(phi) - F(0)| = {worst:.1e}"))
}

fn latitude_behavior() -> Result<String, String> {
    let thetas: Vec<f64> = (0..10).map(|k| FRAC_PI_2 * k as f64 / 9.0).collect();
    let mut models: Vec<(&str, Box<dyn Fn(&Qubit) -> phasecov::Result<CloneReport>>)> = vec![(
        "ideal map",
        Box::new(|q: &Qubit| ideal_pc_report(q, Hemisphere::North)),
    )];
    for m in ideal_models() {
        models.push((m.variant_name(), Box::new(move |q: &Qubit| m.run(q))));
    }
    for (name, eval) in &models {
        let fs: Vec<f64> = thetas
            .iter()
            .map(|&t| eval(&Qubit::new(t, 0.3).unwrap()).map(|r| r.f1))
            .collect::<phasecov::Result<_>>()
            .map_err(|e| e.to_string())?;
        ensure((fs[0] - 1.0).abs() < 1e-12, || format!("{name}: F(0) = {}", fs[0]))?;
        ensure((fs[9] - F_PC).abs() < 1e-9, || format!("{name}: F(pi/2) = {}", fs[9]))?;
        ensure(fs.windows(2).all(|w| w[1] < w[0]), || {
            format!("{name}: not strictly decreasing {fs:?}")
        })?;
    }
    Ok(format!(
        "{} models strictly decreasing from 1 to 0.8535533906 on 10 latitudes",
        models.len()
    ))
}

fn hom_physics() -> Result<String, String> {
    let p1 = hom_coincidence_probability(1.0).map_err(|e| e.to_string())?;
    let p0 = hom_coincidence_probability(0.0).map_err(|e| e.to_string())?;
    ensure(p1 < 1e-12, || format!("P(M=1) = {p1:e}"))?;
    ensure((p0 - 0.5).abs() < 1e-12, || format!("P(M=0) = {p0}"))?;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let m = k as f64 / 9.0;
        worst = worst.max((hom_visibility(m).map_err(|e| e.to_string())? - m * m).abs());
    }
    ensure(worst < 1e-10, || format!("max |V - M^2| = {worst:e}"))?;
    Ok(format!("P(1) = {p1:.1e}, P(0) = {p0}, max |V - M^2| = {worst:.1e}"))
}

fn monte_carlo_estimator() -> Result<String, String> {
    let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
    let input = Qubit::equatorial(0.0);
    let mut within = 0;
    let mut slowest = 0.0f64;
    let mut worst_z = 0.0f64;
    for seed in 0..100u64 {
        let start = Instant::now();
        let rec = simulate_counts(
            &model,
            &NoiseConfig::default(),
            &input,
            1_000_000,
            &DetectorBank::default(),
            seed,
        )
        .map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let (f1, f2) = fidelity_from_counts(&rec).ok_or("no coincidences")?;
        let sigma = estimator_sigma(F_PC, rec.c_sum());
        let z = ((f1 - F_PC).abs()).max((f2 - F_PC).abs()) / sigma;
        worst_z = worst_z.max(z);
        if z < 3.0 {
            within += 1;
        }
    }
    ensure(within >= 99, || format!("only {within}/100 seeds within 3 sigma"))?;
    ensure(slowest < 10.0, || format!("slowest run {slowest:.2} s"))?;
    Ok(format!(
        "{within}/100 seeds within 3 sigma (largest {worst_z:.2} sigma), slowest run {slowest:.2} s"
    ))
}

fn detector_balancing() -> Result<String, String> {
    const BIASED_F2: f64 = 0.823_407_096_241_762_7;
    let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
    let input = Qubit::equatorial(0.0);
    let bank = DetectorBank::new(1.0, 1.0, 0.8, 1.0).map_err(|e| e.to_string())?;
    let n = 1_000_000;
    let seed = 77;
    let raw = simulate_counts(&model, &NoiseConfig::default(), &input, n, &bank, seed)
        .map_err(|e| e.to_string())?;
    let (_, f2_raw) = fidelity_from_counts(&raw).ok_or("no coincidences")?;
    let s = estimator_sigma(BIASED_F2, raw.c_sum());
    ensure((f2_raw - BIASED_F2).abs() < 4.0 * s, || {
        format!("uncompensated F2 = {f2_raw}, expected about {BIASED_F2}")
    })?;
    let mut parts = vec![format!("raw F2 = {f2_raw:.4}")];
    for method in BalanceMethod::ALL {
        let est = balance_detectors(method, &CountingSetup::new(model, input, n, seed), &bank)
            .map_err(|e| e.to_string())?;
        let s = estimator_sigma(F_PC, est.record.c_sum());
        for f in [est.f1, est.f2] {
            ensure((f - F_PC).abs() < 4.0 * s, || format!("{method:?}: F = {f}"))?;
        }
        parts.push(format!("{method:?} ({:.4}, {:.4})", est.f1, est.f2));
    }
    Ok(parts.join(", "))
}

fn fiber_correspondence() -> Result<String, String> {
    let r = run_fiber(&FiberParams::experimental(), &Qubit::equatorial(0.0))
        .map_err(|e| e.to_string())?;
    ensure((r.p_succ - 0.3341).abs() <= 0.0005, || format!("P = {}", r.p_succ))?;
    // Overlap with the measured 33.5 +- 0.3 %.
    ensure((r.p_succ - 0.335).abs() <= 0.003 + 0.0005, || {
        format!("P = {} misses 0.335 +- 0.003", r.p_succ)
    })?;
    Ok(format!("P_succ = {:.6} (measured 0.335 +- 0.003)", r.p_succ))
}

fn table_behavior() -> Result<String, String> {
    let avg = |model: ClonerParams, vis: f64| -> Result<f64, String> {
        let m = vis.sqrt();
        let mut acc = 0.0;
        for k in 0..8 {
            let r = with_distinguishability(&model, m, &Qubit::equatorial(2.0 * PI * k as f64 / 8.0))
                .map_err(|e| e.to_string())?;
            acc += r.mean_fidelity();
        }
        Ok(acc / 8.0)
    };
    // Visibilities as reported per setup: ~92 % special splitter, ~98 % hybrid and fiber.
    let sb92 = avg(ClonerParams::SpecialBs(SpecialBsParams::ideal()), 0.92)?;
    let sb98 = avg(ClonerParams::SpecialBs(SpecialBsParams::ideal()), 0.98)?;
    let hy98 = avg(ClonerParams::Hybrid(HybridParams::ideal()), 0.98)?;
    let fi98 = avg(ClonerParams::Fiber(FiberParams::experimental()), 0.98)?;
    ensure(sb92 < F_UNIV, || format!("special bs at 0.92: {sb92}"))?;
    for (name, f) in [("special bs", sb98), ("hybrid", hy98), ("fiber", fi98)] {
        ensure(f > F_UNIV, || format!("{name} at 0.98: {f}"))?;
    }
    Ok(format!(
        "V=0.92 special bs {sb92:.4} < 5/6; V=0.98 special bs {sb98:.4}, hybrid {hy98:.4}, fiber {fi98:.4} > 5/6"
    ))
}

fn random_model(rng: &mut ChaCha8Rng) -> ClonerParams {
    match rng.random_range(0..4) {
        0 => {
            let mut p = SpecialBsParams::with_reflectance(rng.random_range(0.55..0.95));
            p.r1 = Some(rng.random_range(0.05..0.45));
            if rng.random_bool(0.5) {
                p.plate = Some(GlassPlate {
                    port: if rng.random_bool(0.5) { Port::Out1 } else { Port::Out2 },
                    eta0: rng.random_range(0.5..1.0),
                    eta1: rng.random_range(0.5..1.0),
                });
            }
            ClonerParams::SpecialBs(p)
        }
        1 => ClonerParams::MachZehnder(MachZehnderParams {
            theta_v: rng.random_range(0.2..1.4),
            theta_h: rng.random_range(1.7..3.0),
            phase_offsets: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        }),
        2 => {
            let a: f64 = rng.random_range(0.3..1.3);
            let b: f64 = rng.random_range(0.3..1.3);
            let c: f64 = rng.random_range(0.3..1.3);
            ClonerParams::Hybrid(HybridParams {
                bs1: Coupler::from_amplitudes(a.sin(), a.cos()),
                bs2_rail0: Coupler::from_amplitudes(b.sin(), b.cos()),
                bs2_rail1: Coupler::from_amplitudes(c.sin(), c.cos()),
                eta0: rng.random_range(0.3..1.0),
                eta1: rng.random_range(0.3..1.0),
                nu0: rng.random_range(0.3..1.0),
                nu1: rng.random_range(0.3..1.0),
            })
        }
        _ => ClonerParams::Fiber(FiberParams::with_ratios(
            rng.random_range(0.55..0.95),
            rng.random_range(0.05..0.45),
        )),
    }
}

fn oracle_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let sets = 40;
    for _ in 0..sets {
        let model = random_model(&mut rng);
        let input = Qubit::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
            .map_err(|e| e.to_string())?;
        let drift = if model.is_phase_sensitive() { rng.random_range(-0.5..0.5) } else { 0.0 };
        let closed = outer4(&model.closed_form(&input, drift).map_err(|e| e.to_string())?);
        let circuit = postselect_coincidence(
            &model.circuit(&input, 1.0, drift).map_err(|e| e.to_string())?,
        )
        .density();
        for i in 0..4 {
            for j in 0..4 {
                let d: Complex64 = closed[i][j] - circuit[i][j];
                worst = worst.max(d.norm());
            }
        }
    }
    ensure(worst < 1e-10, || format!("max entry deviation {worst:e}"))?;
    Ok(format!("{sets} random parameter sets: max |closed - circuit| = {worst:.1e}"))
}

fn main() -> ExitCode {
    let checks: [(u32, &str, Check); 12] = [
        (1, "optimal equatorial fidelity", optimal_fidelity),
        (2, "success probabilities", success_probabilities),
        (3, "optimal reflectance", optimal_reflectance),
        (4, "universal baseline", universal_baseline),
        (5, "phase covariance", phase_covariance),
        (6, "latitude behavior", latitude_behavior),
        (7, "HOM physics", hom_physics),
        (8, "Monte Carlo estimator", monte_carlo_estimator),
        (9, "detector balancing", detector_balancing),
        (10, "fiber correspondence", fiber_correspondence),
        (11, "qualitative visibility behavior", table_behavior),
        (12, "closed form vs Fock circuit", oracle_equivalence),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
