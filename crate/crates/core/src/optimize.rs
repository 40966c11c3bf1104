//! Design conditions: the optimal special-splitter reflectance, glass-plate
//! compensation of the hybrid scheme, and numeric symmetrization.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloner::{ClonerParams, CloneReport, Coupler, HybridParams, Knob, RailAmplitudes};
use crate::error::{Error, Result};
use crate::qubit::Qubit;

/// Larger root of `6R^2 - 6R + 1 = 0`, the rail-0 intensity reflectance of
/// the optimal special beam splitter. Rail 1 uses `1 - R0`.
pub fn solve_ideal_reflectance() -> f64 {
    let (a, b, c) = (6.0, -6.0, 1.0);
    (-b + f64::sqrt(b * b - 4.0 * a * c)) / (2.0 * a)
}

/// Residuals of `r0 r1 = -t0 t1` and `r0^2 - t0^2 = sqrt2 r0 r1` for signed
/// amplitudes.
pub fn reflectance_residuals(amp: &RailAmplitudes) -> [f64; 2] {
    [
        amp.r0 * amp.r1 + amp.t0 * amp.t1,
        (amp.r0 * amp.r0 - amp.t0 * amp.t0) - SQRT_2 * amp.r0 * amp.r1,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompensationSolution {
    /// `nu0 / nu1` of the plate on the transmitted output.
    pub nu_ratio: f64,
    /// `eta1 / eta0` of the filter.
    pub eta_ratio: f64,
    /// `(eta0, eta1, nu0, nu1)`, each pair scaled so its larger member is 1.
    pub capped_values: [f64; 4],
    /// Full hybrid parameters with a balanced first splitter.
    pub params: HybridParams,
    /// Report for the equatorial input `phi = 0`.
    pub predicted: CloneReport,
}

/// Filter and plate transmittances that make the hybrid cloner symmetric and
/// optimal for a given (possibly unbalanced) second splitter.
pub fn solve_hybrid_compensation(bs2: &RailAmplitudes) -> Result<CompensationSolution> {
    for (name, v) in [("r0", bs2.r0), ("t0", bs2.t0), ("r1", bs2.r1), ("t1", bs2.t1)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::OutOfRange {
                field: format!("bs2.{name}"),
                value: v,
                expected: "(0, 1]".into(),
            });
        }
    }
    let nu_ratio = bs2.t1 * bs2.r0 / (bs2.t0 * bs2.r1);
    let eta_ratio = SQRT_2 * bs2.r0 / bs2.r1;
    let (eta0, eta1) = cap(1.0, eta_ratio);
    let (nu0, nu1) = cap(nu_ratio, 1.0);
    let params = HybridParams {
        bs1: Coupler::balanced(),
        bs2_rail0: Coupler::from_amplitudes(bs2.r0, bs2.t0),
        bs2_rail1: Coupler::from_amplitudes(bs2.r1, bs2.t1),
        eta0,
        eta1,
        nu0,
        nu1,
    };
    let predicted = ClonerParams::Hybrid(params).run(&Qubit::equatorial(0.0))?;
    Ok(CompensationSolution {
        nu_ratio,
        eta_ratio,
        capped_values: [eta0, eta1, nu0, nu1],
        params,
        predicted,
    })
}

/// Scales `(a, b)` so the larger entry becomes 1.
fn cap(a: f64, b: f64) -> (f64, f64) {
    let m = a.max(b);
    (a / m, b / m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimize `|F1 - F2|`.
    MinFidelityGap,
    /// Maximize `(F1 + F2)/2`.
    MaxAvgFidelity,
}

impl Objective {
    /// Value to minimize.
    pub fn score(self, report: &CloneReport) -> f64 {
        match self {
            Objective::MinFidelityGap => (report.f1 - report.f2).abs(),
            Objective::MaxAvgFidelity => -report.mean_fidelity(),
        }
    }
}

/// A knob the optimizer may move, restricted to `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameter {
    pub knob: Knob,
    pub lo: f64,
    pub hi: f64,
}

impl FreeParameter {
    pub fn new(knob: Knob, lo: f64, hi: f64) -> Self {
        Self { knob, lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub params: ClonerParams,
    /// Final free-parameter values, in the order given.
    pub values: Vec<f64>,
    /// Objective value at `params` (lower is better).
    pub objective_value: f64,
    /// Best objective value seen on the coarse grid (start point included).
    pub best_grid_value: f64,
    pub report: CloneReport,
    pub evaluations: usize,
}

const GRID_BUDGET: f64 = 10_000.0;
const MAX_REFINE_STEPS: usize = 20_000;

/// Coarse grid over the free parameters followed by a compass search with
/// step halving. Only strict improvements are accepted, so a start point
/// that is already optimal comes back unchanged. Deterministic.
pub fn optimize_symmetry(
    model: &ClonerParams,
    free: &[FreeParameter],
    objective: Objective,
    input: &Qubit,
) -> Result<OptimizationResult> {
    if free.is_empty() {
        return Err(Error::Invalid("no free parameters given".into()));
    }
    for f in free {
        if !(f.lo.is_finite() && f.hi.is_finite() && f.lo < f.hi) {
            return Err(Error::EmptyInterval(f.knob.name().to_string()));
        }
    }
    let start: Vec<f64> = free
        .iter()
        .map(|f| model.knob(f.knob))
        .collect::<Result<_>>()?;

    let eval = |x: &[f64]| -> f64 {
        let mut p = *model;
        for (f, &v) in free.iter().zip(x) {
            p = match p.with_knob(f.knob, v) {
                Ok(q) => q,
                Err(_) => return f64::INFINITY,
            };
        }
        p.run(input)
            .map(|r| objective.score(&r))
            .unwrap_or(f64::INFINITY)
    };

    let dims = free.len();
    let per_dim = (GRID_BUDGET.powf(1.0 / dims as f64).floor() as usize).max(3);
    let total = per_dim.pow(dims as u32);
    let grid_point = |mut idx: usize| -> Vec<f64> {
        free.iter()
            .map(|f| {
                let k = idx % per_dim;
                idx /= per_dim;
                f.lo + (f.hi - f.lo) * k as f64 / (per_dim - 1) as f64
            })
            .collect()
    };

    let in_box = start
        .iter()
        .zip(free)
        .all(|(&v, f)| v >= f.lo && v <= f.hi);
    let mut best_x = start.clone();
    let mut best = if in_box { eval(&start) } else { f64::INFINITY };
    let grid_values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| eval(&grid_point(i)))
        .collect();
    for (i, &v) in grid_values.iter().enumerate() {
        if v < best {
            best = v;
            best_x = grid_point(i);
        }
    }
    if !best.is_finite() {
        return Err(Error::NoCoincidence);
    }
    let best_grid_value = best;
    let mut evaluations = total + 1;

    let mut steps: Vec<f64> = free
        .iter()
        .map(|f| (f.hi - f.lo) / (per_dim - 1) as f64)
        .collect();
    let min_steps: Vec<f64> = free.iter().map(|f| (f.hi - f.lo) * 1e-13).collect();
    for _ in 0..MAX_REFINE_STEPS {
        let mut improved = false;
        'dims: for d in 0..dims {
            for sign in [1.0, -1.0] {
                let mut x = best_x.clone();
                x[d] = (x[d] + sign * steps[d]).clamp(free[d].lo, free[d].hi);
                if x[d] == best_x[d] {
                    continue;
                }
                let v = eval(&x);
                evaluations += 1;
                if v < best {
                    best = v;
                    best_x = x;
                    improved = true;
                    break 'dims;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
            if steps.iter().zip(&min_steps).all(|(s, m)| s < m) {
                break;
            }
        }
    }

    let mut params = *model;
    for (f, &v) in free.iter().zip(&best_x) {
        params = params.with_knob(f.knob, v)?;
    }
    let report = params.run(input)?;
    Ok(OptimizationResult {
        params,
        values: best_x,
        objective_value: best,
        best_grid_value,
        report,
        evaluations,
    })
}
