//! Seeded Monte Carlo of coincidence counts, the counting fidelity estimator
//! and detector-efficiency balancing.
//!
//! Patterns are ordered `[++, +-, -+, --]`, first sign for clone 1. `+` is the
//! detector aligned with the input state, `-` the orthogonal one.

use std::ops::{Add, AddAssign};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloner::{ClonerParams, CloneReport};
use crate::error::{check_range, Error, Result};
use crate::noise::{averaged_conditional_density, NoiseConfig};
use crate::qubit::{JointState, Qubit};

/// Trials per independently seeded chunk. Fixed so results do not depend on
/// the number of worker threads.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// Detection efficiencies of `D1+`, `D1-`, `D2+`, `D2-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorBank {
    pub eta_1p: f64,
    pub eta_1m: f64,
    pub eta_2p: f64,
    pub eta_2m: f64,
}

impl Default for DetectorBank {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl DetectorBank {
    pub fn new(eta_1p: f64, eta_1m: f64, eta_2p: f64, eta_2m: f64) -> Result<Self> {
        let bank = Self {
            eta_1p,
            eta_1m,
            eta_2p,
            eta_2m,
        };
        bank.validate()?;
        Ok(bank)
    }

    pub fn uniform(eta: f64) -> Self {
        Self {
            eta_1p: eta,
            eta_1m: eta,
            eta_2p: eta,
            eta_2m: eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            check_range(name, v, 0.0, 1.0)?;
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("eta_1p", self.eta_1p),
            ("eta_1m", self.eta_1m),
            ("eta_2p", self.eta_2p),
            ("eta_2m", self.eta_2m),
        ]
    }

    /// Joint registration probability of each pattern.
    pub fn pattern_efficiencies(&self) -> [f64; 4] {
        [
            self.eta_1p * self.eta_2p,
            self.eta_1p * self.eta_2m,
            self.eta_1m * self.eta_2p,
            self.eta_1m * self.eta_2m,
        ]
    }

    pub fn min(&self) -> f64 {
        self.named().iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    fn require_nonzero(&self) -> Result<()> {
        match self.named().into_iter().find(|&(_, v)| v <= 0.0) {
            Some((name, _)) => Err(Error::ZeroEfficiency(name)),
            None => Ok(()),
        }
    }
}

/// Coincidence counts of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceRecord {
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
    /// Pairs attempted.
    pub n_pairs: u64,
    /// Seed of the run; merged records keep the smallest.
    pub seed: u64,
}

impl CoincidenceRecord {
    pub fn empty(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn from_counts(counts: [u64; 4], n_pairs: u64, seed: u64) -> Result<Self> {
        let sum: u64 = counts.iter().sum();
        if sum > n_pairs {
            return Err(Error::Invalid(format!(
                "{sum} coincidences exceed {n_pairs} attempted pairs"
            )));
        }
        Ok(Self {
            c_pp: counts[0],
            c_pm: counts[1],
            c_mp: counts[2],
            c_mm: counts[3],
            n_pairs,
            seed,
        })
    }

    pub fn counts(&self) -> [u64; 4] {
        [self.c_pp, self.c_pm, self.c_mp, self.c_mm]
    }

    pub fn c_sum(&self) -> u64 {
        self.counts().iter().sum()
    }

    /// Field-wise sum; associative and commutative.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            c_pp: self.c_pp + other.c_pp,
            c_pm: self.c_pm + other.c_pm,
            c_mp: self.c_mp + other.c_mp,
            c_mm: self.c_mm + other.c_mm,
            n_pairs: self.n_pairs + other.n_pairs,
            seed: self.seed.min(other.seed),
        }
    }
}

impl Add for CoincidenceRecord {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.merge(&rhs)
    }
}

impl AddAssign for CoincidenceRecord {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.merge(&rhs);
    }
}

/// Detector vectors `v[clone][sign]`; the click amplitude is `<v|clone>`.
pub type Analyzers = [[[Complex64; 2]; 2]; 2];

/// Both clones measured in the basis `{analysis, analysis_perp}`.
pub fn basis_analyzers(analysis: &Qubit) -> Analyzers {
    let basis = [analysis.amplitudes(), analysis.orthogonal_amplitudes()];
    [basis, basis]
}

/// Analyzers the model actually uses: the fiber detection blocks for the
/// fiber model, the ideal input basis otherwise.
pub fn model_analyzers(model: &ClonerParams, input: &Qubit) -> Analyzers {
    match model {
        ClonerParams::Fiber(p) => p.detector_vectors(input),
        _ => basis_analyzers(input),
    }
}

pub fn analyzer_distribution(joint: &JointState, analyzers: &Analyzers) -> [f64; 4] {
    let mut out = [0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            out[2 * a + b] = joint.project(&analyzers[0][a], &analyzers[1][b]);
        }
    }
    out
}

/// Pattern probabilities given success, analyzing in `{analysis, analysis_perp}`.
pub fn outcome_distribution(report: &CloneReport, analysis: &Qubit) -> [f64; 4] {
    analyzer_distribution(&report.joint, &basis_analyzers(analysis))
}

/// Success probability and conditional pattern distribution of `model`
/// under `noise`, as seen through the model's own analyzers.
pub fn model_outcome_distribution(
    model: &ClonerParams,
    noise: &NoiseConfig,
    input: &Qubit,
    seed: u64,
) -> Result<(f64, [f64; 4])> {
    let sigma = averaged_conditional_density(model, noise, input, seed)?;
    let (joint, p) = JointState::from_unnormalized(&sigma).ok_or(Error::NoCoincidence)?;
    Ok((p, analyzer_distribution(&joint, &model_analyzers(model, input))))
}

/// Everything needed to simulate one counting run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingSetup {
    pub model: ClonerParams,
    pub noise: NoiseConfig,
    pub input: Qubit,
    pub n_pairs: u64,
    pub seed: u64,
}

impl CountingSetup {
    pub fn new(model: ClonerParams, input: Qubit, n_pairs: u64, seed: u64) -> Self {
        Self {
            model,
            noise: NoiseConfig::default(),
            input,
            n_pairs,
            seed,
        }
    }
}

/// Simulates `n_pairs` trials of `model`.
///
/// A trial succeeds with the (noise-averaged) success probability, draws a
/// pattern from the conditional distribution and registers it with the
/// product of the two detector efficiencies. Deterministic for a given seed,
/// independent of the thread count.
pub fn simulate_counts(
    model: &ClonerParams,
    noise: &NoiseConfig,
    input: &Qubit,
    n_pairs: u64,
    detectors: &DetectorBank,
    seed: u64,
) -> Result<CoincidenceRecord> {
    detectors.validate()?;
    let (p, dist) = model_outcome_distribution(model, noise, input, seed)?;
    simulate_from_distribution(p, &dist, &detectors.pattern_efficiencies(), n_pairs, seed)
}

/// Counting core: pattern `k` is registered on a trial with probability
/// `p_succ * dist[k] * efficiencies[k]`.
pub fn simulate_from_distribution(
    p_succ: f64,
    dist: &[f64; 4],
    efficiencies: &[f64; 4],
    n_pairs: u64,
    seed: u64,
) -> Result<CoincidenceRecord> {
    if n_pairs == 0 {
        return Err(Error::Invalid("`n_pairs` must be at least 1".into()));
    }
    check_range("p_succ", p_succ, 0.0, 1.0 + 1e-12)?;
    let mut cumulative = [0.0; 4];
    let mut acc = 0.0;
    for k in 0..4 {
        acc += p_succ * dist[k].max(0.0) * efficiencies[k];
        cumulative[k] = acc;
    }
    let chunks = n_pairs.div_ceil(CHUNK_TRIALS);
    let record = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let trials = CHUNK_TRIALS.min(n_pairs - chunk * CHUNK_TRIALS);
            let mut counts = [0u64; 4];
            for _ in 0..trials {
                let u: f64 = rng.random();
                if let Some(k) = cumulative.iter().position(|&c| u < c) {
                    counts[k] += 1;
                }
            }
            CoincidenceRecord {
                c_pp: counts[0],
                c_pm: counts[1],
                c_mp: counts[2],
                c_mm: counts[3],
                n_pairs: trials,
                seed,
            }
        })
        .reduce(|| CoincidenceRecord::empty(seed), |a, b| a + b);
    Ok(record)
}

/// `(F1, F2)` from pattern weights; `None` when all weights vanish.
pub fn fidelity_from_weights(w: &[f64; 4]) -> Option<(f64, f64)> {
    let sum: f64 = w.iter().sum();
    if !(sum > 0.0) {
        return None;
    }
    Some(((w[0] + w[1]) / sum, (w[0] + w[2]) / sum))
}

/// Counting estimator `F1 = (C++ + C+-)/C`, `F2 = (C++ + C-+)/C`.
/// `None` when no coincidence was recorded.
pub fn fidelity_from_counts(record: &CoincidenceRecord) -> Option<(f64, f64)> {
    fidelity_from_weights(&record.counts().map(|c| c as f64))
}

/// `C_sum / n_pairs` (zero for an empty run).
pub fn success_probability_estimate(record: &CoincidenceRecord) -> f64 {
    if record.n_pairs == 0 {
        0.0
    } else {
        record.c_sum() as f64 / record.n_pairs as f64
    }
}

/// Binomial standard error `sqrt(F(1-F)/C)` of a counting fidelity.
pub fn estimator_sigma(fidelity: f64, c_sum: u64) -> f64 {
    (fidelity * (1.0 - fidelity) / c_sum as f64).sqrt()
}

/// Counts divided by the efficiency product of their detector pair.
pub fn rescale_counts(record: &CoincidenceRecord, detectors: &DetectorBank) -> Result<[f64; 4]> {
    detectors.validate()?;
    detectors.require_nonzero()?;
    let eff = detectors.pattern_efficiencies();
    let counts = record.counts();
    Ok([0, 1, 2, 3].map(|k| counts[k] as f64 / eff[k]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceMethod {
    /// Divide each count by its efficiency product.
    Rescale,
    /// Attenuate every detector down to the weakest one and measure again.
    AddLoss,
    /// Measure all four patterns with `D1+` and `D2+` only, by permuting the
    /// analyzers over four equal sub-runs.
    BasisSwap,
}

impl BalanceMethod {
    pub const ALL: [BalanceMethod; 3] = [
        BalanceMethod::Rescale,
        BalanceMethod::AddLoss,
        BalanceMethod::BasisSwap,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedEstimate {
    pub method: BalanceMethod,
    pub f1: f64,
    pub f2: f64,
    /// Raw counts the estimate was built from.
    pub record: CoincidenceRecord,
}

/// Fidelity estimates with the detector imbalance removed by `method`.
pub fn balance_detectors(
    method: BalanceMethod,
    setup: &CountingSetup,
    detectors: &DetectorBank,
) -> Result<BalancedEstimate> {
    detectors.validate()?;
    detectors.require_nonzero()?;
    let (p, dist) =
        model_outcome_distribution(&setup.model, &setup.noise, &setup.input, setup.seed)?;
    let (weights, record) = match method {
        BalanceMethod::Rescale => {
            let eff = detectors.pattern_efficiencies();
            let record = simulate_from_distribution(p, &dist, &eff, setup.n_pairs, setup.seed)?;
            (rescale_counts(&record, detectors)?, record)
        }
        BalanceMethod::AddLoss => {
            let eff = DetectorBank::uniform(detectors.min()).pattern_efficiencies();
            let record = simulate_from_distribution(p, &dist, &eff, setup.n_pairs, setup.seed)?;
            (record.counts().map(|c| c as f64), record)
        }
        BalanceMethod::BasisSwap => {
            let quarter = setup.n_pairs / 4;
            if quarter == 0 {
                return Err(Error::Invalid(
                    "basis swap needs at least 4 pairs (one per sub-run)".into(),
                ));
            }
            let eff = detectors.eta_1p * detectors.eta_2p;
            let mut record = CoincidenceRecord::empty(setup.seed);
            for k in 0..4 {
                let mut mask = [0.0; 4];
                mask[k] = eff;
                let sub = simulate_from_distribution(
                    p,
                    &dist,
                    &mask,
                    quarter,
                    derive_seed(setup.seed, k as u64),
                )?;
                record += sub;
            }
            record.seed = setup.seed;
            (record.counts().map(|c| c as f64), record)
        }
    };
    let (f1, f2) = fidelity_from_weights(&weights).ok_or(Error::NoCoincidence)?;
    Ok(BalancedEstimate {
        method,
        f1,
        f2,
        record,
    })
}

/// Independent child seed for sub-run `index` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
