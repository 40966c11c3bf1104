//! Non-ideal operation: partially distinguishable photons and interferometer
//! phase drift.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloner::{ClonerParams, CloneReport};
use crate::error::{check_range, Error, Result};
use crate::fock::{postselect_coincidence, Mode, Photon, Port, Rail, StateVector, TemporalBin};
use crate::qubit::{add4, zero4, Matrix4, Qubit};

fn one() -> f64 {
    1.0
}

fn default_reset_period() -> u64 {
    100
}

fn default_jitter_samples() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Temporal-mode amplitude overlap of signal and ancilla.
    #[serde(default = "one")]
    pub overlap_m: f64,
    /// Standard deviation of one random-walk step, radians.
    #[serde(default)]
    pub phase_jitter_sigma: f64,
    /// The walk restarts from zero every this many trials.
    #[serde(default = "default_reset_period")]
    pub jitter_reset_period: u64,
    /// Number of drift samples averaged for analytic (non-counting) reports.
    #[serde(default = "default_jitter_samples")]
    pub jitter_samples: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            overlap_m: 1.0,
            phase_jitter_sigma: 0.0,
            jitter_reset_period: default_reset_period(),
            jitter_samples: default_jitter_samples(),
        }
    }
}

impl NoiseConfig {
    /// Overlap chosen so the balanced-coupler HOM visibility equals `visibility`.
    pub fn with_visibility(visibility: f64) -> Self {
        Self {
            overlap_m: visibility.max(0.0).sqrt(),
            ..Self::default()
        }
    }

    pub fn with_jitter(sigma: f64, reset_period: u64) -> Self {
        Self {
            phase_jitter_sigma: sigma,
            jitter_reset_period: reset_period,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("overlap_m", self.overlap_m, 0.0, 1.0)?;
        check_range("phase_jitter_sigma", self.phase_jitter_sigma, 0.0, f64::MAX)?;
        if self.jitter_reset_period == 0 {
            return Err(Error::Invalid("`jitter_reset_period` must be at least 1".into()));
        }
        if self.jitter_samples == 0 {
            return Err(Error::Invalid("`jitter_samples` must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.overlap_m == 1.0 && self.phase_jitter_sigma == 0.0
    }
}

/// Evaluates `model` through the full circuit with an ancilla of temporal
/// overlap `m`. Orthogonal-bin detections add incoherently.
pub fn with_distinguishability(model: &ClonerParams, m: f64, input: &Qubit) -> Result<CloneReport> {
    let post = postselect_coincidence(&model.circuit(input, m, 0.0)?);
    CloneReport::from_conditional(*input, &post.density())
}

/// Coincidence probability of two photons on a balanced coupler.
pub fn hom_coincidence_probability(m: f64) -> Result<f64> {
    check_range("overlap_m", m, 0.0, 1.0)?;
    let a = Photon::in_mode(Mode::principal(Port::Out1, Rail::R0));
    let b = Photon::from_terms(&[
        (Mode::principal(Port::Out2, Rail::R0), Complex64::new(m, 0.0)),
        (
            Mode::new(Port::Out2, Rail::R0, TemporalBin::Orthogonal),
            Complex64::new((1.0 - m * m).max(0.0).sqrt(), 0.0),
        ),
    ]);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = StateVector::two_photon(&a, &b);
    for bin in TemporalBin::ALL {
        state = state.apply_two_mode_coupler(
            Mode::new(Port::Out1, Rail::R0, bin),
            Mode::new(Port::Out2, Rail::R0, bin),
            r,
            r,
        )?;
    }
    Ok(state.port_statistics().coincidence)
}

/// `1 - P_coinc(m) / P_coinc(0)` on a balanced coupler.
pub fn hom_visibility(m: f64) -> Result<f64> {
    Ok(1.0 - hom_coincidence_probability(m)? / hom_coincidence_probability(0.0)?)
}

/// Drift of the interferometer phase over `n_trials` consecutive trials.
///
/// A Gaussian random walk that restarts from zero every
/// `jitter_reset_period` trials (active stabilization).
pub fn sample_phase_jitter(config: &NoiseConfig, seed: u64, n_trials: usize) -> Result<Vec<f64>> {
    config.validate()?;
    if n_trials == 0 {
        return Err(Error::Invalid("`n_trials` must be at least 1".into()));
    }
    if config.phase_jitter_sigma == 0.0 {
        return Ok(vec![0.0; n_trials]);
    }
    let normal = Normal::new(0.0, config.phase_jitter_sigma)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = config.jitter_reset_period;
    let mut acc = 0.0;
    Ok((0..n_trials as u64)
        .map(|k| {
            if k % period == 0 {
                acc = 0.0;
            }
            acc += normal.sample(&mut rng);
            acc
        })
        .collect())
}

/// Unnormalized conditional density averaged over the noise model. Its trace
/// is the mean success probability.
pub fn averaged_conditional_density(
    model: &ClonerParams,
    noise: &NoiseConfig,
    input: &Qubit,
    seed: u64,
) -> Result<Matrix4> {
    noise.validate()?;
    if noise.phase_jitter_sigma == 0.0 || !model.is_phase_sensitive() {
        return model.conditional_density(input, noise.overlap_m, 0.0);
    }
    let drifts = sample_phase_jitter(noise, seed, noise.jitter_samples)?;
    let mut mean = zero4();
    let weight = 1.0 / drifts.len() as f64;
    for d in drifts {
        add4(
            &mut mean,
            &model.conditional_density(input, noise.overlap_m, d)?,
            weight,
        );
    }
    Ok(mean)
}

/// Report of `model` under `noise`. Jitter averages the clone states over
/// drift samples drawn from `seed`; distinguishability and jitter compose.
pub fn evaluate_with_noise(
    model: &ClonerParams,
    noise: &NoiseConfig,
    input: &Qubit,
    seed: u64,
) -> Result<CloneReport> {
    let sigma = averaged_conditional_density(model, noise, input, seed)?;
    CloneReport::from_conditional(*input, &sigma)
}
