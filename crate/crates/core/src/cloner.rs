//! The four cloner architectures and the ideal phase-covariant map.
//!
//! Every architecture is available in two independent forms: a closed-form
//! conditional map giving the post-selected rail amplitudes directly, and a
//! full two-photon circuit built from [`fock`](crate::fock) elements. The
//! circuit is also the only route that models partially distinguishable
//! photons.
//!
//! Port and rail conventions: the signal enters `out1`, the ancilla (always
//! `|0>`) enters `out2`. After post-selection the photon in `out1` is clone 1.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::fock::{postselect_coincidence, Mode, Photon, Port, Rail, StateVector, TemporalBin};
use crate::qubit::{
    fidelity, outer4, reduced_qubit, DensityMatrix, JointState, Ket4, Matrix4, Qubit, INV_SQRT2,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reflectance `(3 + sqrt3)/6` that turns the special beam splitter into the
/// optimal symmetric phase-covariant cloner.
pub fn optimal_reflectance() -> f64 {
    (3.0 + 3f64.sqrt()) / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Optimal phase-covariant fidelity for equatorial states.
    pub phase_covariant: f64,
    /// Optimal universal cloner.
    pub universal: f64,
    /// Measure-and-prepare bound for equatorial states.
    pub semi_classical: f64,
}

pub fn theoretical_limits() -> Limits {
    Limits {
        phase_covariant: 0.5 * (1.0 + FRAC_1_SQRT_2),
        universal: 5.0 / 6.0,
        semi_classical: 0.75,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hemisphere {
    North,
    South,
}

/// Optimal symmetric phase-covariant map, applied linearly to the input.
///
/// North: `|0> -> |00>`, `|1> -> (|10> + |01>)/sqrt2`. South swaps `0 <-> 1`.
pub fn ideal_pc_map(input: &Qubit, hemisphere: Hemisphere) -> Ket4 {
    let [alpha, beta] = input.amplitudes();
    match hemisphere {
        Hemisphere::North => [alpha, beta * INV_SQRT2, beta * INV_SQRT2, ZERO],
        Hemisphere::South => [ZERO, alpha * INV_SQRT2, alpha * INV_SQRT2, beta],
    }
}

/// Report for the deterministic ideal map (success probability 1).
pub fn ideal_pc_report(input: &Qubit, hemisphere: Hemisphere) -> Result<CloneReport> {
    CloneReport::from_conditional(*input, &outer4(&ideal_pc_map(input, hemisphere)))
}

/// Fidelities, success probability and clone states of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneReport {
    pub f1: f64,
    pub f2: f64,
    pub p_succ: f64,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    /// Post-selected joint state of both clones.
    pub joint: JointState,
    pub input: Qubit,
}

impl CloneReport {
    /// Builds the report from an unnormalized conditional density matrix whose
    /// trace is the success probability.
    pub fn from_conditional(input: Qubit, sigma: &Matrix4) -> Result<Self> {
        let (joint, p_succ) = JointState::from_unnormalized(sigma).ok_or(Error::NoCoincidence)?;
        let rho1 = reduced_qubit(&joint, Port::Out1)?;
        let rho2 = reduced_qubit(&joint, Port::Out2)?;
        Ok(Self {
            f1: fidelity(&rho1, &input),
            f2: fidelity(&rho2, &input),
            p_succ,
            rho1,
            rho2,
            joint,
            input,
        })
    }

    pub fn mean_fidelity(&self) -> f64 {
        0.5 * (self.f1 + self.f2)
    }
}

/// Rail-dependent loss on one port, e.g. a tilted glass plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlassPlate {
    pub port: Port,
    /// Amplitude transmittance for rail 0.
    pub eta0: f64,
    /// Amplitude transmittance for rail 1.
    pub eta1: f64,
}

impl GlassPlate {
    pub fn transparent(port: Port) -> Self {
        Self {
            port,
            eta0: 1.0,
            eta1: 1.0,
        }
    }

    fn eta(&self, rail: Rail) -> f64 {
        match rail {
            Rail::R0 => self.eta0,
            Rail::R1 => self.eta1,
        }
    }
}

fn default_t1_sign() -> f64 {
    -1.0
}

/// Unbalanced beam splitter with different reflectances for the two rails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialBsParams {
    /// Intensity reflectance for rail 0.
    pub r0: f64,
    /// Intensity reflectance for rail 1; `None` means `1 - r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    /// Sign of the rail-1 transmittance amplitude (`-1` gives `r0 r1 = -t0 t1`).
    #[serde(default = "default_t1_sign")]
    pub t1_sign: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate: Option<GlassPlate>,
}

impl SpecialBsParams {
    pub fn ideal() -> Self {
        Self::with_reflectance(optimal_reflectance())
    }

    pub fn with_reflectance(r0: f64) -> Self {
        Self {
            r0,
            r1: None,
            t1_sign: -1.0,
            plate: None,
        }
    }

    pub fn r1_intensity(&self) -> f64 {
        self.r1.unwrap_or(1.0 - self.r0)
    }

    /// Signed amplitudes `(r0, t0, r1, t1)`.
    pub fn amplitudes(&self) -> RailAmplitudes {
        let r1 = self.r1_intensity();
        RailAmplitudes {
            r0: self.r0.sqrt(),
            t0: (1.0 - self.r0).sqrt(),
            r1: r1.sqrt(),
            t1: self.t1_sign * (1.0 - r1).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("r0", self.r0, 0.0, 1.0)?;
        check_range("r1", self.r1_intensity(), 0.0, 1.0)?;
        if self.t1_sign != 1.0 && self.t1_sign != -1.0 {
            return Err(Error::OutOfRange {
                field: "t1_sign".into(),
                value: self.t1_sign,
                expected: "+1 or -1".into(),
            });
        }
        if let Some(plate) = &self.plate {
            check_range("plate.eta0", plate.eta0, 0.0, 1.0)?;
            check_range("plate.eta1", plate.eta1, 0.0, 1.0)?;
        }
        Ok(())
    }
}

/// Signed real amplitudes of a rail-dependent lossless coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RailAmplitudes {
    pub r0: f64,
    pub t0: f64,
    pub r1: f64,
    pub t1: f64,
}

impl RailAmplitudes {
    pub fn balanced() -> Self {
        Self {
            r0: FRAC_1_SQRT_2,
            t0: FRAC_1_SQRT_2,
            r1: FRAC_1_SQRT_2,
            t1: FRAC_1_SQRT_2,
        }
    }

    fn get(&self, rail: Rail) -> (f64, f64) {
        match rail {
            Rail::R0 => (self.r0, self.t0),
            Rail::R1 => (self.r1, self.t1),
        }
    }
}

/// Mach-Zehnder emulation of the special beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachZehnderParams {
    /// Arm phase difference for rail 0 (V polarization), radians.
    pub theta_v: f64,
    /// Arm phase difference for rail 1 (H polarization), radians.
    pub theta_h: f64,
    /// Residual rail-dependent phases picked up in output `out2`, radians.
    #[serde(default)]
    pub phase_offsets: [f64; 2],
}

impl MachZehnderParams {
    /// Arm phases reproducing the optimal special beam splitter, with the
    /// required relative sign carried by `theta_h` in `(pi/2, pi)`.
    pub fn ideal() -> Self {
        let r = optimal_reflectance();
        Self {
            theta_v: r.sqrt().asin(),
            theta_h: PI - (1.0 - r).sqrt().asin(),
            phase_offsets: [0.0, 0.0],
        }
    }

    /// `r_j = sin(theta_j)`, `t_j = cos(theta_j)` after adding a common arm drift.
    pub fn amplitudes(&self, drift: f64) -> RailAmplitudes {
        let (v, h) = (self.theta_v + drift, self.theta_h + drift);
        RailAmplitudes {
            r0: v.sin(),
            t0: v.cos(),
            r1: h.sin(),
            t1: h.cos(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("theta_v", self.theta_v),
            ("theta_h", self.theta_h),
            ("phase_offsets[0]", self.phase_offsets[0]),
            ("phase_offsets[1]", self.phase_offsets[1]),
        ] {
            check_range(field, v, -2.0 * PI, 2.0 * PI)?;
        }
        Ok(())
    }
}

/// Effective intensity reflectances `(R_V, R_H)` of a balanced Mach-Zehnder
/// interferometer with arm phase differences `theta_v`, `theta_h`.
pub fn mz_splitting(theta_v: f64, theta_h: f64) -> (f64, f64) {
    (theta_v.sin().powi(2), theta_h.sin().powi(2))
}

/// A lossless coupler given by its reflection amplitude; the transmission
/// amplitude defaults to `sqrt(1 - r^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupler {
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl Coupler {
    pub fn balanced() -> Self {
        Self {
            r: FRAC_1_SQRT_2,
            t: None,
        }
    }

    pub fn from_amplitudes(r: f64, t: f64) -> Self {
        Self { r, t: Some(t) }
    }

    pub fn t(&self) -> f64 {
        self.t.unwrap_or_else(|| (1.0 - self.r * self.r).max(0.0).sqrt())
    }

    fn validate(&self, field: &str) -> Result<()> {
        check_range(&format!("{field}.r"), self.r, -1.0, 1.0)?;
        let t = self.t();
        check_range(&format!("{field}.t"), t, -1.0, 1.0)?;
        let sum = self.r * self.r + t * t;
        if (sum - 1.0).abs() > crate::fock::UNITARY_TOL {
            return Err(Error::OutOfRange {
                field: field.to_string(),
                value: sum,
                expected: "r^2 + t^2 = 1 (lossless)".into(),
            });
        }
        Ok(())
    }
}

/// Bunching on a balanced coupler, rail filter, then splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridParams {
    #[serde(default = "Coupler::balanced")]
    pub bs1: Coupler,
    #[serde(default = "Coupler::balanced")]
    pub bs2_rail0: Coupler,
    #[serde(default = "Coupler::balanced")]
    pub bs2_rail1: Coupler,
    /// Filter amplitude transmittances before the splitter.
    pub eta0: f64,
    pub eta1: f64,
    /// Compensation plate on the transmitted output (clone 1).
    #[serde(default = "one")]
    pub nu0: f64,
    #[serde(default = "one")]
    pub nu1: f64,
}

fn one() -> f64 {
    1.0
}

impl HybridParams {
    pub fn ideal() -> Self {
        Self {
            bs1: Coupler::balanced(),
            bs2_rail0: Coupler::balanced(),
            bs2_rail1: Coupler::balanced(),
            eta0: FRAC_1_SQRT_2,
            eta1: 1.0,
            nu0: 1.0,
            nu1: 1.0,
        }
    }

    /// Filter removed: the plain bunching (universal) cloner.
    pub fn universal() -> Self {
        Self {
            eta0: 1.0,
            eta1: 1.0,
            ..Self::ideal()
        }
    }

    pub fn bs2(&self) -> RailAmplitudes {
        RailAmplitudes {
            r0: self.bs2_rail0.r,
            t0: self.bs2_rail0.t(),
            r1: self.bs2_rail1.r,
            t1: self.bs2_rail1.t(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bs1.validate("bs1")?;
        self.bs2_rail0.validate("bs2_rail0")?;
        self.bs2_rail1.validate("bs2_rail1")?;
        for (field, v) in [
            ("eta0", self.eta0),
            ("eta1", self.eta1),
            ("nu0", self.nu0),
            ("nu1", self.nu1),
        ] {
            check_range(field, v, 0.0, 1.0)?;
        }
        Ok(())
    }
}

fn half_pair() -> [f64; 2] {
    [0.5, 0.5]
}

/// All-fiber dual-rail cloner: one variable-ratio coupler per rail, plus a
/// detection block (phase modulator and coupler) per clone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberParams {
    /// Intensity coupling ratio of the rail-0 coupler.
    pub r_vrc0: f64,
    /// Intensity coupling ratio of the rail-1 coupler.
    pub r_vrc1: f64,
    /// Phase-modulator settings of the two detection blocks; `None` matches
    /// them to the input phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis_phases: Option<[f64; 2]>,
    /// Intensity reflectances of the detection-block couplers.
    #[serde(default = "half_pair")]
    pub detection_ratios: [f64; 2],
}

impl FiberParams {
    pub fn ideal() -> Self {
        let r = optimal_reflectance();
        Self::with_ratios(r, 1.0 - r)
    }

    /// The 79:21 / 21:79 setting used in practice.
    pub fn experimental() -> Self {
        Self::with_ratios(0.79, 0.21)
    }

    pub fn with_ratios(r_vrc0: f64, r_vrc1: f64) -> Self {
        Self {
            r_vrc0,
            r_vrc1,
            analysis_phases: None,
            detection_ratios: [0.5, 0.5],
        }
    }

    pub fn amplitudes(&self) -> RailAmplitudes {
        RailAmplitudes {
            r0: self.r_vrc0.sqrt(),
            t0: (1.0 - self.r_vrc0).sqrt(),
            r1: self.r_vrc1.sqrt(),
            t1: -(1.0 - self.r_vrc1).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("r_vrc0", self.r_vrc0, 0.0, 1.0)?;
        check_range("r_vrc1", self.r_vrc1, 0.0, 1.0)?;
        if let Some([a, b]) = self.analysis_phases {
            check_range("analysis_phases[0]", a, -2.0 * PI, 2.0 * PI)?;
            check_range("analysis_phases[1]", b, -2.0 * PI, 2.0 * PI)?;
        }
        check_range("detection_ratios[0]", self.detection_ratios[0], 0.0, 1.0)?;
        check_range("detection_ratios[1]", self.detection_ratios[1], 0.0, 1.0)?;
        Ok(())
    }

    /// Analyzer phases actually used for `input`.
    pub fn effective_analysis_phases(&self, input: &Qubit) -> [f64; 2] {
        self.analysis_phases.unwrap_or([input.phi(); 2])
    }

    /// Detector vectors `v` per clone such that the click amplitude is
    /// `<v|clone>`; index `[clone][0]` is `D+`, `[clone][1]` is `D-`.
    pub fn detector_vectors(&self, input: &Qubit) -> [[[Complex64; 2]; 2]; 2] {
        let phases = self.effective_analysis_phases(input);
        let mut out = [[[ZERO; 2]; 2]; 2];
        for clone in 0..2 {
            let r = self.detection_ratios[clone].sqrt();
            let t = (1.0 - self.detection_ratios[clone]).sqrt();
            let e = Complex64::from_polar(1.0, phases[clone]);
            out[clone][0] = [Complex64::new(r, 0.0), e * t];
            out[clone][1] = [Complex64::new(-t, 0.0), e * r];
        }
        out
    }
}

/// Parameters of one cloner architecture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ClonerParams {
    SpecialBs(SpecialBsParams),
    MachZehnder(MachZehnderParams),
    Hybrid(HybridParams),
    Fiber(FiberParams),
}

impl ClonerParams {
    pub fn variant_name(&self) -> &'static str {
        match self {
            ClonerParams::SpecialBs(_) => "special_bs",
            ClonerParams::MachZehnder(_) => "mach_zehnder",
            ClonerParams::Hybrid(_) => "hybrid",
            ClonerParams::Fiber(_) => "fiber",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClonerParams::SpecialBs(p) => p.validate(),
            ClonerParams::MachZehnder(p) => p.validate(),
            ClonerParams::Hybrid(p) => p.validate(),
            ClonerParams::Fiber(p) => p.validate(),
        }
    }

    /// Whether the architecture contains an interferometer that drifts.
    pub fn is_phase_sensitive(&self) -> bool {
        matches!(self, ClonerParams::MachZehnder(_) | ClonerParams::Fiber(_))
    }

    /// Post-selected rail amplitudes (unnormalized; squared norm = success probability).
    ///
    /// `phase_error` is an interferometer drift, see [`is_phase_sensitive`](Self::is_phase_sensitive).
    pub fn closed_form(&self, input: &Qubit, phase_error: f64) -> Result<Ket4> {
        self.validate()?;
        let [alpha, beta] = input.amplitudes();
        let ket = match self {
            ClonerParams::SpecialBs(p) => {
                let plate = p.plate;
                special_bs_amplitudes(alpha, beta, &p.amplitudes(), |port, rail| {
                    let eta = plate
                        .filter(|pl| pl.port == port)
                        .map_or(1.0, |pl| pl.eta(rail));
                    Complex64::new(eta, 0.0)
                })
            }
            ClonerParams::MachZehnder(p) => {
                let offsets = p.phase_offsets;
                special_bs_amplitudes(alpha, beta, &p.amplitudes(phase_error), |port, rail| {
                    match port {
                        Port::Out1 => Complex64::new(1.0, 0.0),
                        Port::Out2 => Complex64::from_polar(1.0, offsets[rail.index()]),
                    }
                })
            }
            ClonerParams::Fiber(p) => {
                special_bs_amplitudes(alpha, beta, &p.amplitudes(), |_, rail| match rail {
                    Rail::R0 => Complex64::new(1.0, 0.0),
                    Rail::R1 => Complex64::from_polar(1.0, phase_error),
                })
            }
            ClonerParams::Hybrid(p) => {
                let (r, t) = (p.bs1.r, p.bs1.t());
                let b2 = p.bs2();
                let rt = r * t;
                [
                    alpha * (2.0 * rt * p.eta0 * p.eta0 * b2.t0 * p.nu0 * b2.r0),
                    beta * (rt * p.eta0 * p.eta1 * b2.t0 * p.nu0 * b2.r1),
                    beta * (rt * p.eta0 * p.eta1 * b2.t1 * p.nu1 * b2.r0),
                    ZERO,
                ]
            }
        };
        Ok(ket)
    }

    /// Full two-photon circuit up to (not including) post-selection.
    ///
    /// The ancilla occupies the temporal mode `overlap * principal +
    /// sqrt(1 - overlap^2) * orthogonal`; the signal is purely principal.
    pub fn circuit(&self, input: &Qubit, overlap: f64, phase_error: f64) -> Result<StateVector> {
        self.validate()?;
        check_range("overlap_m", overlap, 0.0, 1.0)?;
        let [alpha, beta] = input.amplitudes();
        let signal = Photon::from_terms(&[
            (Mode::principal(Port::Out1, Rail::R0), alpha),
            (Mode::principal(Port::Out1, Rail::R1), beta),
        ]);
        let ancilla = Photon::from_terms(&[
            (
                Mode::principal(Port::Out2, Rail::R0),
                Complex64::new(overlap, 0.0),
            ),
            (
                Mode::new(Port::Out2, Rail::R0, TemporalBin::Orthogonal),
                Complex64::new((1.0 - overlap * overlap).max(0.0).sqrt(), 0.0),
            ),
        ]);
        let mut state = StateVector::two_photon(&signal, &ancilla);

        match self {
            ClonerParams::SpecialBs(p) => {
                state = rail_coupler(state, &p.amplitudes())?;
                if let Some(plate) = p.plate {
                    for (rail, bin) in rails_and_bins() {
                        state = state
                            .apply_attenuator(Mode::new(plate.port, rail, bin), plate.eta(rail))?;
                    }
                }
            }
            ClonerParams::MachZehnder(p) => {
                state = rail_coupler(state, &p.amplitudes(phase_error))?;
                for (rail, bin) in rails_and_bins() {
                    state = state.apply_phase(
                        Mode::new(Port::Out2, rail, bin),
                        p.phase_offsets[rail.index()],
                    );
                }
            }
            ClonerParams::Fiber(p) => {
                state = rail_coupler(state, &p.amplitudes())?;
                for port in Port::ALL {
                    for bin in TemporalBin::ALL {
                        state = state.apply_phase(Mode::new(port, Rail::R1, bin), phase_error);
                    }
                }
            }
            ClonerParams::Hybrid(p) => {
                let (r, t) = (p.bs1.r, p.bs1.t());
                for (rail, bin) in rails_and_bins() {
                    state = state.apply_two_mode_coupler(
                        Mode::new(Port::Out1, rail, bin),
                        Mode::new(Port::Out2, rail, bin),
                        r,
                        t,
                    )?;
                }
                // Only the bunched pair in out2 continues to the filter.
                state = state.block_port(Port::Out1);
                let b2 = p.bs2();
                for (rail, bin) in rails_and_bins() {
                    let eta = [p.eta0, p.eta1][rail.index()];
                    state = state.apply_attenuator(Mode::new(Port::Out2, rail, bin), eta)?;
                }
                for (rail, bin) in rails_and_bins() {
                    let (rr, tt) = b2.get(rail);
                    // Transmitted light goes to out1 (clone 1).
                    state = state.apply_two_mode_coupler(
                        Mode::new(Port::Out2, rail, bin),
                        Mode::new(Port::Out1, rail, bin),
                        rr,
                        tt,
                    )?;
                }
                for (rail, bin) in rails_and_bins() {
                    let nu = [p.nu0, p.nu1][rail.index()];
                    state = state.apply_attenuator(Mode::new(Port::Out1, rail, bin), nu)?;
                }
            }
        }
        Ok(state)
    }

    /// Fiber circuit followed by both detection blocks. Afterwards rail 0 of
    /// each port is detector `D+` and rail 1 is `D-`.
    pub fn fiber_detection_circuit(
        &self,
        input: &Qubit,
        overlap: f64,
        phase_error: f64,
    ) -> Result<StateVector> {
        let ClonerParams::Fiber(p) = self else {
            return Err(Error::Invalid(format!(
                "detection blocks exist only on the fiber model, not {}",
                self.variant_name()
            )));
        };
        let phases = p.effective_analysis_phases(input);
        let mut state = self.circuit(input, overlap, phase_error)?;
        for (idx, port) in Port::ALL.into_iter().enumerate() {
            let r = p.detection_ratios[idx].sqrt();
            let t = (1.0 - p.detection_ratios[idx]).sqrt();
            for bin in TemporalBin::ALL {
                let m1 = Mode::new(port, Rail::R1, bin);
                state = state
                    .apply_phase(m1, -phases[idx])
                    .apply_two_mode_coupler(m1, Mode::new(port, Rail::R0, bin), r, t)?;
            }
        }
        Ok(state)
    }

    /// Unnormalized conditional density matrix of the clones.
    ///
    /// Uses the closed form when the photons are indistinguishable and the
    /// circuit otherwise.
    pub fn conditional_density(
        &self,
        input: &Qubit,
        overlap: f64,
        phase_error: f64,
    ) -> Result<Matrix4> {
        if overlap == 1.0 {
            Ok(outer4(&self.closed_form(input, phase_error)?))
        } else {
            Ok(postselect_coincidence(&self.circuit(input, overlap, phase_error)?).density())
        }
    }

    /// Noiseless evaluation through the closed form.
    pub fn run(&self, input: &Qubit) -> Result<CloneReport> {
        CloneReport::from_conditional(*input, &outer4(&self.closed_form(input, 0.0)?))
    }

    /// Noiseless evaluation through the Fock circuit.
    pub fn run_circuit(&self, input: &Qubit) -> Result<CloneReport> {
        let post = postselect_coincidence(&self.circuit(input, 1.0, 0.0)?);
        CloneReport::from_conditional(*input, &post.density())
    }
}

pub fn run_special_bs(params: &SpecialBsParams, input: &Qubit) -> Result<CloneReport> {
    ClonerParams::SpecialBs(*params).run(input)
}

pub fn run_mach_zehnder(params: &MachZehnderParams, input: &Qubit) -> Result<CloneReport> {
    ClonerParams::MachZehnder(*params).run(input)
}

pub fn run_hybrid(params: &HybridParams, input: &Qubit) -> Result<CloneReport> {
    ClonerParams::Hybrid(*params).run(input)
}

pub fn run_fiber(params: &FiberParams, input: &Qubit) -> Result<CloneReport> {
    ClonerParams::Fiber(*params).run(input)
}

/// Post-selected amplitudes of two-photon interference on a rail-dependent
/// coupler, signal `alpha|0> + beta|1>` against an ancilla in `|0>`.
///
/// `gain(port, rail)` multiplies each outgoing photon (plates, phases).
fn special_bs_amplitudes(
    alpha: Complex64,
    beta: Complex64,
    amp: &RailAmplitudes,
    gain: impl Fn(Port, Rail) -> Complex64,
) -> Ket4 {
    let g10 = gain(Port::Out1, Rail::R0);
    let g11 = gain(Port::Out1, Rail::R1);
    let g20 = gain(Port::Out2, Rail::R0);
    let g21 = gain(Port::Out2, Rail::R1);
    [
        alpha * (amp.r0 * amp.r0 - amp.t0 * amp.t0) * g10 * g20,
        -beta * (amp.t0 * amp.t1) * g10 * g21,
        beta * (amp.r0 * amp.r1) * g11 * g20,
        ZERO,
    ]
}

fn rail_coupler(mut state: StateVector, amp: &RailAmplitudes) -> Result<StateVector> {
    for (rail, bin) in rails_and_bins() {
        let (r, t) = amp.get(rail);
        state = state.apply_two_mode_coupler(
            Mode::new(Port::Out1, rail, bin),
            Mode::new(Port::Out2, rail, bin),
            r,
            t,
        )?;
    }
    Ok(state)
}

fn rails_and_bins() -> impl Iterator<Item = (Rail, TemporalBin)> {
    Rail::ALL
        .into_iter()
        .flat_map(|r| TemporalBin::ALL.into_iter().map(move |b| (r, b)))
}

/// A single tunable scalar of a [`ClonerParams`], addressed by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    R0,
    R1,
    PlateEta0,
    PlateEta1,
    ThetaV,
    ThetaH,
    PhaseOffset0,
    PhaseOffset1,
    Bs1R,
    Eta0,
    Eta1,
    Nu0,
    Nu1,
    RVrc0,
    RVrc1,
    DetectionRatio1,
    DetectionRatio2,
}

impl Knob {
    pub fn name(self) -> &'static str {
        match self {
            Knob::R0 => "r0",
            Knob::R1 => "r1",
            Knob::PlateEta0 => "plate_eta0",
            Knob::PlateEta1 => "plate_eta1",
            Knob::ThetaV => "theta_v",
            Knob::ThetaH => "theta_h",
            Knob::PhaseOffset0 => "phase_offset0",
            Knob::PhaseOffset1 => "phase_offset1",
            Knob::Bs1R => "bs1_r",
            Knob::Eta0 => "eta0",
            Knob::Eta1 => "eta1",
            Knob::Nu0 => "nu0",
            Knob::Nu1 => "nu1",
            Knob::RVrc0 => "r_vrc0",
            Knob::RVrc1 => "r_vrc1",
            Knob::DetectionRatio1 => "detection_ratio1",
            Knob::DetectionRatio2 => "detection_ratio2",
        }
    }
}

impl std::str::FromStr for Knob {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::UnknownKnob(s.to_string()))
    }
}

impl ClonerParams {
    pub fn knob(&self, knob: Knob) -> Result<f64> {
        let v = match (self, knob) {
            (ClonerParams::SpecialBs(p), Knob::R0) => p.r0,
            (ClonerParams::SpecialBs(p), Knob::R1) => p.r1_intensity(),
            (ClonerParams::SpecialBs(p), Knob::PlateEta0) => p.plate.map_or(1.0, |pl| pl.eta0),
            (ClonerParams::SpecialBs(p), Knob::PlateEta1) => p.plate.map_or(1.0, |pl| pl.eta1),
            (ClonerParams::MachZehnder(p), Knob::ThetaV) => p.theta_v,
            (ClonerParams::MachZehnder(p), Knob::ThetaH) => p.theta_h,
            (ClonerParams::MachZehnder(p), Knob::PhaseOffset0) => p.phase_offsets[0],
            (ClonerParams::MachZehnder(p), Knob::PhaseOffset1) => p.phase_offsets[1],
            (ClonerParams::Hybrid(p), Knob::Bs1R) => p.bs1.r,
            (ClonerParams::Hybrid(p), Knob::Eta0) => p.eta0,
            (ClonerParams::Hybrid(p), Knob::Eta1) => p.eta1,
            (ClonerParams::Hybrid(p), Knob::Nu0) => p.nu0,
            (ClonerParams::Hybrid(p), Knob::Nu1) => p.nu1,
            (ClonerParams::Fiber(p), Knob::RVrc0) => p.r_vrc0,
            (ClonerParams::Fiber(p), Knob::RVrc1) => p.r_vrc1,
            (ClonerParams::Fiber(p), Knob::DetectionRatio1) => p.detection_ratios[0],
            (ClonerParams::Fiber(p), Knob::DetectionRatio2) => p.detection_ratios[1],
            _ => return Err(self.mismatch(knob)),
        };
        Ok(v)
    }

    /// Copy with one knob changed. Setting a plate knob on a model without a
    /// plate inserts a transparent plate on `out1`.
    pub fn with_knob(&self, knob: Knob, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out, knob) {
            (ClonerParams::SpecialBs(p), Knob::R0) => p.r0 = value,
            (ClonerParams::SpecialBs(p), Knob::R1) => p.r1 = Some(value),
            (ClonerParams::SpecialBs(p), Knob::PlateEta0) => {
                p.plate
                    .get_or_insert(GlassPlate::transparent(Port::Out1))
                    .eta0 = value
            }
            (ClonerParams::SpecialBs(p), Knob::PlateEta1) => {
                p.plate
                    .get_or_insert(GlassPlate::transparent(Port::Out1))
                    .eta1 = value
            }
            (ClonerParams::MachZehnder(p), Knob::ThetaV) => p.theta_v = value,
            (ClonerParams::MachZehnder(p), Knob::ThetaH) => p.theta_h = value,
            (ClonerParams::MachZehnder(p), Knob::PhaseOffset0) => p.phase_offsets[0] = value,
            (ClonerParams::MachZehnder(p), Knob::PhaseOffset1) => p.phase_offsets[1] = value,
            (ClonerParams::Hybrid(p), Knob::Bs1R) => p.bs1 = Coupler { r: value, t: None },
            (ClonerParams::Hybrid(p), Knob::Eta0) => p.eta0 = value,
            (ClonerParams::Hybrid(p), Knob::Eta1) => p.eta1 = value,
            (ClonerParams::Hybrid(p), Knob::Nu0) => p.nu0 = value,
            (ClonerParams::Hybrid(p), Knob::Nu1) => p.nu1 = value,
            (ClonerParams::Fiber(p), Knob::RVrc0) => p.r_vrc0 = value,
            (ClonerParams::Fiber(p), Knob::RVrc1) => p.r_vrc1 = value,
            (ClonerParams::Fiber(p), Knob::DetectionRatio1) => p.detection_ratios[0] = value,
            (ClonerParams::Fiber(p), Knob::DetectionRatio2) => p.detection_ratios[1] = value,
            _ => return Err(self.mismatch(knob)),
        }
        Ok(out)
    }

    fn mismatch(&self, knob: Knob) -> Error {
        Error::KnobMismatch {
            knob: knob.name().to_string(),
            variant: self.variant_name().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F_PC: f64 = 0.853_553_390_593_273_7;

    fn eq() -> Qubit {
        Qubit::equatorial(0.0)
    }

    #[test]
    fn ideal_map_basis_states() {
        let k = ideal_pc_map(&Qubit::zero(), Hemisphere::North);
        assert!((k[0] - 1.0).norm() < 1e-15);
        let k = ideal_pc_map(&Qubit::one(), Hemisphere::North);
        assert!((k[1] - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((k[2] - FRAC_1_SQRT_2).norm() < 1e-15);
        let r = ideal_pc_report(&eq(), Hemisphere::North).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12 && (r.f2 - F_PC).abs() < 1e-12);
        assert!((r.p_succ - 1.0).abs() < 1e-12);
    }

    #[test]
    fn limits() {
        let l = theoretical_limits();
        assert!((l.phase_covariant - F_PC).abs() < 1e-15);
        assert!((l.universal - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(l.semi_classical, 0.75);
    }

    #[test]
    fn special_bs_optimum() {
        let r = run_special_bs(&SpecialBsParams::ideal(), &eq()).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12);
        assert!((r.f2 - F_PC).abs() < 1e-12);
        assert!((r.p_succ - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn special_bs_off_optimum() {
        // a = 0.5, b = sqrt(0.1875): F = 1/2 + ab/(a^2 + 2b^2), P = (a^2 + 2b^2)/2
        let r = run_special_bs(&SpecialBsParams::with_reflectance(0.75), &eq()).unwrap();
        assert!((r.f1 - 0.846_410_161_513_775_5).abs() < 1e-12);
        assert!((r.f2 - 0.846_410_161_513_775_5).abs() < 1e-12);
        assert!((r.p_succ - 0.3125).abs() < 1e-12);
    }

    #[test]
    fn special_bs_pole() {
        for r0 in [0.6, 0.75, optimal_reflectance(), 0.95] {
            let r = run_special_bs(&SpecialBsParams::with_reflectance(r0), &Qubit::zero()).unwrap();
            assert!((r.f1 - 1.0).abs() < 1e-12 && (r.f2 - 1.0).abs() < 1e-12);
            assert!((r.p_succ - (2.0 * r0 - 1.0).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn special_bs_zero_success_is_reported() {
        // R0 = 1/2 kills the |00> branch; the pole input then never succeeds.
        let err = run_special_bs(&SpecialBsParams::with_reflectance(0.5), &Qubit::zero());
        assert_eq!(err.unwrap_err(), Error::NoCoincidence);
    }

    #[test]
    fn special_bs_validation_names_field() {
        let err = run_special_bs(&SpecialBsParams::with_reflectance(1.2), &eq()).unwrap_err();
        assert!(err.to_string().contains("r0"), "{err}");
        let mut p = SpecialBsParams::ideal();
        p.t1_sign = 0.5;
        assert!(run_special_bs(&p, &eq()).is_err());
    }

    #[test]
    fn mz_splitting_values() {
        let (rv, rh) = mz_splitting(PI / 4.0, PI / 2.0);
        assert!((rv - 0.5).abs() < 1e-15);
        assert!((rh - 1.0).abs() < 1e-15);
        let (rv, _) = mz_splitting(1.093_138_017_732_641_7, 0.0);
        assert!((rv - 0.788_675_134_594_812_8).abs() < 1e-12);
    }

    #[test]
    fn mz_ideal_matches_special_bs() {
        let p = MachZehnderParams::ideal();
        let (rv, rh) = mz_splitting(p.theta_v, p.theta_h);
        assert!((rv - optimal_reflectance()).abs() < 1e-12);
        assert!((rh - (1.0 - optimal_reflectance())).abs() < 1e-12);
        let r = run_mach_zehnder(&p, &eq()).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12 && (r.f2 - F_PC).abs() < 1e-12);
        assert!((r.p_succ - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mz_phase_offset_degrades_clone_two() {
        let mut p = MachZehnderParams::ideal();
        p.phase_offsets = [0.0, 0.4];
        let r = run_mach_zehnder(&p, &eq()).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12);
        assert!(r.f2 < F_PC - 1e-3);
    }

    #[test]
    fn hybrid_ideal_and_universal() {
        let r = run_hybrid(&HybridParams::ideal(), &eq()).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12 && (r.f2 - F_PC).abs() < 1e-12);
        assert!((r.p_succ - 1.0 / 16.0).abs() < 1e-12);
        let u = run_hybrid(&HybridParams::universal(), &eq()).unwrap();
        assert!((u.f1 - 5.0 / 6.0).abs() < 1e-12 && (u.f2 - 5.0 / 6.0).abs() < 1e-12);
        let pole = run_hybrid(&HybridParams::ideal(), &Qubit::zero()).unwrap();
        assert!((pole.f1 - 1.0).abs() < 1e-12 && (pole.f2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fiber_settings() {
        let r = run_fiber(&FiberParams::ideal(), &eq()).unwrap();
        assert!((r.f1 - F_PC).abs() < 1e-12);
        assert!((r.p_succ - 1.0 / 3.0).abs() < 1e-12);
        // a = 0.58, b = sqrt(0.79 * 0.21)
        let r = run_fiber(&FiberParams::experimental(), &eq()).unwrap();
        assert!((r.f1 - 0.853_545_012_737_547_2).abs() < 1e-12);
        assert!((r.f2 - 0.853_545_012_737_547_2).abs() < 1e-12);
        assert!((r.p_succ - 0.3341).abs() < 1e-12);
    }

    #[test]
    fn fiber_detection_only_on_fiber() {
        let p = ClonerParams::SpecialBs(SpecialBsParams::ideal());
        assert!(p.fiber_detection_circuit(&eq(), 1.0, 0.0).is_err());
    }

    #[test]
    fn knobs_roundtrip_and_mismatch() {
        let p = ClonerParams::SpecialBs(SpecialBsParams::ideal());
        let q = p.with_knob(Knob::PlateEta1, 0.9).unwrap();
        assert_eq!(q.knob(Knob::PlateEta1).unwrap(), 0.9);
        assert_eq!(q.knob(Knob::PlateEta0).unwrap(), 1.0);
        assert!(matches!(p.knob(Knob::Eta0), Err(Error::KnobMismatch { .. })));
        assert_eq!("r_vrc0".parse::<Knob>().unwrap(), Knob::RVrc0);
        assert!("bogus".parse::<Knob>().is_err());
    }

    #[test]
    fn params_json_shape() {
        let p: ClonerParams =
            serde_json::from_str(r#"{"variant":"special_bs","r0":0.8,"r1":0.25}"#).unwrap();
        assert_eq!(p.knob(Knob::R1).unwrap(), 0.25);
        assert!(
            serde_json::from_str::<ClonerParams>(r#"{"variant":"special_bs","r0":0.8,"rr":1}"#)
                .is_err()
        );
        let h: ClonerParams =
            serde_json::from_str(r#"{"variant":"hybrid","eta0":0.7071067811865476,"eta1":1}"#)
                .unwrap();
        assert!(h.validate().is_ok());
        let back: ClonerParams = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        assert_eq!(back, h);
    }

    fn all_models() -> Vec<ClonerParams> {
        let mut plated = SpecialBsParams::with_reflectance(0.8);
        plated.r1 = Some(0.25);
        plated.plate = Some(GlassPlate {
            port: Port::Out2,
            eta0: 0.9,
            eta1: 0.7,
        });
        let mut mz = MachZehnderParams::ideal();
        mz.phase_offsets = [0.3, -0.2];
        let mut hy = HybridParams::ideal();
        hy.bs2_rail0 = Coupler { r: 0.6, t: None };
        hy.bs2_rail1 = Coupler::from_amplitudes(0.8, -0.6);
        hy.nu1 = 0.9;
        vec![
            ClonerParams::SpecialBs(plated),
            ClonerParams::MachZehnder(mz),
            ClonerParams::Hybrid(hy),
            ClonerParams::Fiber(FiberParams::experimental()),
        ]
    }

    #[test]
    fn circuit_matches_closed_form() {
        let input = Qubit::new(1.1, 2.3).unwrap();
        for model in all_models() {
            for drift in [0.0, 0.17] {
                let ket = model.closed_form(&input, drift).unwrap();
                let post = postselect_coincidence(&model.circuit(&input, 1.0, drift).unwrap());
                let a = outer4(&ket);
                let b = post.density();
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((a[i][j] - b[i][j]).norm() < 1e-12, "{}", model.variant_name());
                    }
                }
            }
        }
    }

    #[test]
    fn detection_circuit_matches_projectors() {
        let mut p = FiberParams::experimental();
        p.analysis_phases = Some([0.4, 1.9]);
        p.detection_ratios = [0.45, 0.52];
        let model = ClonerParams::Fiber(p);
        let input = Qubit::equatorial(0.7);
        let joint = model.run(&input).unwrap();
        let v = p.detector_vectors(&input);
        let post = postselect_coincidence(&model.fiber_detection_circuit(&input, 1.0, 0.0).unwrap());
        for a in 0..2 {
            for b in 0..2 {
                let direct = joint.joint.project(&v[0][a], &v[1][b]) * joint.p_succ;
                let circ = post.density()[2 * a + b][2 * a + b].re;
                assert!((direct - circ).abs() < 1e-12);
            }
        }
    }
}
