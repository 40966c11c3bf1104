//! Two-photon Fock-space simulation over eight optical modes.
//!
//! A mode is the triple (port, rail, temporal bin). Modes are numbered
//! lexicographically: `index = 4 * port + 2 * rail + temporal`. States live
//! on the 36 two-photon occupation patterns of those modes, stored densely.
//!
//! Linear elements act on creation operators, `a_i^dag -> sum_k U[k][i] a_k^dag`.
//! Internally a two-photon state is kept as the symmetric coefficient tensor
//! `T` of `sum_ij T[i][j] a_i^dag a_j^dag |vac>`, so every element is `T -> U T U^T`.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::qubit::{add4, outer4, zero4, JointState, Ket4, Matrix4};

pub const MODE_COUNT: usize = 8;
/// Number of two-photon basis states over [`MODE_COUNT`] modes.
pub const DIM: usize = MODE_COUNT * (MODE_COUNT + 1) / 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Lossless-coupler tolerance on `r^2 + t^2 - 1`.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    Out1,
    Out2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rail {
    R0,
    R1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalBin {
    Principal,
    Orthogonal,
}

impl Port {
    pub const ALL: [Port; 2] = [Port::Out1, Port::Out2];

    pub fn other(self) -> Port {
        match self {
            Port::Out1 => Port::Out2,
            Port::Out2 => Port::Out1,
        }
    }
}

impl Rail {
    pub const ALL: [Rail; 2] = [Rail::R0, Rail::R1];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl TemporalBin {
    pub const ALL: [TemporalBin; 2] = [TemporalBin::Principal, TemporalBin::Orthogonal];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub port: Port,
    pub rail: Rail,
    pub temporal: TemporalBin,
}

impl Mode {
    pub const fn new(port: Port, rail: Rail, temporal: TemporalBin) -> Self {
        Self {
            port,
            rail,
            temporal,
        }
    }

    /// Principal-bin mode, the common case.
    pub const fn principal(port: Port, rail: Rail) -> Self {
        Self::new(port, rail, TemporalBin::Principal)
    }

    pub fn index(self) -> usize {
        4 * self.port as usize + 2 * self.rail as usize + self.temporal as usize
    }

    pub fn from_index(index: usize) -> Mode {
        assert!(index < MODE_COUNT, "mode index {index} out of range");
        let port = if index & 4 == 0 { Port::Out1 } else { Port::Out2 };
        let rail = if index & 2 == 0 { Rail::R0 } else { Rail::R1 };
        let temporal = if index & 1 == 0 {
            TemporalBin::Principal
        } else {
            TemporalBin::Orthogonal
        };
        Mode::new(port, rail, temporal)
    }

    /// All eight modes in canonical order.
    pub fn all() -> impl Iterator<Item = Mode> {
        (0..MODE_COUNT).map(Mode::from_index)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let port = match self.port {
            Port::Out1 => "out1",
            Port::Out2 => "out2",
        };
        let rail = match self.rail {
            Rail::R0 => "r0",
            Rail::R1 => "r1",
        };
        let bin = match self.temporal {
            TemporalBin::Principal => "p",
            TemporalBin::Orthogonal => "o",
        };
        write!(f, "{port}.{rail}.{bin}")
    }
}

/// Occupation numbers of each mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub occupations: Vec<u8>,
}

impl BasisState {
    pub fn photon_count(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for n in &self.occupations {
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// All two-photon occupation patterns over `mode_count` modes.
///
/// Ordered by the sorted pair of occupied mode indices `(i, j)`, `i <= j`,
/// lexicographically. This is the same order [`StateVector`] stores amplitudes in.
pub fn enumerate_basis(photon_count: usize, mode_count: usize) -> Result<Vec<BasisState>> {
    if photon_count != 2 {
        return Err(Error::UnsupportedPhotonCount(photon_count));
    }
    if mode_count == 0 || mode_count > MODE_COUNT {
        return Err(Error::UnsupportedModeCount(mode_count));
    }
    let mut out = Vec::with_capacity(mode_count * (mode_count + 1) / 2);
    for i in 0..mode_count {
        for j in i..mode_count {
            let mut occupations = vec![0u8; mode_count];
            occupations[i] += 1;
            occupations[j] += 1;
            out.push(BasisState { occupations });
        }
    }
    Ok(out)
}

/// Position of the pattern with photons in modes `i <= j`.
#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < MODE_COUNT);
    i * (2 * MODE_COUNT - i + 1) / 2 + (j - i)
}

/// Single-photon amplitudes over the eight modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photon {
    amps: [Complex64; MODE_COUNT],
}

impl Photon {
    pub fn in_mode(mode: Mode) -> Self {
        let mut amps = [ZERO; MODE_COUNT];
        amps[mode.index()] = ONE;
        Self { amps }
    }

    pub fn from_terms(terms: &[(Mode, Complex64)]) -> Self {
        let mut amps = [ZERO; MODE_COUNT];
        for &(mode, amp) in terms {
            amps[mode.index()] += amp;
        }
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; MODE_COUNT] {
        &self.amps
    }
}

/// Single-photon mode map, `map[out][in]`.
pub type ModeMap = [[Complex64; MODE_COUNT]; MODE_COUNT];

/// Dense two-photon state over the 36-pattern basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: [Complex64; DIM],
}

impl StateVector {
    /// `A^dag B^dag |vac>` for two single-photon wavefunctions.
    ///
    /// Unit norm when the photons are orthogonal; otherwise the squared norm
    /// is `1 + |<a|b>|^2`.
    pub fn two_photon(a: &Photon, b: &Photon) -> Self {
        let mut t = [[ZERO; MODE_COUNT]; MODE_COUNT];
        for i in 0..MODE_COUNT {
            for j in 0..MODE_COUNT {
                t[i][j] = (a.amps[i] * b.amps[j] + a.amps[j] * b.amps[i]) * 0.5;
            }
        }
        Self::from_tensor(&t)
    }

    /// Builds a state directly from basis amplitudes in canonical order.
    pub fn from_amplitudes(amps: [Complex64; DIM]) -> Result<Self> {
        if amps.iter().any(|z| !z.is_finite()) {
            return Err(Error::Invalid("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amps
    }

    /// Amplitude of the pattern with one photon in each of `a` and `b` (or two in `a` when equal).
    pub fn amplitude(&self, a: Mode, b: Mode) -> Complex64 {
        let (i, j) = ordered(a.index(), b.index());
        self.amps[pair_index(i, j)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn to_tensor(&self) -> ModeMap {
        let mut t = [[ZERO; MODE_COUNT]; MODE_COUNT];
        for i in 0..MODE_COUNT {
            t[i][i] = self.amps[pair_index(i, i)] / SQRT_2;
            for j in i + 1..MODE_COUNT {
                let half = self.amps[pair_index(i, j)] * 0.5;
                t[i][j] = half;
                t[j][i] = half;
            }
        }
        t
    }

    fn from_tensor(t: &ModeMap) -> Self {
        let mut amps = [ZERO; DIM];
        for i in 0..MODE_COUNT {
            amps[pair_index(i, i)] = t[i][i] * SQRT_2;
            for j in i + 1..MODE_COUNT {
                amps[pair_index(i, j)] = t[i][j] + t[j][i];
            }
        }
        Self { amps }
    }

    /// Applies `a_i^dag -> sum_k map[k][i] a_k^dag` to both photons.
    pub fn apply_mode_map(&self, map: &ModeMap) -> Self {
        let t = self.to_tensor();
        // (U T)
        let mut ut = [[ZERO; MODE_COUNT]; MODE_COUNT];
        for k in 0..MODE_COUNT {
            for j in 0..MODE_COUNT {
                let mut acc = ZERO;
                for i in 0..MODE_COUNT {
                    acc += map[k][i] * t[i][j];
                }
                ut[k][j] = acc;
            }
        }
        // (U T) U^T
        let mut out = [[ZERO; MODE_COUNT]; MODE_COUNT];
        for k in 0..MODE_COUNT {
            for l in 0..MODE_COUNT {
                let mut acc = ZERO;
                for j in 0..MODE_COUNT {
                    acc += ut[k][j] * map[l][j];
                }
                out[k][l] = acc;
            }
        }
        Self::from_tensor(&out)
    }

    /// Lossless two-mode coupler with real signed amplitudes:
    /// `a^dag -> r a^dag + t b^dag`, `b^dag -> r b^dag - t a^dag`.
    ///
    /// The inverse coupler is `(r, -t)`.
    pub fn apply_two_mode_coupler(&self, a: Mode, b: Mode, r: f64, t: f64) -> Result<Self> {
        if a == b {
            return Err(Error::CouplerSameMode);
        }
        let sum = r * r + t * t;
        if !sum.is_finite() || (sum - 1.0).abs() > UNITARY_TOL {
            return Err(Error::NonUnitaryCoupler(sum));
        }
        let (ia, ib) = (a.index(), b.index());
        let mut map = identity();
        map[ia][ia] = Complex64::new(r, 0.0);
        map[ib][ia] = Complex64::new(t, 0.0);
        map[ib][ib] = Complex64::new(r, 0.0);
        map[ia][ib] = Complex64::new(-t, 0.0);
        Ok(self.apply_mode_map(&map))
    }

    /// Amplitude attenuation: each pattern is scaled by `eta^n`, `n` the
    /// occupation of `mode`. Absorbed photons are not tracked.
    pub fn apply_attenuator(&self, mode: Mode, transmittance: f64) -> Result<Self> {
        check_range("transmittance", transmittance, 0.0, 1.0)?;
        Ok(self.scale_mode(mode, Complex64::new(transmittance, 0.0)))
    }

    /// Phase shifter `a^dag -> e^{i phase} a^dag`.
    pub fn apply_phase(&self, mode: Mode, phase: f64) -> Self {
        self.scale_mode(mode, Complex64::from_polar(1.0, phase))
    }

    fn scale_mode(&self, mode: Mode, factor: Complex64) -> Self {
        let m = mode.index();
        let mut amps = self.amps;
        for i in 0..MODE_COUNT {
            for j in i..MODE_COUNT {
                let n = (i == m) as i32 + (j == m) as i32;
                if n > 0 {
                    amps[pair_index(i, j)] *= factor.powi(n);
                }
            }
        }
        Self { amps }
    }

    /// Blocks every mode of `port`: only patterns with no photon there survive.
    pub fn block_port(&self, port: Port) -> Self {
        let mut out = self.clone();
        for mode in Mode::all().filter(|m| m.port == port) {
            out = out.scale_mode(mode, ZERO);
        }
        out
    }

    /// Probabilities of (one photon per port, both in out1, both in out2).
    pub fn port_statistics(&self) -> PortStatistics {
        let mut stats = PortStatistics::default();
        for i in 0..MODE_COUNT {
            for j in i..MODE_COUNT {
                let p = self.amps[pair_index(i, j)].norm_sqr();
                match (Mode::from_index(i).port, Mode::from_index(j).port) {
                    (Port::Out1, Port::Out1) => stats.both_out1 += p,
                    (Port::Out2, Port::Out2) => stats.both_out2 += p,
                    _ => stats.coincidence += p,
                }
            }
        }
        stats
    }
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

fn identity() -> ModeMap {
    let mut m = [[ZERO; MODE_COUNT]; MODE_COUNT];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PortStatistics {
    pub coincidence: f64,
    pub both_out1: f64,
    pub both_out2: f64,
}

/// Result of conditioning on one photon at each output port.
#[derive(Debug, Clone, PartialEq)]
pub struct Coincidence {
    /// Squared norm of the kept component.
    pub probability: f64,
    /// Normalized rail state of the two clones; `None` when nothing was kept.
    pub state: Option<JointState>,
    /// Unnormalized rail kets, one per (clone 1 bin, clone 2 bin) pair:
    /// `[(p,p), (p,o), (o,p), (o,o)]`. Different bins are summed incoherently.
    pub components: [Ket4; 4],
}

impl Coincidence {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }

    /// Unnormalized conditional density matrix (trace = probability).
    pub fn density(&self) -> Matrix4 {
        let mut sigma = zero4();
        for ket in &self.components {
            add4(&mut sigma, &outer4(ket), 1.0);
        }
        sigma
    }
}

/// Keeps the patterns with exactly one photon in `out1` and one in `out2`.
pub fn postselect_coincidence(state: &StateVector) -> Coincidence {
    let mut components = [[ZERO; 4]; 4];
    for (slot, (bin1, bin2)) in [
        (TemporalBin::Principal, TemporalBin::Principal),
        (TemporalBin::Principal, TemporalBin::Orthogonal),
        (TemporalBin::Orthogonal, TemporalBin::Principal),
        (TemporalBin::Orthogonal, TemporalBin::Orthogonal),
    ]
    .into_iter()
    .enumerate()
    {
        for k1 in Rail::ALL {
            for k2 in Rail::ALL {
                components[slot][2 * k1.index() + k2.index()] = state.amplitude(
                    Mode::new(Port::Out1, k1, bin1),
                    Mode::new(Port::Out2, k2, bin2),
                );
            }
        }
    }
    let mut out = Coincidence {
        probability: 0.0,
        state: None,
        components,
    };
    let sigma = out.density();
    if let Some((joint, p)) = JointState::from_unnormalized(&sigma) {
        out.probability = p;
        out.state = Some(joint);
    }
    out
}
