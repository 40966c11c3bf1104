//! Single-qubit states, clone density matrices and fidelity.
//!
//! Two-clone states are indexed `2 * k1 + k2`, where `k1` is the rail of the
//! photon leaving port `out1` (clone 1) and `k2` the rail of the photon
//! leaving port `out2` (clone 2). So `|10>` means clone 1 in `|1>`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::Port;

/// Tolerance used when validating states built elsewhere.
pub const CHECK_TOL: f64 = 1e-10;

pub type Ket4 = [Complex64; 4];
pub type Matrix4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A pure qubit `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQubit", into = "RawQubit")]
pub struct Qubit {
    theta: f64,
    phi: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubit {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawQubit> for Qubit {
    type Error = Error;
    fn try_from(raw: RawQubit) -> Result<Self> {
        Qubit::new(raw.theta, raw.phi)
    }
}

impl From<Qubit> for RawQubit {
    fn from(q: Qubit) -> Self {
        RawQubit {
            theta: q.theta,
            phi: q.phi,
        }
    }
}

impl Qubit {
    /// Angles in radians: `theta` in `[0, pi]`, `phi` in `[0, 2pi)`.
    ///
    /// Values outside those ranges are rejected rather than wrapped, which
    /// also catches angles accidentally given in degrees.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::OutOfRange {
                field: "theta".into(),
                value: theta,
                expected: "[0, pi] radians".into(),
            });
        }
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(Error::OutOfRange {
                field: "phi".into(),
                value: phi,
                expected: "[0, 2pi) radians".into(),
            });
        }
        Ok(Self { theta, phi })
    }

    /// Equatorial state `(|0> + e^{i phi}|1>)/sqrt(2)`; `phi` is wrapped into `[0, 2pi)`.
    pub fn equatorial(phi: f64) -> Self {
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self {
            theta: PI / 2.0,
            phi,
        }
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn one() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(alpha, beta)` amplitudes on `|0>` and `|1>`.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        [
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), self.phi),
        ]
    }

    /// The state orthogonal to this one, `-e^{-i phi} sin|0> + cos|1>` up to phase.
    pub fn orthogonal_amplitudes(&self) -> [Complex64; 2] {
        let [a, b] = self.amplitudes();
        [-b.conj(), a.conj()]
    }
}

/// A validated 2x2 density matrix over the rail basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to within `1e-10`.
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        if entries.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        if (entries[0][1] - entries[1][0].conj()).norm() > CHECK_TOL
            || entries[0][0].im.abs() > CHECK_TOL
            || entries[1][1].im.abs() > CHECK_TOL
        {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > CHECK_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let rho = Self { entries };
        let [lo, _] = rho.eigenvalues();
        if lo < -CHECK_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo}")));
        }
        Ok(rho)
    }

    pub fn pure(amplitudes: [Complex64; 2]) -> Result<Self> {
        let mut entries = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                entries[i][j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Self::new(entries)
    }

    pub fn maximally_mixed() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self {
            entries: [[half, ZERO], [ZERO, half]],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let off = self.entries[0][1].norm();
        let mean = (a + d) / 2.0;
        let radius = (((a - d) / 2.0).powi(2) + off * off).sqrt();
        [mean - radius, mean + radius]
    }

    pub fn purity(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                sum += self.entries[i][j].norm_sqr();
            }
        }
        sum
    }

    /// Bloch vector `(x, y, z)`.
    pub fn bloch(&self) -> [f64; 3] {
        let off = self.entries[1][0];
        [
            2.0 * off.re,
            2.0 * off.im,
            self.entries[0][0].re - self.entries[1][1].re,
        ]
    }
}

/// Overlap `<psi|rho|psi>` of a clone with the pure target.
pub fn fidelity(rho: &DensityMatrix, target: &Qubit) -> f64 {
    let psi = target.amplitudes();
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += psi[i].conj() * rho.entries[i][j] * psi[j];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

/// Normalized (possibly mixed) state of the two clones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    rho: Matrix4,
}

impl JointState {
    /// Accepts a density matrix with unit trace (within `1e-10`).
    pub fn new(rho: Matrix4) -> Result<Self> {
        let trace = trace4(&rho);
        if !trace.is_finite() || (trace - 1.0).abs() > CHECK_TOL {
            return Err(Error::NotNormalized(trace));
        }
        Ok(Self { rho })
    }

    /// Pure joint state from an already normalized ket.
    pub fn from_ket(ket: &Ket4) -> Result<Self> {
        Self::new(outer4(ket))
    }

    /// Normalizes an unnormalized density matrix; returns its trace alongside.
    /// `None` when the trace is zero.
    pub fn from_unnormalized(sigma: &Matrix4) -> Option<(Self, f64)> {
        let trace = trace4(sigma);
        if !(trace > f64::MIN_POSITIVE) {
            return None;
        }
        let mut rho = *sigma;
        for z in rho.iter_mut().flatten() {
            *z /= trace;
        }
        Some((Self { rho }, trace))
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.rho
    }

    /// Probability of the rail pattern `(k1, k2)`.
    pub fn population(&self, k1: usize, k2: usize) -> f64 {
        self.rho[2 * k1 + k2][2 * k1 + k2].re
    }

    /// `<a (x) b| rho |a (x) b>` for single-qubit kets `a` (clone 1) and `b` (clone 2).
    pub fn project(&self, a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
        let mut ket = [ZERO; 4];
        for k1 in 0..2 {
            for k2 in 0..2 {
                ket[2 * k1 + k2] = a[k1] * b[k2];
            }
        }
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += ket[i].conj() * self.rho[i][j] * ket[j];
            }
        }
        acc.re
    }

    pub fn purity(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                sum += self.rho[i][j].norm_sqr();
            }
        }
        sum
    }
}

/// Partial trace onto one clone.
pub fn reduced_qubit(state: &JointState, which: Port) -> Result<DensityMatrix> {
    let rho = &state.rho;
    let mut out = [[ZERO; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for other in 0..2 {
                out[a][b] += match which {
                    Port::Out1 => rho[2 * a + other][2 * b + other],
                    Port::Out2 => rho[2 * other + a][2 * other + b],
                };
            }
        }
    }
    // Round-off can leave a ~1e-17 imaginary part on the diagonal.
    out[0][0].im = 0.0;
    out[1][1].im = 0.0;
    DensityMatrix::new(out)
}

pub fn outer4(ket: &Ket4) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = ket[i] * ket[j].conj();
        }
    }
    m
}

pub(crate) fn add4(acc: &mut Matrix4, other: &Matrix4, weight: f64) {
    for i in 0..4 {
        for j in 0..4 {
            acc[i][j] += other[i][j] * weight;
        }
    }
}

pub(crate) fn trace4(m: &Matrix4) -> f64 {
    (0..4).map(|i| m[i][i].re).sum()
}

pub(crate) fn zero4() -> Matrix4 {
    [[ZERO; 4]; 4]
}

/// `1/sqrt(2)` as a complex constant.
pub(crate) const INV_SQRT2: Complex64 = Complex64::new(FRAC_1_SQRT_2, 0.0);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn qubit_rejects_out_of_range_angles() {
        assert!(Qubit::new(-0.1, 0.0).is_err());
        assert!(Qubit::new(PI + 1e-9, 0.0).is_err());
        assert!(Qubit::new(1.0, 2.0 * PI).is_err());
        assert!(Qubit::new(90.0, 0.0).is_err());
        assert!(Qubit::new(f64::NAN, 0.0).is_err());
        assert!(Qubit::new(PI, 6.2).is_ok());
    }

    #[test]
    fn equatorial_wraps_phase() {
        let q = Qubit::equatorial(2.0 * PI + 0.25);
        assert!((q.phi() - 0.25).abs() < 1e-12);
        assert!((Qubit::equatorial(-0.5).phi() - (2.0 * PI - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn amplitudes_are_unit_norm() {
        for &(t, p) in &[(0.0, 0.0), (0.3, 1.0), (PI / 2.0, 4.0), (PI, 6.0)] {
            let [a, b] = Qubit::new(t, p).unwrap().amplitudes();
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-15);
            let [o0, o1] = Qubit::new(t, p).unwrap().orthogonal_amplitudes();
            assert!((a.conj() * o0 + b.conj() * o1).norm() < 1e-15);
        }
    }

    #[test]
    fn fidelity_edge_cases() {
        let psi = Qubit::new(1.1, 2.3).unwrap();
        let pure = DensityMatrix::pure(psi.amplitudes()).unwrap();
        assert!((fidelity(&pure, &psi) - 1.0).abs() < 1e-12);
        assert!((fidelity(&DensityMatrix::maximally_mixed(), &psi) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new([[c(0.6), ZERO], [ZERO, c(0.6)]]).is_err());
        assert!(DensityMatrix::new([[c(1.2), ZERO], [ZERO, c(-0.2)]]).is_err());
        assert!(DensityMatrix::new([[c(0.5), c(0.1)], [c(0.2), c(0.5)]]).is_err());
        assert!(DensityMatrix::new([[c(0.5), c(0.5)], [c(0.5), c(0.5)]]).is_ok());
    }

    #[test]
    fn reduced_product_state() {
        let psi = Qubit::new(0.7, 1.9).unwrap().amplitudes();
        let chi = Qubit::new(2.1, 0.4).unwrap().amplitudes();
        let mut ket = [ZERO; 4];
        for a in 0..2 {
            for b in 0..2 {
                ket[2 * a + b] = psi[a] * chi[b];
            }
        }
        let joint = JointState::from_ket(&ket).unwrap();
        let r1 = reduced_qubit(&joint, Port::Out1).unwrap();
        let r2 = reduced_qubit(&joint, Port::Out2).unwrap();
        let want1 = DensityMatrix::pure(psi).unwrap();
        let want2 = DensityMatrix::pure(chi).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r1.get(i, j) - want1.get(i, j)).norm() < 1e-12);
                assert!((r2.get(i, j) - want2.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_singlet_is_maximally_mixed() {
        let ket = [ZERO, INV_SQRT2, -INV_SQRT2, ZERO];
        let joint = JointState::from_ket(&ket).unwrap();
        for port in [Port::Out1, Port::Out2] {
            let r = reduced_qubit(&joint, port).unwrap();
            assert!((r.get(0, 0).re - 0.5).abs() < 1e-12);
            assert!(r.get(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_ideal_clone_state() {
        // (1/sqrt2)|00> + (1/2)(|10> + |01>)
        let ket = [INV_SQRT2, c(0.5), c(0.5), ZERO];
        let joint = JointState::from_ket(&ket).unwrap();
        let target = Qubit::equatorial(0.0);
        for port in [Port::Out1, Port::Out2] {
            let r = reduced_qubit(&joint, port).unwrap();
            assert!((fidelity(&r, &target) - 0.853_553_390_593_273_7).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_state_rejects_unnormalized() {
        let ket = [c(1.0), c(1.0), ZERO, ZERO];
        assert!(matches!(
            JointState::from_ket(&ket),
            Err(Error::NotNormalized(_))
        ));
        assert!(JointState::from_unnormalized(&zero4()).is_none());
    }
}
