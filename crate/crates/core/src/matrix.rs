//! Density-matrix representations.
//!
//! [`Rho`] is the packed Hermitian form used inside the integrators: three real
//! populations and the three upper-triangle coherences. Everything that leaves
//! the integrators is converted to a dense [`Matrix3`].

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul};

/// Dense complex 3×3 matrix in the bare basis `{|1⟩, |2⟩, |3⟩}`.
pub type Mat3 = Matrix3<C64>;

/// Packed Hermitian 3×3 density matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rho {
    pub r11: f64,
    pub r22: f64,
    pub r33: f64,
    pub r12: C64,
    pub r13: C64,
    pub r23: C64,
}

impl Rho {
    pub fn trace(&self) -> f64 {
        self.r11 + self.r22 + self.r33
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.r11 * self.r11
            + self.r22 * self.r22
            + self.r33 * self.r33
            + 2.0 * (self.r12.norm_sqr() + self.r13.norm_sqr() + self.r23.norm_sqr())
    }

    /// Packs the upper triangle and real diagonal of `m`. The lower triangle is
    /// assumed to be the conjugate of the upper one.
    pub fn from_matrix(m: &Mat3) -> Self {
        Self { r11: m[(0, 0)].re, r22: m[(1, 1)].re, r33: m[(2, 2)].re, r12: m[(0, 1)], r13: m[(0, 2)], r23: m[(1, 2)] }
    }

    pub fn to_matrix(&self) -> Mat3 {
        let z = |x: f64| C64::new(x, 0.0);
        Matrix3::new(
            z(self.r11),
            self.r12,
            self.r13,
            self.r12.conj(),
            z(self.r22),
            self.r23,
            self.r13.conj(),
            self.r23.conj(),
            z(self.r33),
        )
    }

    /// Right-hand side of the Λ-system Bloch equations for real-valued time
    /// derivative ∂ρ/∂T, with pump `oa` on 1–3, Stokes `ob` on 2–3 and common
    /// detuning `delta` of level 3.
    #[inline]
    pub fn bloch_rhs(&self, oa: C64, ob: C64, delta: f64) -> Rho {
        let i = C64::i();
        let ha = 0.5 * oa;
        let hb = 0.5 * ob;
        let d11 = (oa.conj() * self.r13).im;
        let d22 = (ob.conj() * self.r23).im;
        let d12 = i * (ha * self.r23.conj() - hb.conj() * self.r13);
        let d13 = i * (delta * self.r13 - hb * self.r12 + ha * (self.r33 - self.r11));
        let d23 = i * (delta * self.r23 - ha * self.r12.conj() + hb * (self.r33 - self.r22));
        Rho { r11: d11, r22: d22, r33: -d11 - d22, r12: d12, r13: d13, r23: d23 }
    }
}

impl Add for Rho {
    type Output = Rho;
    #[inline]
    fn add(self, o: Rho) -> Rho {
        Rho {
            r11: self.r11 + o.r11,
            r22: self.r22 + o.r22,
            r33: self.r33 + o.r33,
            r12: self.r12 + o.r12,
            r13: self.r13 + o.r13,
            r23: self.r23 + o.r23,
        }
    }
}

impl Mul<f64> for Rho {
    type Output = Rho;
    #[inline]
    fn mul(self, s: f64) -> Rho {
        Rho {
            r11: self.r11 * s,
            r22: self.r22 * s,
            r33: self.r33 * s,
            r12: self.r12 * s,
            r13: self.r13 * s,
            r23: self.r23 * s,
        }
    }
}

/// Largest deviation of `m` from Hermiticity.
pub fn hermiticity_error(m: &Mat3) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &Mat3) -> [f64; 3] {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let ev = sym.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Bare-basis Hamiltonian (ħ = 1) of the Λ system in the rotating frame.
pub fn bare_hamiltonian(oa: C64, ob: C64, delta: f64) -> Mat3 {
    let zero = C64::new(0.0, 0.0);
    Matrix3::new(zero, zero, -0.5 * oa, zero, zero, -0.5 * ob, -0.5 * oa.conj(), -0.5 * ob.conj(), C64::new(delta, 0.0))
}
