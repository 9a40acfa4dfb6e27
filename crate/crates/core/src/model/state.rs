use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::SpinState;
use crate::scalar::{lit, Real};

/// 2×2 reduced density matrix of the central spin in the `{|1⟩, |0⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState<T> {
    pub rho11: Complex<T>,
    pub rho10: Complex<T>,
    pub rho01: Complex<T>,
    pub rho00: Complex<T>,
}

impl<T: Real> ReducedState<T> {
    pub fn from_entries(rho11: Complex<T>, rho10: Complex<T>, rho01: Complex<T>, rho00: Complex<T>) -> Self {
        Self { rho11, rho10, rho01, rho00 }
    }

    /// State with magnetization `sz` and coherence `ρ_10`.
    pub fn from_sz_coherence(sz: T, rho10: Complex<T>) -> Self {
        let half = lit::<T>(0.5);
        Self {
            rho11: Complex::new(half * (T::one() + sz), T::zero()),
            rho10,
            rho01: rho10.conj(),
            rho00: Complex::new(half * (T::one() - sz), T::zero()),
        }
    }

    /// `(1 + n·σ) / 2` for a Bloch vector `n`.
    pub fn from_bloch(n: [T; 3]) -> Self {
        let half = lit::<T>(0.5);
        Self::from_sz_coherence(n[2], Complex::new(half * n[0], -half * n[1]))
    }

    pub fn projector(state: &SpinState<T>) -> Self {
        let (a, b) = state.amplitudes();
        Self {
            rho11: a * a.conj(),
            rho10: a * b.conj(),
            rho01: b * a.conj(),
            rho00: b * b.conj(),
        }
    }

    /// `⟨σ_z⟩ = ρ_11 - ρ_00`.
    pub fn magnetization(&self) -> T {
        (self.rho11 - self.rho00).re
    }

    pub fn coherence(&self) -> Complex<T> {
        self.rho10
    }

    pub fn bloch_vector(&self) -> [T; 3] {
        let two = lit::<T>(2.0);
        [two * self.rho10.re, -two * self.rho10.im, self.magnetization()]
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho11 + self.rho00
    }

    pub fn purity(&self) -> T {
        (self.rho11 * self.rho11 + self.rho00 * self.rho00 + self.rho10 * self.rho01 * lit::<T>(2.0)).re
    }

    /// Eigenvalues, ascending, of the Hermitian part.
    pub fn eigenvalues(&self) -> (T, T) {
        let half = lit::<T>(0.5);
        let tr = self.trace().re;
        let diff = self.magnetization();
        let off = (self.rho10 + self.rho01.conj()) * half;
        let radius = (diff * diff + lit::<T>(4.0) * off.norm_sqr()).sqrt();
        (half * (tr - radius), half * (tr + radius))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            self.rho11 - other.rho11,
            self.rho10 - other.rho10,
            self.rho01 - other.rho01,
            self.rho00 - other.rho00,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max)
    }

    /// Checks Hermiticity, unit trace and eigenvalues in `[-tol_eig, 1 + tol_eig]`.
    pub fn check(&self, tol: T, tol_eig: T) -> Result<()> {
        let herm = (self.rho01 - self.rho10.conj()).norm()
            .max(self.rho11.im.abs())
            .max(self.rho00.im.abs());
        if herm > tol {
            return Err(Error::Domain(format!("reduced state not Hermitian (defect {herm:e})")));
        }
        let tr = (self.trace() - Complex::new(T::one(), T::zero())).norm();
        if tr > tol {
            return Err(Error::Domain(format!("reduced state trace off by {tr:e}")));
        }
        let (lo, hi) = self.eigenvalues();
        if lo < -tol_eig || hi > T::one() + tol_eig {
            return Err(Error::Domain(format!("reduced state eigenvalues ({lo}, {hi}) outside [0, 1]")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projectors_are_pure() {
        let s = SpinState { theta: 0.9f64, phi: -2.1 };
        let rho = ReducedState::projector(&s);
        rho.check(1e-12, 1e-10).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        let n = s.bloch_vector();
        let back = rho.bloch_vector();
        for i in 0..3 {
            assert!((n[i] - back[i]).abs() < 1e-15);
        }
        let (lo, hi) = rho.eigenvalues();
        assert!(lo.abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn excited_state_layout() {
        let rho = ReducedState::projector(&SpinState::<f64>::excited());
        assert_eq!(rho.rho11.re, 1.0);
        assert_eq!(rho.magnetization(), 1.0);
        assert_eq!(rho.coherence().norm(), 0.0);
    }

    #[test]
    fn invariant_violations_are_reported() {
        let bad_trace = ReducedState::from_sz_coherence(0.2f64, Complex::new(0.1, 0.0));
        let mut bad = bad_trace;
        bad.rho00 += Complex::new(1e-6, 0.0);
        assert!(bad.check(1e-12, 1e-10).is_err());
        let too_coherent = ReducedState::from_sz_coherence(0.0f64, Complex::new(0.6, 0.0));
        assert!(too_coherent.check(1e-12, 1e-10).is_err());
        let mut skew = bad_trace;
        skew.rho01 = Complex::new(0.3, 0.0);
        assert!(skew.check(1e-12, 1e-10).is_err());
    }
}
