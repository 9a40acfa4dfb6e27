//! The physical model: a central spin `Δσ⁰_z` coupled through
//! `σ⁰_x Σ_k g_k σ^k_z` to `N` free bath spins `Σ_k ω_k σ^k_z`, with the bath
//! initially in its thermal state at inverse temperature β.
//!
//! Conventions (ħ = 1): `σ_z|1⟩ = +|1⟩`, `|1⟩` is the excited state, and every
//! 2×2 matrix is written in the `{|1⟩, |0⟩}` order.

mod config;
mod sampler;
mod state;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub use config::{gamma_of, BathConfiguration, MAX_ENUMERABLE_MODES};
pub use sampler::{CouplingDistribution, SamplerSpec};
pub use state::ReducedState;

/// Inverse temperature of the initial bath state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseTemperature<T> {
    Finite(T),
    /// `T = 0`: the bath starts in its ground configuration.
    Infinite,
}

impl<T: Real> InverseTemperature<T> {
    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(b) => Some(b),
            Self::Infinite => None,
        }
    }

    /// `tanh(β ω)`, which tends to `sign(ω)` at zero temperature.
    pub fn tanh_beta_omega(&self, omega: T) -> T {
        match *self {
            Self::Finite(b) => (b * omega).tanh(),
            Self::Infinite => sign_or_zero(omega),
        }
    }

    /// `cosh²(β ω)`, infinite at zero temperature unless `ω = 0`.
    pub fn cosh2_beta_omega(&self, omega: T) -> T {
        match *self {
            Self::Finite(b) => {
                let c = (b * omega).cosh();
                c * c
            }
            Self::Infinite if omega == T::zero() => T::one(),
            Self::Infinite => T::infinity(),
        }
    }
}

fn sign_or_zero<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// One bath spin: splitting `ω_k` and coupling `g_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode<T> {
    pub omega: T,
    pub coupling: T,
}

impl<T> BathMode<T> {
    pub fn new(omega: T, coupling: T) -> Self {
        Self { omega, coupling }
    }
}

/// Pure state of the central spin on the Bloch sphere:
/// `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> SpinState<T> {
    pub fn excited() -> Self {
        Self {
            theta: T::zero(),
            phi: T::zero(),
        }
    }

    pub fn ground() -> Self {
        Self {
            theta: T::PI(),
            phi: T::zero(),
        }
    }

    pub fn is_excited(&self) -> bool {
        self.theta == T::zero()
    }

    /// Amplitudes on `|1⟩` and `|0⟩`.
    pub fn amplitudes(&self) -> (Complex<T>, Complex<T>) {
        let half = self.theta / lit(2.0);
        (
            Complex::new(half.cos(), T::zero()),
            Complex::from_polar(half.sin(), self.phi),
        )
    }

    /// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)`.
    pub fn bloch_vector(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

impl<T: Real> Default for SpinState<T> {
    fn default() -> Self {
        Self::excited()
    }
}

/// The immutable model record shared by every engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec<T> {
    delta: T,
    beta: InverseTemperature<T>,
    modes: Vec<BathMode<T>>,
    initial: SpinState<T>,
}

impl<T: Real> ModelSpec<T> {
    /// Validates and builds a model with the central spin starting in `|1⟩`.
    pub fn new(delta: T, beta: InverseTemperature<T>, modes: Vec<BathMode<T>>) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        if let InverseTemperature::Finite(b) = beta {
            if !b.is_finite() {
                return Err(Error::invalid(
                    "beta",
                    "must be finite; use the zero-temperature flag for beta = infinity",
                ));
            }
            if b < T::zero() {
                return Err(Error::invalid("beta", "must be non-negative"));
            }
        }
        for (k, m) in modes.iter().enumerate() {
            if !m.omega.is_finite() {
                return Err(Error::invalid(format!("modes[{k}].omega"), "must be finite"));
            }
            if !m.coupling.is_finite() {
                return Err(Error::invalid(format!("modes[{k}].g"), "must be finite"));
            }
        }
        Ok(Self {
            delta,
            beta,
            modes,
            initial: SpinState::excited(),
        })
    }

    pub fn with_initial_state(mut self, initial: SpinState<T>) -> Result<Self> {
        if !initial.theta.is_finite() || !initial.phi.is_finite() {
            return Err(Error::invalid("initial_state", "angles must be finite"));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn beta(&self) -> InverseTemperature<T> {
        self.beta
    }

    pub fn modes(&self) -> &[BathMode<T>] {
        &self.modes
    }

    /// Number of bath spins `N`.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn initial_state(&self) -> SpinState<T> {
        self.initial
    }

    /// Eigenvalue of `Ω = Σ_k g_k σ^k_z` on `config`.
    pub fn omega_of(&self, config: &BathConfiguration) -> T {
        debug_assert_eq!(config.len(), self.len());
        let mut acc = T::zero();
        for (m, s) in self.modes.iter().zip(config.spins()) {
            if *s > 0 {
                acc += m.coupling;
            } else {
                acc -= m.coupling;
            }
        }
        acc
    }

    /// Eigenvalue of `H_B = Σ_k ω_k σ^k_z` on `config`.
    pub fn bath_energy(&self, config: &BathConfiguration) -> T {
        let mut acc = T::zero();
        for (m, s) in self.modes.iter().zip(config.spins()) {
            if *s > 0 {
                acc += m.omega;
            } else {
                acc -= m.omega;
            }
        }
        acc
    }

    /// `ln Z = Σ_k ln(2 cosh βω_k)`, evaluated without overflow.
    pub fn log_partition_function(&self) -> Result<T> {
        let beta = self.beta.finite().ok_or_else(|| {
            Error::Domain("the partition function diverges at zero temperature".into())
        })?;
        // 2 cosh x = e^{|x|} (1 + e^{-2|x|})
        Ok(self
            .modes
            .iter()
            .map(|m| {
                let x = (beta * m.omega).abs();
                x + (-(x + x)).exp().ln_1p()
            })
            .sum())
    }

    /// `Z = Tr e^{-βH_B} = Π_k 2 cosh(βω_k)`.
    pub fn partition_function(&self) -> Result<T> {
        Ok(self.log_partition_function()?.exp())
    }

    /// Probability that bath spin `k` starts in `s_k = +1`.
    pub fn up_probability(&self, k: usize) -> T {
        let omega = self.modes[k].omega;
        match self.beta {
            InverseTemperature::Finite(b) => logistic(-(b * omega + b * omega)),
            InverseTemperature::Infinite => {
                (T::one() - sign_or_zero(omega)) / lit(2.0)
            }
        }
    }

    /// Per-mode `(P(s_k = +1), P(s_k = -1))`.
    pub fn spin_probabilities(&self) -> Vec<(T, T)> {
        (0..self.len())
            .map(|k| {
                let up = self.up_probability(k);
                let down = match self.beta {
                    InverseTemperature::Finite(b) => {
                        let w = self.modes[k].omega;
                        logistic(b * w + b * w)
                    }
                    InverseTemperature::Infinite => T::one() - up,
                };
                (up, down)
            })
            .collect()
    }

    /// Thermal weight `e^{-β Σ ω_k s_k} / Z` of `config`, computed as a
    /// product of single-spin probabilities so it never overflows.
    pub fn boltzmann_weight(&self, config: &BathConfiguration) -> T {
        self.spin_probabilities()
            .iter()
            .zip(config.spins())
            .map(|(&(up, down), &s)| if s > 0 { up } else { down })
            .fold(T::one(), |acc, p| acc * p)
    }

    /// Stable hex digest of the model plus the seed that produced it.
    pub fn fingerprint(&self, seed: u64) -> String {
        let mut h = Sha256::new();
        let mut put = |x: T| h.update(x.to_f64().unwrap_or(f64::NAN).to_bits().to_le_bytes());
        put(self.delta);
        match self.beta {
            InverseTemperature::Finite(b) => put(b),
            InverseTemperature::Infinite => put(T::infinity()),
        }
        put(self.initial.theta);
        put(self.initial.phi);
        for m in &self.modes {
            put(m.omega);
            put(m.coupling);
        }
        h.update(seed.to_le_bytes());
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// `1 / (1 + e^{-x})` without overflow.
fn logistic<T: Real>(x: T) -> T {
    if x >= T::zero() {
        (T::one() + (-x).exp()).recip()
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modes(pairs: &[(f64, f64)]) -> Vec<BathMode<f64>> {
        pairs.iter().map(|&(w, g)| BathMode::new(w, g)).collect()
    }

    #[test]
    fn build_validates_fields() {
        let m = ModelSpec::new(1.0, InverseTemperature::Finite(0.5), modes(&[(1.0, 0.3)])).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.initial_state().is_excited());

        let err = ModelSpec::new(1.0, InverseTemperature::Finite(-1.0), vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref field, .. } if field == "beta"));
        let err = ModelSpec::new(f64::NAN, InverseTemperature::Finite(1.0), vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref field, .. } if field == "delta"));
        let err = ModelSpec::new(1.0, InverseTemperature::Finite(f64::INFINITY), vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref field, .. } if field == "beta"));
        let err = ModelSpec::new(1.0, InverseTemperature::Finite(1.0), modes(&[(1.0, 0.1), (f64::NAN, 0.0)]))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref field, .. } if field == "modes[1].omega"));

        let free = ModelSpec::new(1.0, InverseTemperature::Finite(0.0), vec![]).unwrap();
        assert!(free.is_empty());
    }

    #[test]
    fn omega_and_energy_eigenvalues() {
        let m = ModelSpec::new(0.0, InverseTemperature::Finite(0.0), modes(&[(1.0, 0.5), (2.0, -0.25)])).unwrap();
        let up_up = BathConfiguration::from_spins(&[1, 1]).unwrap();
        let down_up = BathConfiguration::from_spins(&[-1, 1]).unwrap();
        assert_eq!(m.omega_of(&up_up), 0.25);
        assert_eq!(m.omega_of(&down_up), -0.75);
        assert_eq!(m.omega_of(&down_up.flipped()), 0.75);
        assert_eq!(m.bath_energy(&down_up), 1.0);
    }

    #[test]
    fn partition_function_values() {
        let beta0 = ModelSpec::new(1.0, InverseTemperature::Finite(0.0), modes(&[(1.0, 0.0); 3])).unwrap();
        assert!((beta0.partition_function().unwrap() - 8.0).abs() < 1e-14);
        let one = ModelSpec::new(1.0, InverseTemperature::Finite(1.0), modes(&[(1.0, 0.0)])).unwrap();
        assert!((one.partition_function().unwrap() - 2.0 * 1.0f64.cosh()).abs() < 1e-14);
        assert!((one.partition_function().unwrap() - 3.0862).abs() < 1e-4);
        let empty = ModelSpec::new(1.0, InverseTemperature::Finite(3.0), vec![]).unwrap();
        assert_eq!(empty.partition_function().unwrap(), 1.0);
        // no overflow in the log domain
        let hot = ModelSpec::new(1.0, InverseTemperature::Finite(100.0), modes(&[(50.0, 0.0); 40])).unwrap();
        assert!((hot.log_partition_function().unwrap() - 40.0 * 5000.0).abs() < 1e-9);
        let cold = ModelSpec::new(1.0, InverseTemperature::<f64>::Infinite, vec![]).unwrap();
        assert!(cold.partition_function().is_err());
    }

    #[test]
    fn single_mode_weights() {
        let (beta, w) = (0.7, 1.3);
        let m = ModelSpec::new(1.0, InverseTemperature::Finite(beta), modes(&[(w, 0.2)])).unwrap();
        let down = BathConfiguration::from_spins(&[-1]).unwrap();
        let expected = (beta * w).exp() / (2.0 * (beta * w).cosh());
        assert!((m.boltzmann_weight(&down) - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_selects_ground_configuration() {
        let m = ModelSpec::new(1.0, InverseTemperature::Infinite, modes(&[(1.0, 0.2), (0.5, 0.1)])).unwrap();
        let all_down = BathConfiguration::from_index(0, 2);
        assert_eq!(m.boltzmann_weight(&all_down), 1.0);
        for i in 1..4 {
            assert_eq!(m.boltzmann_weight(&BathConfiguration::from_index(i, 2)), 0.0);
        }
    }

    #[test]
    fn spin_state_amplitudes() {
        let (a, b) = SpinState::<f64>::excited().amplitudes();
        assert_eq!((a.re, b.norm()), (1.0, 0.0));
        let (a, b) = SpinState::<f64>::ground().amplitudes();
        assert!(a.norm() < 1e-16 && (b.norm() - 1.0).abs() < 1e-16);
        let n = SpinState { theta: 1.1f64, phi: 0.4 }.bloch_vector();
        assert!((n.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let m = ModelSpec::new(1.0, InverseTemperature::Finite(0.5), modes(&[(1.0, 0.3)])).unwrap();
        assert_eq!(m.fingerprint(7), m.clone().fingerprint(7));
        assert_ne!(m.fingerprint(7), m.fingerprint(8));
        assert_eq!(m.fingerprint(7).len(), 16);
    }
}
