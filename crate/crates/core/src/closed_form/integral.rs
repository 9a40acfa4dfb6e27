//! Bessel-integral evaluators for `⟨σ_z(t)⟩` and `ρ_10(t)`.
//!
//! With `r = sqrt(η² - x²)` and `K(r) = Δ J1(Δr) / r`:
//!
//! ```text
//! F(η)  = ∫₀^η J0(Δr) Re Φ(x) dx
//! F'(η) = Re Φ(η) - η ∫₀^η K(r) Re Φ(x) dx
//! G(η)  = Im Φ(η) - ∫₀^η x K(r) Im Φ(x) dx
//!
//! ⟨σ_z(t)⟩ = F'(2t) + Δ² ∫₀^{2t} F(η) dη
//! ρ_10(t)  = (i/2) G(2t) + c Δ ∫₀^{2t} G(η) dη
//! ```
//!
//! with `c = 1/2` ([`Convention::Reconciled`], which reproduces the
//! configuration average) or `c = 1` ([`Convention::Printed`]). On a single
//! configuration `F = sin(γη)/γ` and `G = Ω sin(γη)/γ`.

use std::sync::Mutex;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::phi::{CharacteristicFunctionSpec, PhiEvaluator};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j0, integrate_adaptive, j1_kernel, PiecewiseChebyshev, QuadratureSettings, TableSettings};
use crate::scalar::{lit, Real};
use crate::trajectory::{validate_grid, Engine, Trajectory, TrajectoryPoint};

/// Weight of the `Δ ∫ G` term in the coherence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `Δ ∫₀^{2t} G`, the literal reading.
    Printed,
    /// `(Δ/2) ∫₀^{2t} G`, which agrees with the configuration sum.
    Reconciled,
}

impl Convention {
    fn weight<T: Real>(self) -> T {
        match self {
            Convention::Printed => T::one(),
            Convention::Reconciled => lit(0.5),
        }
    }
}

/// Tolerances for the inner (`x`) and outer (`η`) integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSettings<T> {
    pub inner: QuadratureSettings<T>,
    pub outer_abs_tol: T,
}

impl<T: Real> Default for IntegralSettings<T> {
    fn default() -> Self {
        Self {
            inner: QuadratureSettings::default(),
            outer_abs_tol: lit(1e-8),
        }
    }
}

impl<T: Real> IntegralSettings<T> {
    /// Inner tolerance `abs_tol`, outer `100 abs_tol`.
    pub fn from_abs_tol(abs_tol: T) -> Self {
        let mut s = Self::default();
        s.inner.abs_tol = abs_tol;
        s.outer_abs_tol = abs_tol * lit(100.0);
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.outer_abs_tol > T::zero()) || !self.outer_abs_tol.is_finite() {
            return Err(Error::invalid("outer_abs_tol", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Evaluators for `F`, `F'` and `G` tied to one `Φ` and one `Δ`.
#[derive(Debug, Clone)]
pub struct BesselIntegrals<T> {
    phi: PhiEvaluator<T>,
    real_phi: bool,
    delta: T,
    /// angular-frequency hint for every integral
    hint: T,
    settings: IntegralSettings<T>,
    engine: Engine,
}

impl<T: Real> BesselIntegrals<T> {
    /// `reach` is the largest `η` that will be requested (`2 t_max`).
    pub fn new(spec: &CharacteristicFunctionSpec<T>, delta: T, reach: T, settings: IntegralSettings<T>) -> Result<Self> {
        settings.validate()?;
        if !delta.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        if !(reach >= T::zero()) || !reach.is_finite() {
            return Err(Error::Domain(format!("reach must be finite and non-negative, got {reach}")));
        }
        let engine = match spec {
            CharacteristicFunctionSpec::ExactProduct(_) => Engine::Integral,
            CharacteristicFunctionSpec::Gaussian { .. } => Engine::Gaussian,
        };
        Ok(Self {
            phi: PhiEvaluator::new(spec, reach)?,
            real_phi: spec.is_real(),
            delta,
            hint: delta.abs() + spec.bandwidth(),
            settings,
            engine,
        })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    fn inner(&self) -> QuadratureSettings<T> {
        self.settings.inner.with_hint(self.hint)
    }

    fn radius(eta: T, x: T) -> T {
        ((eta - x) * (eta + x)).max(T::zero()).sqrt()
    }

    fn check_eta(eta: T) -> Result<()> {
        if eta >= T::zero() && eta.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("η must be finite and non-negative, got {eta}")))
        }
    }

    /// `F(η)`.
    pub fn f(&self, eta: T) -> Result<T> {
        Self::check_eta(eta)?;
        let d = self.delta;
        let q = integrate_adaptive(
            |x| bessel_j0(d * Self::radius(eta, x)) * self.phi.eval(x).re,
            T::zero(),
            eta,
            &self.inner(),
        )?;
        Ok(q.value)
    }

    /// `F'(η)` by the Leibniz rule.
    pub fn f_prime(&self, eta: T) -> Result<T> {
        Self::check_eta(eta)?;
        let d = self.delta;
        let q = integrate_adaptive(
            |x| j1_kernel(d, Self::radius(eta, x)) * self.phi.eval(x).re,
            T::zero(),
            eta,
            &self.inner(),
        )?;
        Ok(self.phi.eval(eta).re - eta * q.value)
    }

    /// `G(η)`.
    pub fn g(&self, eta: T) -> Result<T> {
        Self::check_eta(eta)?;
        if self.real_phi {
            return Ok(T::zero());
        }
        let d = self.delta;
        let q = integrate_adaptive(
            |x| x * j1_kernel(d, Self::radius(eta, x)) * self.phi.eval(x).im,
            T::zero(),
            eta,
            &self.inner(),
        )?;
        Ok(self.phi.eval(eta).im - q.value)
    }

    fn outer(&self) -> QuadratureSettings<T> {
        QuadratureSettings {
            abs_tol: self.settings.outer_abs_tol,
            ..self.settings.inner
        }
        .with_hint(self.hint)
    }

    /// `∫₀^η F` by nested adaptive quadrature.
    fn outer_integral(&self, eta: T, inner: impl Fn(T) -> Result<T>) -> Result<T> {
        let mut failure = None;
        let q = integrate_adaptive(
            |e| match inner(e) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    T::zero()
                }
            },
            T::zero(),
            eta,
            &self.outer(),
        )?;
        match failure {
            Some(err) => Err(err),
            None => Ok(q.value),
        }
    }

    /// `⟨σ_z(t)⟩` at one time, nesting the outer integral around the inner.
    pub fn magnetization(&self, t: T) -> Result<T> {
        let eta = lit::<T>(2.0) * t;
        Self::check_eta(eta)?;
        let d2 = self.delta * self.delta;
        let tail = if d2 == T::zero() { T::zero() } else { self.outer_integral(eta, |e| self.f(e))? };
        Ok(self.f_prime(eta)? + d2 * tail)
    }

    /// `ρ_10(t)` at one time.
    pub fn coherence(&self, t: T, convention: Convention) -> Result<Complex<T>> {
        let eta = lit::<T>(2.0) * t;
        Self::check_eta(eta)?;
        if self.real_phi {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let tail = if self.delta == T::zero() { T::zero() } else { self.outer_integral(eta, |e| self.g(e))? };
        Ok(Complex::new(convention.weight::<T>() * self.delta * tail, self.g(eta)? / lit(2.0)))
    }

    /// Trajectory on `times`, with `∫F` and `∫G` read from one Chebyshev
    /// table of `[F, G]` on `[0, 2 t_max]`. The coherence uses the
    /// reconciled convention; the printed one is returned alongside.
    pub fn trajectory(&self, times: &[T], seed_fingerprint: String) -> Result<IntegralRun<T>> {
        validate_grid(times)?;
        if times[0] < T::zero() {
            return Err(Error::InvalidGrid(format!("times must be non-negative, got {}", times[0])));
        }
        let two = lit::<T>(2.0);
        let reach = two * *times.last().unwrap();
        let table = if reach > T::zero() && self.delta != T::zero() { Some(self.table(reach)?) } else { None };

        let values: Vec<Result<(T, T, T, T)>> = times
            .par_iter()
            .map(|&t| {
                let eta = two * t;
                let [int_f, int_g] = match &table {
                    Some(tab) => tab.integral_to(eta),
                    None => [T::zero(); 2],
                };
                Ok((self.f_prime(eta)?, self.g(eta)?, int_f, int_g))
            })
            .collect();

        let d = self.delta;
        let mut points = Vec::with_capacity(times.len());
        let mut printed = Vec::with_capacity(times.len());
        for (&t, v) in times.iter().zip(values) {
            let (fp, g, int_f, int_g) = v?;
            let sz = fp + d * d * int_f;
            let reconciled = Complex::new(Convention::Reconciled.weight::<T>() * d * int_g, g / two);
            printed.push(Complex::new(Convention::Printed.weight::<T>() * d * int_g, g / two));
            points.push(TrajectoryPoint {
                t,
                sz,
                rho10: reconciled,
                state: crate::model::ReducedState::from_sz_coherence(sz, reconciled),
            });
        }
        Ok(IntegralRun {
            trajectory: Trajectory {
                engine: self.engine,
                fingerprint: seed_fingerprint,
                points,
            },
            printed,
        })
    }

    fn table(&self, reach: T) -> Result<PiecewiseChebyshev<T, 2>> {
        let failure = Mutex::new(None);
        let settings = TableSettings {
            abs_tol: self.settings.outer_abs_tol,
            ..TableSettings::default()
        };
        let record = |r: Result<T>| match r {
            Ok(v) => v,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                T::zero()
            }
        };
        let table = PiecewiseChebyshev::build(|e| [record(self.f(e)), record(self.g(e))], T::zero(), reach, &settings)?;
        match failure.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }
}

/// Output of [`BesselIntegrals::trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRun<T> {
    /// Reconciled-convention trajectory.
    pub trajectory: Trajectory<T>,
    /// `ρ_10` under the printed convention, one per time.
    pub printed: Vec<Complex<T>>,
}

/// `⟨σ_z(t)⟩` from the Bessel-integral representation with default tolerances.
pub fn magnetization_integral<T: Real>(phi: &CharacteristicFunctionSpec<T>, delta: T, t: T) -> Result<T> {
    BesselIntegrals::new(phi, delta, lit::<T>(2.0) * t.abs(), IntegralSettings::default())?.magnetization(t)
}

/// `ρ_10(t)` from the Bessel-integral representation with default tolerances.
pub fn coherence_integral<T: Real>(phi: &CharacteristicFunctionSpec<T>, delta: T, t: T, convention: Convention) -> Result<Complex<T>> {
    BesselIntegrals::new(phi, delta, lit::<T>(2.0) * t.abs(), IntegralSettings::default())?.coherence(t, convention)
}

/// `F(η) = Re ∫₀^η J0(Δ sqrt(η² - x²)) Φ(x) dx` with default tolerances.
pub fn bessel_transform<T: Real>(phi: &CharacteristicFunctionSpec<T>, delta: T, eta: T) -> Result<T> {
    BesselIntegrals::new(phi, delta, eta.abs(), IntegralSettings::default())?.f(eta)
}
