//! Exact reduced dynamics as a thermal average over bath configurations.
//!
//! `H` commutes with every `σ^k_z`, so on each Ising configuration `s` the
//! system sees the 2×2 Hamiltonian `Δσ_z + Ω(s)σ_x` with `Ω(s) = Σ_k g_k s_k`,
//! and
//!
//! ```text
//! U_s(t) = cos(γt) I - i t sinc(γt) (Δσ_z + Ωσ_x),   γ = sqrt(Δ² + Ω²).
//! ```
//!
//! Writing everything through `sinc` makes `γ = 0` an ordinary point.
//! Configurations are visited in fixed-size chunks in index order and the
//! chunk sums are merged sequentially, so results do not depend on the
//! number of threads.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ReducedState};
use crate::numerics::{CompensatedSum, ComplexSum};
use crate::scalar::{count, lit, Real};
use crate::trajectory::{validate_grid, Engine, Trajectory, TrajectoryPoint};

/// Default largest bath (16.7M configurations).
pub const CONFIG_SUM_MAX_MODES: usize = 24;

const CHUNK: u64 = 1 << 12;

/// `sin(x)/x`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-3) {
        let x2 = x * x;
        T::one() - x2 / lit(6.0) * (T::one() - x2 / lit(20.0) * (T::one() - x2 / lit(42.0)))
    } else {
        x.sin() / x
    }
}

/// `⟨σ_z(t)⟩` on one configuration from `|1⟩`: `1 - 2 Ω² t² sinc²(γt)`.
pub fn magnetization_kernel<T: Real>(delta: T, omega: T, t: T) -> T {
    let gamma = delta.hypot(omega);
    let a = omega * t * sinc(gamma * t);
    T::one() - lit::<T>(2.0) * a * a
}

/// `ρ_10(t)` on one configuration from `|1⟩`:
/// `iΩ t sinc(2γt) + ΔΩ t² sinc²(γt)`.
pub fn coherence_kernel<T: Real>(delta: T, omega: T, t: T) -> Complex<T> {
    let gamma = delta.hypot(omega);
    let s = sinc(gamma * t);
    Complex::new(delta * omega * t * t * s * s, omega * t * sinc(lit::<T>(2.0) * gamma * t))
}

/// `U_s(t) ρ U_s(t)†` for the 2×2 Hamiltonian `Δσ_z + Ωσ_x`.
pub fn evolve_pair<T: Real>(delta: T, omega: T, t: T, rho: &ReducedState<T>) -> ReducedState<T> {
    let gamma = delta.hypot(omega);
    let c = (gamma * t).cos();
    let s = t * sinc(gamma * t);
    // U = [[c - i s Δ, -i s Ω], [-i s Ω, c + i s Δ]]
    let u11 = Complex::new(c, -s * delta);
    let u10 = Complex::new(T::zero(), -s * omega);
    let u00 = Complex::new(c, s * delta);
    let r = [[rho.rho11, rho.rho10], [rho.rho01, rho.rho00]];
    let u = [[u11, u10], [u10, u00]];
    let mut ur = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            ur[i][j] = u[i][0] * r[0][j] + u[i][1] * r[1][j];
        }
    }
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ur[i][0] * u[j][0].conj() + ur[i][1] * u[j][1].conj();
        }
    }
    ReducedState::from_entries(out[0][0], out[0][1], out[1][0], out[1][1])
}

#[derive(Clone, Copy)]
struct Accumulator<T> {
    rho11: CompensatedSum<T>,
    rho00: CompensatedSum<T>,
    rho10: ComplexSum<T>,
}

impl<T: Real> Accumulator<T> {
    fn new() -> Self {
        Self {
            rho11: CompensatedSum::new(),
            rho00: CompensatedSum::new(),
            rho10: ComplexSum::new(),
        }
    }

    fn add(&mut self, w: T, s: &ReducedState<T>) {
        self.rho11.add(w * s.rho11.re);
        self.rho00.add(w * s.rho00.re);
        self.rho10.add(s.rho10 * w);
    }

    fn merge(&mut self, other: &Self) {
        self.rho11.merge(&other.rho11);
        self.rho00.merge(&other.rho00);
        self.rho10.merge(&other.rho10);
    }

    fn state(&self, total: T) -> ReducedState<T> {
        let zero = T::zero();
        let rho10 = self.rho10.value() / total;
        ReducedState::from_entries(
            Complex::new(self.rho11.value() / total, zero),
            rho10,
            rho10.conj(),
            Complex::new(self.rho00.value() / total, zero),
        )
    }
}

/// Progress callback: `(chunks done, total chunks)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Configuration-sum evaluator bound to one model.
pub struct ConfigSumEngine<'a, T> {
    model: &'a ModelSpec<T>,
    /// `(P(s=+1), P(s=-1))` per mode
    probabilities: Vec<(T, T)>,
    progress: Option<Progress<'a>>,
}

impl<'a, T: Real> ConfigSumEngine<'a, T> {
    pub fn new(model: &'a ModelSpec<T>) -> Result<Self> {
        Self::with_cap(model, CONFIG_SUM_MAX_MODES)
    }

    pub fn with_cap(model: &'a ModelSpec<T>, cap: usize) -> Result<Self> {
        let cap = cap.min(crate::model::MAX_ENUMERABLE_MODES);
        if model.len() > cap {
            return Err(Error::TooManyModes {
                engine: "the configuration-sum engine",
                modes: model.len(),
                cap,
                hint: "; use the closed-form (integral) engine for large baths",
            });
        }
        Ok(Self {
            model,
            probabilities: model.spin_probabilities(),
            progress: None,
        })
    }

    pub fn with_progress(mut self, progress: Progress<'a>) -> Self {
        self.progress = Some(progress);
        self
    }

    fn total(&self) -> u64 {
        1u64 << self.model.len()
    }

    /// `(Ω(s), w(s))` for configuration index `i` (bit `k` set means `s_k = +1`).
    fn config(&self, i: u64) -> (T, T) {
        let mut omega = T::zero();
        let mut w = T::one();
        for (k, (m, &(up, down))) in self.model.modes().iter().zip(&self.probabilities).enumerate() {
            if (i >> k) & 1 == 1 {
                omega += m.coupling;
                w *= up;
            } else {
                omega -= m.coupling;
                w *= down;
            }
        }
        (omega, w)
    }

    /// Runs `visit(Ω, w, slots)` over every configuration with nonzero
    /// weight, accumulating into `width` slots per chunk, and merges the
    /// chunks in index order. Also returns the summed weight, which the
    /// callers divide by so that conserved quantities come out exact.
    fn reduce<A, F>(&self, width: usize, fresh: impl Fn() -> A + Sync, merge: impl Fn(&mut A, &A), visit: F) -> (Vec<A>, T)
    where
        A: Send,
        F: Fn(T, T, &mut [A]) + Sync,
    {
        let total = self.total();
        let chunks = total.div_ceil(CHUNK) as usize;
        let done = AtomicUsize::new(0);
        let partials: Vec<(Vec<A>, CompensatedSum<T>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut slots: Vec<A> = (0..width).map(|_| fresh()).collect();
                let mut weight = CompensatedSum::new();
                let lo = c as u64 * CHUNK;
                let hi = (lo + CHUNK).min(total);
                for i in lo..hi {
                    let (omega, w) = self.config(i);
                    if w > T::zero() {
                        weight.add(w);
                        visit(omega, w, &mut slots);
                    }
                }
                if let Some(report) = self.progress {
                    report(done.fetch_add(1, Ordering::Relaxed) + 1, chunks);
                }
                (slots, weight)
            })
            .collect();
        let mut iter = partials.into_iter();
        let (mut acc, mut weight) = iter.next().expect("at least one chunk");
        for (part, w) in iter {
            for (a, p) in acc.iter_mut().zip(&part) {
                merge(a, p);
            }
            weight.merge(&w);
        }
        (acc, weight.value())
    }

    fn require_excited(&self) -> Result<()> {
        if self.model.initial_state().is_excited() {
            Ok(())
        } else {
            Err(Error::UnsupportedInitialState { engine: "this configuration-sum observable" })
        }
    }

    /// `⟨σ_z(t)⟩` for the initial state `|1⟩`.
    pub fn magnetization_at(&self, t: T) -> Result<T> {
        self.require_excited()?;
        let delta = self.model.delta();
        let (out, total) = self.reduce(1, CompensatedSum::new, |a, b| a.merge(b), |omega, w, acc| {
            acc[0].add(w * magnetization_kernel(delta, omega, t));
        });
        Ok(out[0].value() / total)
    }

    /// `ρ_10(t)` for the initial state `|1⟩`.
    pub fn coherence_at(&self, t: T) -> Result<Complex<T>> {
        self.require_excited()?;
        let delta = self.model.delta();
        let (out, total) = self.reduce(1, ComplexSum::new, |a, b| a.merge(b), |omega, w, acc| {
            acc[0].add(coherence_kernel(delta, omega, t) * w);
        });
        Ok(out[0].value() / total)
    }

    /// Reduced state at `t` for any pure initial state.
    pub fn reduced_density_matrix_at(&self, t: T) -> ReducedState<T> {
        self.states(&[t]).remove(0)
    }

    fn states(&self, times: &[T]) -> Vec<ReducedState<T>> {
        let delta = self.model.delta();
        let rho0 = ReducedState::projector(&self.model.initial_state());
        let excited = self.model.initial_state().is_excited();
        let (out, total) = self.reduce(times.len(), Accumulator::new, |a, b| a.merge(b), |omega, w, acc| {
            for (slot, &t) in acc.iter_mut().zip(times) {
                let s = if excited {
                    let sz = magnetization_kernel(delta, omega, t);
                    ReducedState::from_sz_coherence(sz, coherence_kernel(delta, omega, t))
                } else {
                    evolve_pair(delta, omega, t, &rho0)
                };
                slot.add(w, &s);
            }
        });
        out.iter().map(|a| a.state(total)).collect()
    }

    /// Trajectory on `times`; bit-identical across runs and thread counts.
    pub fn time_series(&self, times: &[T], seed: u64) -> Result<Trajectory<T>> {
        validate_grid(times)?;
        let points = times
            .iter()
            .zip(self.states(times))
            .map(|(&t, s)| TrajectoryPoint::from_state(t, s))
            .collect();
        Ok(Trajectory {
            engine: Engine::ConfigSum,
            fingerprint: self.model.fingerprint(seed),
            points,
        })
    }

    /// Mean of `(⟨σ_z⟩, ρ_10)` over `n_samples` equally spaced times from
    /// `t_start` to `t_end` inclusive, for the model's initial state.
    ///
    /// Each configuration rotates the Bloch vector about `m = (Ω, 0, Δ)/γ` at
    /// angular speed `2γ`, so only the window means of `cos 2γt` and
    /// `sin 2γt` are needed; those are closed-form geometric sums.
    pub fn stationary_time_average(&self, t_start: T, t_end: T, n_samples: usize) -> Result<(T, Complex<T>)> {
        if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
            return Err(Error::InvalidGrid(format!("window [{t_start}, {t_end}] is empty")));
        }
        if n_samples < 2 {
            return Err(Error::invalid("n_samples", "need at least two samples"));
        }
        let delta = self.model.delta();
        let n0 = self.model.initial_state().bloch_vector();
        let (out, total) = self.reduce(3, CompensatedSum::new, |a, b| a.merge(b), |omega, w, acc| {
            let n = windowed_bloch(delta, omega, n0, t_start, t_end, n_samples);
            for (slot, x) in acc.iter_mut().zip(n) {
                slot.add(w * x);
            }
        });
        let n = [out[0].value() / total, out[1].value() / total, out[2].value() / total];
        let s = ReducedState::from_bloch(n);
        Ok((s.magnetization(), s.coherence()))
    }

    /// Dephased limit `Σ_s w(s) (n·m) m`: the infinite-window average for
    /// spectra without accidental degeneracies.
    pub fn dephased_limit(&self) -> ReducedState<T> {
        let delta = self.model.delta();
        let n0 = self.model.initial_state().bloch_vector();
        let (out, total) = self.reduce(3, CompensatedSum::new, |a, b| a.merge(b), |omega, w, acc| {
            let g2 = delta * delta + omega * omega;
            let n = if g2 == T::zero() {
                n0
            } else {
                let proj = (n0[0] * omega + n0[2] * delta) / g2;
                [proj * omega, T::zero(), proj * delta]
            };
            for (slot, x) in acc.iter_mut().zip(n) {
                slot.add(w * x);
            }
        });
        ReducedState::from_bloch([out[0].value() / total, out[1].value() / total, out[2].value() / total])
    }
}

/// Window mean of the rotated Bloch vector for one configuration.
fn windowed_bloch<T: Real>(delta: T, omega: T, n0: [T; 3], t0: T, t1: T, samples: usize) -> [T; 3] {
    let gamma = delta.hypot(omega);
    if gamma == T::zero() {
        return n0;
    }
    let two = lit::<T>(2.0);
    let h = (t1 - t0) / count(samples - 1);
    let (mean_cos, mean_sin) = mean_phase(two * gamma, t0, h, samples);
    let m = [omega / gamma, T::zero(), delta / gamma];
    let dot = n0[0] * m[0] + n0[2] * m[2];
    // m × n0
    let cross = [m[1] * n0[2] - m[2] * n0[1], m[2] * n0[0] - m[0] * n0[2], m[0] * n0[1] - m[1] * n0[0]];
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        let par = dot * m[i];
        out[i] = par + mean_cos * (n0[i] - par) + mean_sin * cross[i];
    }
    out
}

/// `(1/n) Σ_j (cos θt_j, sin θt_j)` with `t_j = t0 + j h`.
fn mean_phase<T: Real>(theta: T, t0: T, h: T, n: usize) -> (T, T) {
    let half = lit::<T>(0.5);
    let nn = count::<T>(n);
    let a = theta * h * half;
    let denom = a.sin();
    if denom.abs() < lit(1e-8) {
        let (mut c, mut s) = (CompensatedSum::new(), CompensatedSum::new());
        for j in 0..n {
            let (sj, cj) = (theta * (t0 + h * count(j))).sin_cos();
            c.add(cj);
            s.add(sj);
        }
        return (c.value() / nn, s.value() / nn);
    }
    // Σ e^{iθ(t0 + jh)} = e^{iθ(t0 + (n-1)h/2)} sin(n a) / sin(a)
    let ratio = (nn * a).sin() / denom / nn;
    let center = theta * (t0 + h * (nn - T::one()) * half);
    let (s, c) = center.sin_cos();
    (c * ratio, s * ratio)
}

/// [`ConfigSumEngine::magnetization_at`] with the default cap.
pub fn magnetization_at<T: Real>(model: &ModelSpec<T>, t: T) -> Result<T> {
    ConfigSumEngine::new(model)?.magnetization_at(t)
}

/// [`ConfigSumEngine::coherence_at`] with the default cap.
pub fn coherence_at<T: Real>(model: &ModelSpec<T>, t: T) -> Result<Complex<T>> {
    ConfigSumEngine::new(model)?.coherence_at(t)
}

/// [`ConfigSumEngine::reduced_density_matrix_at`] with the default cap.
pub fn reduced_density_matrix_at<T: Real>(model: &ModelSpec<T>, t: T) -> Result<ReducedState<T>> {
    Ok(ConfigSumEngine::new(model)?.reduced_density_matrix_at(t))
}

/// [`ConfigSumEngine::time_series`] with the default cap.
pub fn time_series<T: Real>(model: &ModelSpec<T>, times: &[T], seed: u64) -> Result<Trajectory<T>> {
    ConfigSumEngine::new(model)?.time_series(times, seed)
}

/// [`ConfigSumEngine::stationary_time_average`] with the default cap.
pub fn stationary_time_average<T: Real>(model: &ModelSpec<T>, t_start: T, t_end: T, n_samples: usize) -> Result<(T, Complex<T>)> {
    ConfigSumEngine::new(model)?.stationary_time_average(t_start, t_end, n_samples)
}
