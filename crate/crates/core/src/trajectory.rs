//! Time series produced by the engines.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ReducedState;
use crate::scalar::{lit, Real};

/// Which evaluator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Brute-force evolution in the full Hilbert space.
    Oracle,
    /// Exact sum over bath configurations.
    #[serde(rename = "configsum")]
    ConfigSum,
    /// Bessel-integral evaluators with the exact characteristic function.
    Integral,
    /// Bessel-integral evaluators with the Gaussian characteristic function.
    Gaussian,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Oracle, Engine::ConfigSum, Engine::Integral, Engine::Gaussian];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::ConfigSum => "configsum",
            Engine::Integral => "integral",
            Engine::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid("engines", format!("unknown engine `{s}` (expected oracle, configsum, integral or gaussian)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<T> {
    pub t: T,
    pub sz: T,
    pub rho10: Complex<T>,
    pub state: ReducedState<T>,
}

impl<T: Real> TrajectoryPoint<T> {
    pub fn from_state(t: T, state: ReducedState<T>) -> Self {
        Self {
            t,
            sz: state.magnetization(),
            rho10: state.coherence(),
            state,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub engine: Engine,
    /// Digest of the model and seed, see [`crate::model::ModelSpec::fingerprint`].
    pub fingerprint: String,
    pub points: Vec<TrajectoryPoint<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the per-point invariants: `sz = ρ11 - ρ00`, unit trace,
    /// `|ρ10| <= 1/2`, `sz ∈ [-1, 1]`.
    pub fn check_invariants(&self, tol: T) -> Result<()> {
        validate_grid(&self.times())?;
        let slack = lit::<T>(1e-10);
        for p in &self.points {
            let bad = |what: &str| {
                Err(Error::Domain(format!("{} trajectory violates {what} at t = {}", self.engine, p.t)))
            };
            if (p.sz - p.state.magnetization()).abs() > tol {
                return bad("sz = rho11 - rho00");
            }
            if (p.state.trace() - Complex::new(T::one(), T::zero())).norm() > tol {
                return bad("unit trace");
            }
            if p.rho10.norm() > lit::<T>(0.5) + slack {
                return bad("|rho10| <= 1/2");
            }
            if p.sz.abs() > T::one() + slack {
                return bad("|sz| <= 1");
            }
        }
        Ok(())
    }
}

/// A time grid must be non-empty, finite and strictly increasing.
pub fn validate_grid<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty".into()));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite time {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!(
            "not strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n + 1` equally spaced times `0, t_max/n, ..., t_max`.
pub fn uniform_grid<T: Real>(t_max: T, steps: usize) -> Vec<T> {
    if steps == 0 {
        return vec![T::zero()];
    }
    let n = T::from_usize(steps).unwrap();
    (0..=steps)
        .map(|j| t_max * T::from_usize(j).unwrap() / n)
        .collect()
}
