//! Long-time magnetization in the Gaussian-bath limit.

use serde::Serialize;

use crate::closed_form::phi::effective_sigma2;
use crate::error::{Error, Result};
use crate::model::InverseTemperature;
use crate::numerics::{erfc_scaled, normal_expectation};
use crate::scalar::{lit, Real};

const HERMITE_NODES: usize = 200;
const MAX_HERMITE_NODES: usize = 1600;

/// `|Δ| cosh(βω) sqrt(π / 8C) erfcx(z)` with `z = |Δ| cosh(βω) / sqrt(2C)`,
/// evaluated exactly as written. Tends to `1/2` as `z → ∞`.
pub fn stationary_printed<T: Real>(delta: T, c_total: T, beta: InverseTemperature<T>, omega: T) -> Result<T> {
    if !(c_total > T::zero()) || !c_total.is_finite() {
        return Err(Error::Domain(format!("c_total must be positive and finite, got {c_total}")));
    }
    if delta == T::zero() {
        return Ok(T::zero());
    }
    let z = stationary_z(delta, c_total, beta, omega);
    if !z.is_finite() {
        return Ok(lit(0.5));
    }
    let prefactor = delta.abs() * beta.cosh2_beta_omega(omega).sqrt() * (T::PI() / (lit::<T>(8.0) * c_total)).sqrt();
    Ok(prefactor * erfc_scaled(z)?)
}

/// `z = |Δ| cosh(βω) / sqrt(2C)`.
pub fn stationary_z<T: Real>(delta: T, c_total: T, beta: InverseTemperature<T>, omega: T) -> T {
    delta.abs() * beta.cosh2_beta_omega(omega).sqrt() / (lit::<T>(2.0) * c_total).sqrt()
}

/// `E[Δ² / (Δ² + Ω²)]` for `Ω ~ Normal(0, σ²)` by Gauss–Hermite quadrature,
/// starting at 200 nodes and doubling until two rules agree to `1e-12`.
pub fn stationary_oracle<T: Real>(delta: T, sigma2: T) -> Result<T> {
    stationary_oracle_with_nodes(delta, sigma2, HERMITE_NODES)
}

/// [`stationary_oracle`] starting from `nodes` nodes.
pub fn stationary_oracle_with_nodes<T: Real>(delta: T, sigma2: T, nodes: usize) -> Result<T> {
    if !(sigma2 >= T::zero()) || !sigma2.is_finite() || !delta.is_finite() {
        return Err(Error::Domain(format!("need finite Δ and σ² >= 0, got ({delta}, {sigma2})")));
    }
    // a bath without spread conserves σ_z
    if sigma2 == T::zero() {
        return Ok(T::one());
    }
    if delta == T::zero() {
        return Ok(T::zero());
    }
    let d2 = delta * delta;
    let sigma = sigma2.sqrt();
    let f = |w: T| d2 / (d2 + w * w);
    let mut n = nodes.max(1);
    let mut value = normal_expectation(f, sigma, n)?;
    while n < MAX_HERMITE_NODES {
        n *= 2;
        let next = normal_expectation(f, sigma, n)?;
        let change = (next - value).abs();
        value = next;
        if change <= lit(1e-12) {
            break;
        }
    }
    Ok(value)
}

/// Closed form of [`stationary_oracle`]:
/// `sqrt(π/2) (|Δ|/σ) erfcx(|Δ| / (σ sqrt 2))`.
pub fn stationary_oracle_closed_form<T: Real>(delta: T, sigma2: T) -> Result<T> {
    if sigma2 == T::zero() {
        return Ok(T::one());
    }
    let sigma = sigma2.sqrt();
    let ratio = delta.abs() / sigma;
    Ok((T::PI() / lit(2.0)).sqrt() * ratio * erfc_scaled(ratio / lit::<T>(2.0).sqrt())?)
}

/// Printed formula against the quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryReport<T> {
    pub printed_value: T,
    pub oracle_value: T,
    /// `printed_value / oracle_value`; `None` when the oracle vanishes.
    pub ratio: Option<T>,
    pub z: T,
    pub sigma2: T,
}

pub fn stationary_report<T: Real>(delta: T, c_total: T, beta: InverseTemperature<T>, omega: T) -> Result<StationaryReport<T>> {
    let printed_value = stationary_printed(delta, c_total, beta, omega)?;
    let sigma2 = effective_sigma2(c_total, beta, omega);
    let oracle_value = stationary_oracle(delta, sigma2)?;
    Ok(StationaryReport {
        printed_value,
        oracle_value,
        ratio: (oracle_value != T::zero()).then(|| printed_value / oracle_value),
        z: stationary_z(delta, c_total, beta, omega),
        sigma2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOT: InverseTemperature<f64> = InverseTemperature::Finite(0.0);

    #[test]
    fn printed_formula_values() {
        assert_eq!(stationary_printed(0.0, 1.0, HOT, 1.0).unwrap(), 0.0);
        let v = stationary_printed(2f64.sqrt(), 1.0, HOT, 1.0).unwrap();
        let want = 2f64.sqrt() * (std::f64::consts::PI / 8.0).sqrt() * 0.427_583_576_155_807;
        assert!((v - want).abs() < 1e-14 && (v - 0.37891).abs() < 1e-4);
        // decoupling limit
        assert!((stationary_printed(1.0, 1e-12, HOT, 1.0).unwrap() - 0.5).abs() < 1e-6);
        assert_eq!(stationary_printed(1.0, 1.0, InverseTemperature::Infinite, 1.0).unwrap(), 0.5);
        assert!(stationary_printed(1.0, 0.0, HOT, 1.0).is_err());
        assert_eq!(stationary_printed(-1.0, 1.0, HOT, 1.0).unwrap(), stationary_printed(1.0, 1.0, HOT, 1.0).unwrap());
    }

    #[test]
    fn oracle_values() {
        assert_eq!(stationary_oracle(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(stationary_oracle(1.0, 0.0).unwrap(), 1.0);
        assert!((stationary_oracle(1.0f64, 1e-10).unwrap() - 1.0).abs() < 1e-9);
        let v = stationary_oracle(2f64.sqrt(), 1.0).unwrap();
        assert!((v - 0.7578).abs() < 1e-4, "{v}");
        let doubled = stationary_oracle_with_nodes(2f64.sqrt(), 1.0, 800).unwrap();
        assert!((v - doubled).abs() < 1e-10);
        // poles at ±iΔ/σ: convergence slows as Δ/σ shrinks
        for &(d, s2, tol) in &[(2f64.sqrt(), 1.0, 1e-12), (0.3, 2.0, 1e-7), (3.0, 0.5, 1e-12), (1.0, 1.0, 1e-12)] {
            let q = stationary_oracle(d, s2).unwrap();
            let c = stationary_oracle_closed_form(d, s2).unwrap();
            assert!((q - c).abs() < tol, "({d}, {s2}): {q} vs {c}");
            assert!((0.0..=1.0).contains(&q));
        }
        assert!(stationary_oracle(1.0, -1.0).is_err());
    }

    #[test]
    fn report_bundles_values() {
        let r = stationary_report(2f64.sqrt(), 1.0, HOT, 1.0).unwrap();
        assert!((r.ratio.unwrap() - 0.5).abs() < 1e-3);
        assert!((r.z - 1.0).abs() < 1e-15);
        assert_eq!(r.sigma2, 1.0);
        let r = stationary_report(0.0, 1.0, HOT, 1.0).unwrap();
        assert_eq!((r.printed_value, r.oracle_value, r.ratio), (0.0, 0.0, None));
    }
}
