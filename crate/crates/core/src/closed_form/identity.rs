//! Numerical check of
//! `∫₀^η cos(xΩ) J0(Δ sqrt(η² - x²)) dx = sin(γη) / γ`, `γ = sqrt(Δ² + Ω²)`.

use crate::error::{Error, Result};
use crate::numerics::{bessel_j0, integrate_adaptive, QuadratureSettings};
use crate::scalar::{lit, Real};

/// `|quadrature - sin(γη)/γ|`.
pub fn bessel_identity_residual<T: Real>(delta: T, omega: T, eta: T) -> Result<T> {
    if !(eta >= T::zero()) || !eta.is_finite() || !delta.is_finite() || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "identity check needs finite inputs and η >= 0, got (Δ, Ω, η) = ({delta}, {omega}, {eta})"
        )));
    }
    let settings = QuadratureSettings {
        abs_tol: lit(1e-13),
        rel_tol: lit(1e-13),
        ..QuadratureSettings::default()
    }
    .with_hint(delta.abs() + omega.abs());
    let lhs = integrate_adaptive(
        |x| (x * omega).cos() * bessel_j0(delta * ((eta - x) * (eta + x)).max(T::zero()).sqrt()),
        T::zero(),
        eta,
        &settings,
    )?
    .value;
    let gamma = delta.hypot(omega);
    Ok((lhs - eta * crate::configsum::sinc(gamma * eta)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert!(bessel_identity_residual(0.0, 1.7, 4.0).unwrap() <= 1e-10);
        assert!(bessel_identity_residual(1.0, 0.0, 2.0).unwrap() <= 1e-8);
        assert!(bessel_identity_residual(1.0, 1.0, 2.0).unwrap() <= 1e-8);
        assert_eq!(bessel_identity_residual(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(bessel_identity_residual(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn holds_on_a_grid() {
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let (d, w, e) = (1.25 * i as f64, 1.25 * j as f64, 1.25 * k as f64);
                    let r = bessel_identity_residual(d, w, e).unwrap();
                    assert!(r <= 1e-8, "({d}, {w}, {e}) -> {r:e}");
                }
            }
        }
    }
}
