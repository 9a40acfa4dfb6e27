//! Scaled complementary error function `erfcx(z) = exp(z^2) erfc(z)` on `z >= 0`.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

const SERIES_LIMIT: f64 = 2.0;
const MAX_FRACTION_TERMS: usize = 10_000;

/// `exp(z^2) erfc(z)` for `z >= 0`. Never overflows; tends to `1/(z sqrt(pi))`.
pub fn erfc_scaled<T: Real>(z: T) -> Result<T> {
    if z.is_nan() || z < T::zero() {
        return Err(Error::Domain(format!(
            "erfc_scaled requires z >= 0, got {z}"
        )));
    }
    if z.is_infinite() {
        return Ok(T::zero());
    }
    Ok(if z < lit(SERIES_LIMIT) {
        series(z)
    } else {
        continued_fraction(z)
    })
}

/// `exp(z^2) - (2/sqrt(pi)) sum_n 2^n z^(2n+1) / (2n+1)!!`; every term positive.
fn series<T: Real>(z: T) -> T {
    let two_z2 = lit::<T>(2.0) * z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200usize {
        term = term * two_z2 / count::<T>(2 * n + 1);
        sum += term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    (z * z).exp() - lit::<T>(2.0) / T::PI().sqrt() * sum
}

/// Laplace continued fraction
/// `erfcx(z) = (1/sqrt(pi)) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`,
/// evaluated with the modified Lentz algorithm.
fn continued_fraction<T: Real>(z: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut f = z;
    let mut c = z;
    let mut d = T::zero();
    for n in 1..MAX_FRACTION_TERMS {
        let a = count::<T>(n) / lit(2.0);
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (T::PI().sqrt() * f).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Asymptotic series `1/(z sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2 z^2)^k`.
    fn asymptotic_oracle(z: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let next = -term * (2 * k - 1) as f64 / (2.0 * z * z);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (z * std::f64::consts::PI.sqrt())
    }

    #[test]
    fn reference_values() {
        assert_eq!(erfc_scaled(0.0).unwrap(), 1.0);
        // e * erfc(1)
        let v = erfc_scaled(1.0f64).unwrap();
        assert!((v - 0.427_583_576_155_807).abs() < 1e-14, "{v}");
        // exp(4) erfc(2) = 0.255395676310505...
        let v = erfc_scaled(2.0f64).unwrap();
        assert!((v - 0.255_395_676_310_505_74).abs() < 1e-14, "{v}");
    }

    #[test]
    fn matches_asymptotic_series_far_out() {
        for z in [10.0, 20.0, 30.0, 50.0, 1e3] {
            let v = erfc_scaled(z).unwrap();
            let o = asymptotic_oracle(z);
            assert!(((v - o) / o).abs() < 1e-13, "z={z}");
        }
        // the two-term asymptote is off by the next term, 3/(4 z^4), to O(z^-6)
        let z: f64 = 30.0;
        let two_term = 1.0 / (z * std::f64::consts::PI.sqrt()) * (1.0 - 1.0 / (2.0 * z * z));
        let rel = (erfc_scaled(z).unwrap() - two_term) / two_term;
        assert!((rel - 3.0 / (4.0 * z.powi(4))).abs() < 1e-8, "{rel:e}");
    }

    #[test]
    fn branches_join_at_two() {
        let below = erfc_scaled(f64::from_bits(2.0f64.to_bits() - 1)).unwrap();
        let above = erfc_scaled(f64::from_bits(2.0f64.to_bits() + 1)).unwrap();
        assert!(((below - above) / above).abs() < 1e-13);
    }

    #[test]
    fn strictly_decreasing() {
        let mut prev = erfc_scaled(0.0).unwrap();
        for i in 1..=5000 {
            let v = erfc_scaled(i as f64 * 0.01).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(matches!(erfc_scaled(-0.5), Err(Error::Domain(_))));
        assert!(erfc_scaled(f64::NAN).is_err());
        assert_eq!(erfc_scaled(f64::INFINITY).unwrap(), 0.0);
        assert!(erfc_scaled(1e300).unwrap() > 0.0);
    }
}
