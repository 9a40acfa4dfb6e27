//! Bessel functions of the first kind, orders zero and one, for real arguments.
//!
//! Three branches, each accurate to a few ulp in absolute terms:
//!
//! * `|x| <= 8`: power series,
//! * `8 < |x| < 25`: Miller backward recurrence normalised by
//!   `J0 + 2 (J2 + J4 + ...) = 1`,
//! * `|x| >= 25`: Hankel amplitude/phase expansion, truncated at its
//!   smallest term (below `e^{-50}` there).

use crate::scalar::{count, lit, Real};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const MAX_SERIES_TERMS: usize = 200;

/// `J0(x)`.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax.is_nan() {
        return x;
    }
    if ax <= lit(SERIES_LIMIT) {
        j0_series(ax)
    } else if ax < lit(ASYMPTOTIC_LIMIT) {
        miller(ax).0
    } else {
        hankel(T::zero(), ax)
    }
}

/// `J1(x)`; odd in `x`.
pub fn bessel_j1<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax.is_nan() {
        return x;
    }
    let value = if ax <= lit(SERIES_LIMIT) {
        ax * j1_over_x_series(ax)
    } else if ax < lit(ASYMPTOTIC_LIMIT) {
        miller(ax).1
    } else {
        hankel(T::one(), ax)
    };
    if x < T::zero() {
        -value
    } else {
        value
    }
}

/// `J1(x) / x`, continuous through `x = 0` where it equals `1/2`.
pub fn bessel_j1_over_x<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax <= lit(SERIES_LIMIT) {
        j1_over_x_series(ax)
    } else {
        bessel_j1(ax) / ax
    }
}

/// The kernel `K(r) = delta * J1(delta * r) / r` with `K(0) = delta^2 / 2`.
///
/// It is `-(1/r) d/dr J0(delta r)`, the quantity produced when the η-derivative
/// or the x-derivative hits `J0(delta sqrt(eta^2 - x^2))`.
pub fn j1_kernel<T: Real>(delta: T, r: T) -> T {
    delta * delta * bessel_j1_over_x(delta * r)
}

fn j0_series<T: Real>(x: T) -> T {
    let q = x * x / lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for m in 1..MAX_SERIES_TERMS {
        let m = count::<T>(m);
        term = -term * q / (m * m);
        sum += term;
        if term.abs() <= T::epsilon() * T::epsilon().max(sum.abs()) {
            break;
        }
    }
    sum
}

fn j1_over_x_series<T: Real>(x: T) -> T {
    let q = x * x / lit(4.0);
    let half = lit::<T>(0.5);
    let mut term = half;
    let mut sum = half;
    for m in 1..MAX_SERIES_TERMS {
        let m = count::<T>(m);
        term = -term * q / (m * (m + T::one()));
        sum += term;
        if term.abs() <= T::epsilon() * T::epsilon().max(sum.abs()) {
            break;
        }
    }
    sum
}

/// Returns `(J0(x), J1(x))` for `x > 0` by backward recurrence.
fn miller<T: Real>(x: T) -> (T, T) {
    let start = {
        let n = x.to_usize().unwrap_or(0) + 50;
        n + (n & 1)
    };
    let big = T::max_value().sqrt();
    let two = lit::<T>(2.0);

    let mut above = T::zero(); // J_{k+1}
    let mut current = T::min_positive_value().sqrt(); // J_k
    let mut even_sum = T::zero();
    let mut j1 = T::zero();
    for k in (1..=start).rev() {
        let below = two * count::<T>(k) / x * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order == 1 {
            j1 = current;
        } else if order > 0 && order % 2 == 0 {
            even_sum += current;
        }
        if current.abs() > big {
            let scale = big.recip();
            current *= scale;
            above *= scale;
            even_sum *= scale;
            j1 *= scale;
        }
    }
    let norm = current + two * even_sum;
    (current / norm, j1 / norm)
}

/// Hankel expansion of `J_order(x)` for large positive `x`.
fn hankel<T: Real>(order: T, x: T) -> T {
    let mu = lit::<T>(4.0) * order * order;
    let eight_x = lit::<T>(8.0) * x;

    let mut p = T::one();
    let mut q = T::zero();
    let mut a = T::one();
    let mut last = T::infinity();
    for k in 1..60usize {
        let odd = count::<T>(2 * k - 1);
        a = a * (mu - odd * odd) / (count::<T>(k) * eight_x);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        // the sign pattern of P and Q is (+, -, -, +) with period 4 in k
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < T::epsilon() * lit(1e-3) {
            break;
        }
    }
    let phase = x - (order / lit(2.0) + lit(0.25)) * T::PI();
    (lit::<T>(2.0) / (T::PI() * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}
