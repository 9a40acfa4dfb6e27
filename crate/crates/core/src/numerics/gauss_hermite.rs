//! Gauss–Hermite rules for Gaussian expectations.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Nodes and weights for `∫ exp(-x^2) f(x) dx ≈ Σ w_i f(x_i)`, nodes ascending.
///
/// Each root is bracketed by Sturm-sequence bisection on the Hermite Jacobi
/// matrix, polished with Newton steps on the orthonormal recurrence, and
/// weighted by `2 / p_n'(x)^2`.
pub fn gauss_hermite<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::invalid("nodes", "must be at least 1"));
    }
    let pi_quarter = T::PI().powf(lit(-0.25));
    let bound = (lit::<T>(2.0) * count::<T>(n) + T::one()).sqrt();
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];

    // roots k = n/2 .. n-1 are the non-negative ones
    for k in n / 2..n {
        let (mut lo, mut hi) = (T::zero(), bound);
        if n % 2 == 1 && k == n / 2 {
            lo = T::zero();
            hi = T::zero();
        }
        for _ in 0..200 {
            let mid = (lo + hi) / lit(2.0);
            if !(lo < mid && mid < hi) {
                break;
            }
            if eigenvalues_below(n, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = (lo + hi) / lit(2.0);
        for _ in 0..3 {
            let (p, dp, _) = hermite_orthonormal(n, z, pi_quarter);
            let step = p / dp;
            if !step.is_finite() || step.abs() > (hi - lo).max(T::epsilon() * bound) {
                break;
            }
            z -= step;
        }
        let (_, dp, log_scale) = hermite_orthonormal(n, z, pi_quarter);
        // 2 / (dp e^{log_scale})², underflowing to zero far out in the tails
        let w = lit::<T>(2.0) / (dp * dp) * (-(log_scale + log_scale)).exp();
        nodes[k] = z;
        weights[k] = w;
        nodes[n - 1 - k] = -z;
        weights[n - 1 - k] = w;
    }
    Ok((nodes, weights))
}

/// Number of eigenvalues of the Hermite Jacobi matrix (zero diagonal,
/// off-diagonal `sqrt(j/2)`) that are smaller than `x`.
fn eigenvalues_below<T: Real>(n: usize, x: T) -> usize {
    let mut below = 0;
    let mut q = -x;
    if q < T::zero() {
        below += 1;
    }
    for j in 1..n {
        let denom = if q == T::zero() { T::epsilon() } else { q };
        q = -x - count::<T>(j) / lit(2.0) / denom;
        if q < T::zero() {
            below += 1;
        }
    }
    below
}

/// Orthonormal Hermite polynomial `p_n(z)` and `p_n'(z)`, both divided by
/// `e^s`; returns `(p, dp, s)`. The rescaling keeps large `n` finite.
fn hermite_orthonormal<T: Real>(n: usize, z: T, p0: T) -> (T, T, T) {
    let big = T::max_value().sqrt().sqrt();
    let mut log_scale = T::zero();
    let mut p1 = p0;
    let mut p2 = T::zero();
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = count::<T>(j);
        p1 = z * (lit::<T>(2.0) / jf).sqrt() * p2 - ((jf - T::one()) / jf).sqrt() * p3;
        if p1.abs() > big {
            p1 /= big;
            p2 /= big;
            log_scale += big.ln();
        }
    }
    (p1, (lit::<T>(2.0) * count::<T>(n)).sqrt() * p2, log_scale)
}

/// `E[f(X)]` for `X ~ Normal(0, sigma^2)` with an `n`-node rule.
pub fn normal_expectation<T: Real, F: Fn(T) -> T>(f: F, sigma: T, n: usize) -> Result<T> {
    let (nodes, weights) = gauss_hermite::<T>(n)?;
    let scale = lit::<T>(2.0).sqrt() * sigma;
    let mut acc = crate::numerics::summation::CompensatedSum::new();
    for (x, w) in nodes.iter().zip(&weights) {
        acc.add(*w * f(scale * *x));
    }
    Ok(acc.value() / T::PI().sqrt())
}
