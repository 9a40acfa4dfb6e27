//! Adaptive piecewise Chebyshev interpolation of (vector-valued) functions.
//!
//! Used to tabulate expensive smooth functions once and then evaluate or
//! integrate them cheaply. Each panel holds a degree-`n` interpolant through
//! the Chebyshev–Lobatto points; a panel is accepted when its two trailing
//! coefficients and the interpolation error at one off-grid probe point are
//! both below the tolerance.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Probe abscissa in `[-1, 1]`, not a Lobatto point for any degree used here.
const PROBE: f64 = std::f64::consts::FRAC_1_PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSettings<T> {
    pub degree: usize,
    pub abs_tol: T,
    /// Panels wider than this are split before any accuracy test.
    pub max_panel_width: Option<T>,
    pub max_panels: usize,
}

impl<T: Real> Default for TableSettings<T> {
    fn default() -> Self {
        Self {
            degree: 16,
            abs_tol: lit(1e-12),
            max_panel_width: None,
            max_panels: 1 << 16,
        }
    }
}

/// Piecewise Chebyshev interpolant of `K` channels on `[breaks[0], breaks[last]]`.
#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev<T, const K: usize> {
    degree: usize,
    breaks: Vec<T>,
    /// `coeffs[(panel * K + channel) * (degree + 1) + j]`
    coeffs: Vec<T>,
    /// antiderivative coefficients, `degree + 2` per panel and channel
    antideriv: Vec<T>,
    /// integral from `breaks[0]` to `breaks[panel]`
    cumulative: Vec<[T; K]>,
    evaluations: usize,
}

struct Fit<T> {
    coeffs: Vec<T>,
    tail: T,
}

impl<T: Real, const K: usize> PiecewiseChebyshev<T, K> {
    /// Tabulates `f` on `[a, b]`. Node evaluations inside a panel run in
    /// parallel; the result is independent of the thread count.
    pub fn build<F>(f: F, a: T, b: T, settings: &TableSettings<T>) -> Result<Self>
    where
        F: Fn(T) -> [T; K] + Sync,
    {
        let n = settings.degree;
        if n < 2 {
            return Err(Error::invalid("degree", "must be at least 2"));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("table interval [{a}, {b}] is empty or infinite")));
        }
        let nodes: Vec<T> = (0..=n)
            .map(|j| (T::PI() * count(j) / count(n)).cos())
            .collect();

        // seed panels honouring the width cap
        let seeds = match settings.max_panel_width {
            Some(w) if w > T::zero() => ((b - a) / w).ceil().to_usize().unwrap_or(1).max(1),
            _ => 1,
        };
        let seed_width = (b - a) / count(seeds);
        let mut pending: Vec<(T, T)> = (0..seeds)
            .rev()
            .map(|i| {
                let lo = a + seed_width * count(i);
                let hi = if i + 1 == seeds { b } else { a + seed_width * count(i + 1) };
                (lo, hi)
            })
            .collect();

        let mut breaks = vec![a];
        let mut coeffs = Vec::new();
        let mut evaluations = 0;
        let mut panels = 0;
        while let Some((lo, hi)) = pending.pop() {
            let half = (hi - lo) / lit(2.0);
            let mid = (hi + lo) / lit(2.0);
            let mut xs: Vec<T> = nodes.iter().map(|&u| mid + half * u).collect();
            xs.push(mid + half * lit(PROBE));
            let values: Vec<[T; K]> = xs.par_iter().map(|&x| f(x)).collect();
            evaluations += values.len();

            let fits: Vec<Fit<T>> = (0..K)
                .map(|c| {
                    let samples: Vec<T> = values[..=n].iter().map(|v| v[c]).collect();
                    let coeffs = lobatto_coefficients(&samples);
                    let probe_err = (clenshaw(&coeffs, lit(PROBE)) - values[n + 1][c]).abs();
                    let tail = (coeffs[n].abs() + coeffs[n - 1].abs()).max(probe_err);
                    Fit { coeffs, tail }
                })
                .collect();
            let tail = fits.iter().map(|f| f.tail).fold(T::zero(), T::max);

            let splittable = lo < mid && mid < hi;
            let budget_left = panels + pending.len() + 2 <= settings.max_panels;
            if (tail > settings.abs_tol || !tail.is_finite()) && splittable && budget_left {
                pending.push((mid, hi));
                pending.push((lo, mid));
                continue;
            }
            for fit in fits {
                coeffs.extend(fit.coeffs);
            }
            breaks.push(hi);
            panels += 1;
        }

        let mut antideriv = Vec::with_capacity(panels * K * (n + 2));
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut running = [T::zero(); K];
        cumulative.push(running);
        for p in 0..panels {
            let half = (breaks[p + 1] - breaks[p]) / lit(2.0);
            for (c, slot) in running.iter_mut().enumerate() {
                let start = (p * K + c) * (n + 1);
                let anti = antiderivative(&coeffs[start..start + n + 1]);
                *slot += half * (clenshaw(&anti, T::one()) - clenshaw(&anti, -T::one()));
                antideriv.extend(anti);
            }
            cumulative.push(running);
        }

        Ok(Self {
            degree: n,
            breaks,
            coeffs,
            antideriv,
            cumulative,
            evaluations,
        })
    }

    pub fn domain(&self) -> (T, T) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Number of calls made to the tabulated function.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn locate(&self, x: T) -> (usize, T) {
        let p = self
            .breaks
            .partition_point(|&b| b <= x)
            .saturating_sub(1)
            .min(self.panels() - 1);
        let (lo, hi) = (self.breaks[p], self.breaks[p + 1]);
        let u = (lit::<T>(2.0) * x - lo - hi) / (hi - lo);
        (p, u.max(-T::one()).min(T::one()))
    }

    /// Interpolated value; `x` is clamped to the domain.
    pub fn eval(&self, x: T) -> [T; K] {
        let (p, u) = self.locate(x);
        let n = self.degree + 1;
        let mut out = [T::zero(); K];
        for (c, slot) in out.iter_mut().enumerate() {
            let start = (p * K + c) * n;
            *slot = clenshaw(&self.coeffs[start..start + n], u);
        }
        out
    }

    /// `∫_{domain start}^{x}` of the interpolant; `x` is clamped to the domain.
    pub fn integral_to(&self, x: T) -> [T; K] {
        let (p, u) = self.locate(x);
        let n = self.degree + 2;
        let half = (self.breaks[p + 1] - self.breaks[p]) / lit(2.0);
        let mut out = self.cumulative[p];
        for (c, slot) in out.iter_mut().enumerate() {
            let start = (p * K + c) * n;
            let anti = &self.antideriv[start..start + n];
            *slot += half * (clenshaw(anti, u) - clenshaw(anti, -T::one()));
        }
        out
    }
}

/// Coefficients `a_k` of `sum_k a_k T_k(u)` interpolating samples at
/// `u_j = cos(j pi / n)`.
fn lobatto_coefficients<T: Real>(samples: &[T]) -> Vec<T> {
    let n = samples.len() - 1;
    let nn = count::<T>(n);
    (0..=n)
        .map(|k| {
            let mut acc = T::zero();
            for (j, &f) in samples.iter().enumerate() {
                let w = if j == 0 || j == n { lit(0.5) } else { T::one() };
                // cos(j k pi / n) with the product reduced mod 2n for accuracy
                let phase = (j * k) % (2 * n);
                acc += w * f * (T::PI() * count(phase) / nn).cos();
            }
            let scale = if k == 0 || k == n { T::one() / nn } else { lit::<T>(2.0) / nn };
            acc * scale
        })
        .collect()
}

/// Coefficients of an antiderivative (constant term zero).
fn antiderivative<T: Real>(a: &[T]) -> Vec<T> {
    let n = a.len() - 1;
    let get = |k: usize| if k <= n { a[k] } else { T::zero() };
    let mut out = vec![T::zero(); n + 2];
    out[1] = get(0) - get(2) / lit(2.0);
    for (k, o) in out.iter_mut().enumerate().skip(2) {
        *o = (get(k - 1) - get(k + 1)) / (lit::<T>(2.0) * count(k));
    }
    out
}

fn clenshaw<T: Real>(a: &[T], u: T) -> T {
    let two_u = u + u;
    let mut b1 = T::zero();
    let mut b2 = T::zero();
    for &c in a.iter().skip(1).rev() {
        let b0 = c + two_u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a[0] + u * b1 - b2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials_exactly() {
        let f = |x: f64| [x * x * x - 2.0 * x + 1.0];
        let t = PiecewiseChebyshev::build(f, -1.0, 3.0, &TableSettings::default()).unwrap();
        assert_eq!(t.panels(), 1);
        for x in [-1.0, -0.3, 0.0, 1.7, 3.0] {
            assert!((t.eval(x)[0] - f(x)[0]).abs() < 1e-13);
        }
        // ∫_{-1}^{x} (x^3 - 2x + 1) dx
        let anti = |x: f64| x.powi(4) / 4.0 - x * x + x;
        for x in [-1.0, 0.5, 3.0] {
            assert!((t.integral_to(x)[0] - (anti(x) - anti(-1.0))).abs() < 1e-13);
        }
    }

    #[test]
    fn oscillatory_function_refines() {
        let f = |x: f64| [(7.0 * x).sin(), (3.0 * x).cos()];
        let t = PiecewiseChebyshev::build(f, 0.0, 20.0, &TableSettings::default()).unwrap();
        assert!(t.panels() > 1);
        for i in 0..=1000 {
            let x = 0.02 * i as f64;
            let v = t.eval(x);
            assert!((v[0] - (7.0 * x).sin()).abs() < 1e-11);
            assert!((v[1] - (3.0 * x).cos()).abs() < 1e-11);
            let i0 = (1.0 - (7.0 * x).cos()) / 7.0;
            assert!((t.integral_to(x)[0] - i0).abs() < 1e-11);
        }
    }

    #[test]
    fn coarse_tolerance_gives_coarse_table() {
        let f = |x: f64| [(13.0 * x).sin()];
        let loose = TableSettings { abs_tol: 1.0, ..Default::default() };
        let t = PiecewiseChebyshev::build(f, 0.0, 20.0, &loose).unwrap();
        let tight = PiecewiseChebyshev::build(f, 0.0, 20.0, &TableSettings::default()).unwrap();
        assert!(t.panels() < tight.panels());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseChebyshev::build(|x: f64| [x], 1.0, 1.0, &TableSettings::default()).is_err());
        let s = TableSettings { degree: 1, ..Default::default() };
        assert!(PiecewiseChebyshev::build(|x: f64| [x], 0.0, 1.0, &s).is_err());
    }
}
