//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::summation::CompensatedSum;
use crate::scalar::{count, lit, Real};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Cap on the number of seed panels produced by an oscillation hint.
const MAX_SEED_PANELS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Largest angular frequency present in the integrand. When set, the
    /// interval is pre-split so that no seed panel spans more than half a
    /// period.
    #[serde(default)]
    pub oscillation_hint: Option<T>,
}

impl<T: Real> Default for QuadratureSettings<T> {
    fn default() -> Self {
        Self {
            abs_tol: lit(1e-10),
            rel_tol: lit(1e-9),
            max_subdivisions: 2000,
            oscillation_hint: None,
        }
    }
}

impl<T: Real> QuadratureSettings<T> {
    pub fn with_hint(mut self, angular_frequency: T) -> Self {
        self.oscillation_hint = Some(angular_frequency);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || !self.abs_tol.is_finite() {
            return Err(Error::invalid("abs_tol", "must be positive and finite"));
        }
        if !(self.rel_tol > T::zero()) || !self.rel_tol.is_finite() {
            return Err(Error::invalid("rel_tol", "must be positive and finite"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    fn seed_panels(&self, a: T, b: T) -> usize {
        match self.oscillation_hint {
            Some(w) if w > T::zero() && w.is_finite() => {
                let n = ((b - a) * w / T::PI()).ceil();
                n.to_usize().unwrap_or(MAX_SEED_PANELS).clamp(1, MAX_SEED_PANELS)
            }
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// One 15-point Kronrod panel with a QUADPACK-style error estimate.
fn kronrod_panel<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = (b - a) / lit(2.0);
    let center = (a + b) / lit(2.0);

    let fc = f(center);
    let mut kronrod = fc * lit(KRONROD_WEIGHTS[7]);
    let mut gauss = fc * lit(GAUSS_WEIGHTS[3]);
    let mut abs_sum = fc.abs() * lit(KRONROD_WEIGHTS[7]);
    let mut samples = [(T::zero(), T::zero()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * lit(KRONROD_NODES[j]);
        let lo = f(center - dx);
        let hi = f(center + dx);
        let w = lit::<T>(KRONROD_WEIGHTS[j]);
        kronrod += w * (lo + hi);
        abs_sum += w * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += lit::<T>(GAUSS_WEIGHTS[j / 2]) * (lo + hi);
        }
        *sample = (lo, hi);
    }

    let mean = kronrod / lit(2.0);
    let mut asc = lit::<T>(KRONROD_WEIGHTS[7]) * (fc - mean).abs();
    for (j, (lo, hi)) in samples.iter().enumerate() {
        asc += lit::<T>(KRONROD_WEIGHTS[j]) * ((*lo - mean).abs() + (*hi - mean).abs());
    }

    let scale = half.abs();
    let value = kronrod * half;
    let abs_sum = abs_sum * scale;
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != T::zero() && error != T::zero() {
        let ratio = (lit::<T>(200.0) * error / asc).powf(lit(1.5));
        error = asc * ratio.min(T::one());
    }
    let floor = lit::<T>(50.0) * T::epsilon() * abs_sum;
    if abs_sum > T::min_positive_value() / (lit::<T>(50.0) * T::epsilon()) && floor > error {
        error = floor;
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
///
/// Panels are bisected in order of decreasing error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol * |value|)`. Exhausting
/// `max_subdivisions` yields [`Error::Convergence`] carrying the partial result.
pub fn integrate_adaptive<T, F>(mut f: F, a: T, b: T, settings: &QuadratureSettings<T>) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    settings.validate()?;
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        });
    }

    let seeds = settings.seed_panels(a, b);
    let width = (b - a) / count(seeds);
    let mut heap = BinaryHeap::with_capacity(seeds + 2 * settings.max_subdivisions);
    let mut evaluations = 0;
    for i in 0..seeds {
        let lo = a + width * count(i);
        let hi = if i + 1 == seeds { b } else { a + width * count(i + 1) };
        heap.push(kronrod_panel(&mut f, lo, hi));
        evaluations += 15;
    }

    let totals = |heap: &BinaryHeap<Panel<T>>| {
        let mut value = CompensatedSum::new();
        let mut error = CompensatedSum::new();
        for p in heap.iter() {
            value.add(p.value);
            error.add(p.error);
        }
        (value.value(), error.value())
    };

    let (mut value, mut error) = totals(&heap);
    let mut subdivisions = 0;
    while error > settings.abs_tol.max(settings.rel_tol * value.abs()) {
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::Convergence {
                value: value.to_f64().unwrap_or(f64::NAN),
                estimate: error.to_f64().unwrap_or(f64::NAN),
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = (worst.a + worst.b) / lit(2.0);
        if !(worst.a < mid && mid < worst.b) {
            // panel cannot be split further in this precision
            return Err(Error::Convergence {
                value: value.to_f64().unwrap_or(f64::NAN),
                estimate: error.to_f64().unwrap_or(f64::NAN),
                subdivisions,
            });
        }
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // recompute from the panels to shed the running-update drift
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let mut v = CompensatedSum::new();
    let mut e = CompensatedSum::new();
    for p in &panels {
        v.add(p.value);
        e.add(p.error);
    }
    Ok(Integral {
        value: v.value(),
        error: e.value(),
        evaluations,
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> QuadratureSettings<f64> {
        QuadratureSettings::default()
    }

    #[test]
    fn elementary_integrals() {
        let r = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, &settings()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        let r = integrate_adaptive(|x| x * x, 0.0, 1.0, &settings()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.subdivisions, 0);
    }

    #[test]
    fn oscillatory_integrand_with_hint() {
        let exact = 500.0f64.sin() / 50.0;
        let s = settings().with_hint(50.0);
        let r = integrate_adaptive(|x: f64| (50.0 * x).cos(), 0.0, 10.0, &s).unwrap();
        assert!((r.value - exact).abs() < 1e-12, "{} vs {exact}", r.value);
        // without the hint the adaptive refinement still gets there
        let r = integrate_adaptive(|x: f64| (50.0 * x).cos(), 0.0, 10.0, &settings()).unwrap();
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn polynomials_exact_on_one_panel() {
        // Kronrod-15 integrates degree <= 22 exactly; the Gauss-7 partner
        // degree <= 13, so the estimate vanishes up to roundoff there.
        for degree in 0..=13 {
            let r = integrate_adaptive(|x: f64| x.powi(degree), -1.0, 2.0, &settings()).unwrap();
            let exact = (2.0f64.powi(degree + 1) - (-1.0f64).powi(degree + 1)) / (degree + 1) as f64;
            assert!(((r.value - exact) / exact.abs().max(1.0)).abs() < 1e-14, "degree {degree}");
            assert_eq!(r.subdivisions, 0);
        }
    }

    #[test]
    fn budget_exhaustion_reports_partial_result() {
        let s = QuadratureSettings {
            max_subdivisions: 3,
            ..settings()
        };
        let err = integrate_adaptive(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &s).unwrap_err();
        match err {
            Error::Convergence { value, estimate, subdivisions } => {
                assert!(value.is_finite() && estimate > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_and_invalid_bounds() {
        let r = integrate_adaptive(|x: f64| x, 1.0, 1.0, &settings()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(integrate_adaptive(|x: f64| x, 2.0, 1.0, &settings()).is_err());
        let bad = QuadratureSettings { abs_tol: 0.0, ..settings() };
        assert!(integrate_adaptive(|x: f64| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn single_precision() {
        let s = QuadratureSettings::<f32> {
            abs_tol: 1e-5,
            rel_tol: 1e-5,
            ..Default::default()
        };
        let r = integrate_adaptive(|x: f32| x.exp(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - (1.0f32.exp() - 1.0)).abs() < 1e-5);
    }
}
