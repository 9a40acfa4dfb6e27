//! Characteristic function `Φ(x) = ⟨e^{ixΩ}⟩` of the bath field `Ω = Σ_k g_k s_k`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{InverseTemperature, ModelSpec};
use crate::numerics::{PiecewiseChebyshev, TableSettings};
use crate::scalar::{lit, Real};

/// Baths larger than this are evaluated through a [`PhiTable`].
pub const PHI_TABLE_MIN_MODES: usize = 64;

/// Which characteristic function drives the integral evaluators.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacteristicFunctionSpec<T> {
    /// `Π_k [cos g_k x - i tanh(βω_k) sin g_k x]` for the model's own bath.
    ExactProduct(ModelSpec<T>),
    /// `exp(-C x² / (2 cosh² βω))`, the large-bath limit for zero-mean couplings.
    Gaussian {
        c_total: T,
        beta: InverseTemperature<T>,
        omega: T,
    },
}

impl<T: Real> CharacteristicFunctionSpec<T> {
    pub fn gaussian(c_total: T, beta: InverseTemperature<T>, omega: T) -> Result<Self> {
        if !(c_total >= T::zero()) || !c_total.is_finite() {
            return Err(Error::invalid("c_total", "must be finite and non-negative"));
        }
        if !omega.is_finite() {
            return Err(Error::invalid("omega", "must be finite"));
        }
        Ok(Self::Gaussian { c_total, beta, omega })
    }

    /// `Φ(x)` for real `x`.
    pub fn eval(&self, x: T) -> Complex<T> {
        match self {
            Self::ExactProduct(model) => phi_exact(model, x),
            Self::Gaussian { c_total, beta, omega } => {
                Complex::new(phi_gaussian(*c_total, *beta, *omega, x), T::zero())
            }
        }
    }

    /// True when `Φ` has no imaginary part anywhere.
    pub fn is_real(&self) -> bool {
        match self {
            Self::ExactProduct(model) => model
                .modes()
                .iter()
                .all(|m| m.coupling == T::zero() || model.beta().tanh_beta_omega(m.omega) == T::zero()),
            Self::Gaussian { .. } => true,
        }
    }

    /// Angular frequency beyond which `Φ` carries negligible weight: the
    /// smaller of `Σ|g_k|` and mean plus six standard deviations of `Ω`.
    pub fn bandwidth(&self) -> T {
        let six = lit::<T>(6.0);
        match self {
            Self::ExactProduct(model) => {
                let beta = model.beta();
                let (mut span, mut mean, mut var) = (T::zero(), T::zero(), T::zero());
                for m in model.modes() {
                    let tau = beta.tanh_beta_omega(m.omega);
                    span += m.coupling.abs();
                    mean -= m.coupling * tau;
                    var += m.coupling * m.coupling / beta.cosh2_beta_omega(m.omega);
                }
                span.min(mean.abs() + six * var.sqrt())
            }
            Self::Gaussian { c_total, beta, omega } => {
                six * effective_sigma2(*c_total, *beta, *omega).sqrt()
            }
        }
    }
}

/// `Φ(x) = Π_k [cos(g_k x) - i tanh(βω_k) sin(g_k x)]`.
pub fn phi_exact<T: Real>(model: &ModelSpec<T>, x: T) -> Complex<T> {
    let beta = model.beta();
    let mut acc = Complex::new(T::one(), T::zero());
    for m in model.modes() {
        let (s, c) = (m.coupling * x).sin_cos();
        acc *= Complex::new(c, -beta.tanh_beta_omega(m.omega) * s);
    }
    acc
}

/// `A_k(x)` with `exp(A_k) = cos(gx) - i tanh(βω) sin(gx)`:
///
/// ```text
/// Re A = ½ ln(cos² gx + tanh² βω sin² gx)
/// Im A = -arctan(tanh βω tan gx), unwrapped to be continuous in x.
/// ```
pub fn exponent_term<T: Real>(g: T, omega: T, beta: InverseTemperature<T>, x: T) -> Complex<T> {
    let u = g * x;
    let tau = beta.tanh_beta_omega(omega);
    let sech2 = beta.cosh2_beta_omega(omega).recip();
    let sin_u = u.sin();
    // cos² + τ² sin² = 1 - sech² sin²
    let re = (-(sech2 * sin_u * sin_u)).ln_1p() / lit(2.0);

    let pi = T::PI();
    let k = (u / pi).round();
    let v = u - k * pi;
    let sign = if tau < T::zero() { -T::one() } else { T::one() };
    let theta = sign * (k * pi + (tau.abs() * v.tan()).atan());
    Complex::new(re, -theta)
}

/// Effective variance `σ² = C / cosh²(βω)` of the Gaussian bath field.
pub fn effective_sigma2<T: Real>(c_total: T, beta: InverseTemperature<T>, omega: T) -> T {
    c_total / beta.cosh2_beta_omega(omega)
}

/// `exp(-C x² / (2 cosh² βω)) = exp(-σ² x² / 2)`.
pub fn phi_gaussian<T: Real>(c_total: T, beta: InverseTemperature<T>, omega: T, x: T) -> T {
    (-effective_sigma2(c_total, beta, omega) * x * x / lit(2.0)).exp()
}

/// `Φ` on `[0, reach]` as a piecewise Chebyshev interpolant, for baths where
/// the product costs too much per call. Negative arguments use
/// `Φ(-x) = conj Φ(x)`.
#[derive(Debug, Clone)]
pub struct PhiTable<T> {
    table: PiecewiseChebyshev<T, 2>,
}

impl<T: Real> PhiTable<T> {
    pub fn build(spec: &CharacteristicFunctionSpec<T>, reach: T, abs_tol: T) -> Result<Self> {
        let reach = reach.max(lit(1e-3));
        let band = spec.bandwidth().max(lit(1e-3));
        let settings = TableSettings {
            abs_tol,
            // one period of the fastest significant component
            max_panel_width: Some(lit::<T>(2.0) * T::PI() / band),
            ..TableSettings::default()
        };
        let table = PiecewiseChebyshev::build(
            |x| {
                let z = spec.eval(x);
                [z.re, z.im]
            },
            T::zero(),
            reach,
            &settings,
        )?;
        Ok(Self { table })
    }

    pub fn reach(&self) -> T {
        self.table.domain().1
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        let [re, im] = self.table.eval(x.abs());
        if x < T::zero() {
            Complex::new(re, -im)
        } else {
            Complex::new(re, im)
        }
    }
}

/// `Φ` either evaluated directly or read from a table.
#[derive(Debug, Clone)]
pub enum PhiEvaluator<T> {
    Direct(CharacteristicFunctionSpec<T>),
    Table(PhiTable<T>),
}

impl<T: Real> PhiEvaluator<T> {
    /// Picks a table for large exact baths, direct evaluation otherwise.
    pub fn new(spec: &CharacteristicFunctionSpec<T>, reach: T) -> Result<Self> {
        match spec {
            CharacteristicFunctionSpec::ExactProduct(m) if m.len() > PHI_TABLE_MIN_MODES => {
                Ok(Self::Table(PhiTable::build(spec, reach, lit(1e-13))?))
            }
            _ => Ok(Self::Direct(spec.clone())),
        }
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        match self {
            Self::Direct(spec) => spec.eval(x),
            Self::Table(t) => t.eval(x),
        }
    }
}
