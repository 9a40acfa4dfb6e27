//! Special functions and quadrature used by the closed-form evaluators.

pub mod bessel;
pub mod chebyshev;
pub mod erfcx;
pub mod gauss_hermite;
pub mod quadrature;
pub mod summation;

pub use bessel::{bessel_j0, bessel_j1, bessel_j1_over_x, j1_kernel};
pub use chebyshev::{PiecewiseChebyshev, TableSettings};
pub use erfcx::erfc_scaled;
pub use gauss_hermite::{gauss_hermite, normal_expectation};
pub use quadrature::{integrate_adaptive, Integral, QuadratureSettings};
pub use summation::{compensated_sum, CompensatedSum, ComplexSum};
