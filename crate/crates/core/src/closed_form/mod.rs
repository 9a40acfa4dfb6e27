//! Bath-averaged dynamics through the characteristic function of `Ω`,
//! at a cost linear in the number of bath modes.

pub mod identity;
pub mod integral;
pub mod phi;
pub mod stationary;

pub use identity::bessel_identity_residual;
pub use integral::{bessel_transform, coherence_integral, magnetization_integral, BesselIntegrals, Convention, IntegralRun, IntegralSettings};
pub use phi::{effective_sigma2, exponent_term, phi_exact, phi_gaussian, CharacteristicFunctionSpec, PhiEvaluator, PhiTable};
pub use stationary::{stationary_oracle, stationary_oracle_closed_form, stationary_oracle_with_nodes, stationary_printed, stationary_report, stationary_z, StationaryReport};
