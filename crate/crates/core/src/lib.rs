//! Central spin coupled to a bath of free spins through `σ⁰_x Σ g_k σ^k_z`.
//!
//! Engines, from most to least brute force:
//!
//! * [`oracle`]: dense evolution of the full `2^(N+1)`-dimensional state,
//! * [`configsum`]: exact sum over the `2^N` Ising configurations of the bath,
//! * [`closed_form`]: Bessel-integral evaluators driven by the bath
//!   characteristic function, whose cost grows linearly in `N`.
//!
//! Everything is generic over the float type; the aliases below fix `f64`.

// Node tables keep their published digits; `!(x > 0)` also rejects NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod configsum;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Real;
pub use trajectory::Engine;

pub type Model = model::ModelSpec<f64>;
pub type Mode = model::BathMode<f64>;
pub type Beta = model::InverseTemperature<f64>;
pub type State = model::ReducedState<f64>;
pub type Series = trajectory::Trajectory<f64>;
