//! Mixed-moment realizability, moment closures and finite-volume moment
//! solvers for the one-dimensional Fokker-Planck equation
//!
//! ```text
//! ∂ₜψ + μ ∂ₓψ + σ_a ψ = (T/2) ∂_μ((1 − μ²) ∂_μ ψ) + Q,   μ ∈ [-1, 1].
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod closures;
pub mod error;
pub mod fp;
pub mod fv;
pub mod kinetic;
pub mod linalg;
pub mod metrics;
pub mod moments;
pub mod ode;
pub mod par;
pub mod quadrature;
pub mod realizability;
pub mod runner;
pub mod scenario;

pub use error::{MomentError, Result};
pub use moments::{
    mixed_moments_of_density, moments_of_density, Atom, AtomicDensity, Density, Interval, MixedMomentVector,
    MomentVector, NormalizedMixedMoments, TabulatedDensity, ZeroSide,
};
pub use par::Exec;
