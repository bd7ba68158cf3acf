//! Moment closures.

pub mod entropy;
pub mod kershaw;
pub mod laplace_beltrami;
pub mod model;
pub mod mpn;
pub mod pn;

pub use entropy::{m1_closure, mm1_closure, mm1_dual_solve, EntropyDual, Mm1Closure};
pub use kershaw::{k1_closure, mk1_closure, mk2_closure};
pub use laplace_beltrami::{laplace_beltrami_moments, MicroscopicData};
pub use model::{ClosureModel, MixedClosure, ModelKind, Scheme, SolverOptions};
pub use mpn::MpnBasis;
pub use pn::{pn_system, PnSystem};
