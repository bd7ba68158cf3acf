//! Model selection and the solver-facing closure evaluation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::closures::entropy::{m1_closure_with, mm1_closure_with};
use crate::closures::kershaw::{k1_closure, mk1_closure, mk2_closure_robust};
use crate::closures::laplace_beltrami::MicroscopicData;
use crate::closures::mpn::MpnBasis;
use crate::closures::pn::PnSystem;
use crate::error::{MomentError, Result};
use crate::moments::NormalizedMixedMoments;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Pn(usize),
    M1,
    K1,
    MPn(usize),
    MM1,
    MK1,
    MK2,
}

/// Numerical flux used for a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Upwind,
    Hll,
    Kinetic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub newton_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { newton_tol: 1e-12, max_iter: 200 }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Pn(n) => write!(f, "pn:{n}"),
            ModelKind::M1 => f.write_str("m1"),
            ModelKind::K1 => f.write_str("k1"),
            ModelKind::MPn(n) => write!(f, "mpn:{n}"),
            ModelKind::MM1 => f.write_str("mm1"),
            ModelKind::MK1 => f.write_str("mk1"),
            ModelKind::MK2 => f.write_str("mk2"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let order = |rest: &str| -> Result<usize> {
            match rest.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(MomentError::UnknownModel(s.to_string())),
            }
        };
        match lower.as_str() {
            "m1" => Ok(ModelKind::M1),
            "k1" => Ok(ModelKind::K1),
            "mm1" => Ok(ModelKind::MM1),
            "mk1" => Ok(ModelKind::MK1),
            "mk2" => Ok(ModelKind::MK2),
            _ => {
                if let Some(rest) = lower.strip_prefix("mpn:") {
                    Ok(ModelKind::MPn(order(rest)?))
                } else if let Some(rest) = lower.strip_prefix("pn:") {
                    Ok(ModelKind::Pn(order(rest)?))
                } else {
                    Err(MomentError::UnknownModel(s.to_string()))
                }
            }
        }
    }
}

impl ModelKind {
    /// File-name friendly label (`pn:7` → `pn7`).
    pub fn file_label(&self) -> String {
        self.to_string().replace(':', "")
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, ModelKind::MPn(_) | ModelKind::MM1 | ModelKind::MK1 | ModelKind::MK2)
    }

    /// Highest tracked moment order.
    pub fn order(&self) -> usize {
        match self {
            ModelKind::Pn(n) | ModelKind::MPn(n) => *n,
            ModelKind::M1 | ModelKind::K1 | ModelKind::MM1 | ModelKind::MK1 => 1,
            ModelKind::MK2 => 2,
        }
    }

    pub fn n_vars(&self) -> usize {
        if self.is_mixed() {
            2 * self.order() + 1
        } else {
            self.order() + 1
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            ModelKind::Pn(_) => Scheme::Upwind,
            ModelKind::M1 | ModelKind::K1 => Scheme::Hll,
            _ => Scheme::Kinetic,
        }
    }

    /// Nonlinear closures that can only be evaluated on realizable states.
    pub fn needs_projection(&self) -> bool {
        matches!(self, ModelKind::M1 | ModelKind::K1 | ModelKind::MM1 | ModelKind::MK1 | ModelKind::MK2)
    }
}

/// Closed quantities of a mixed model for one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedClosure {
    /// `ψ₊⁽ⁿ⁺¹⁾` and `ψ₋⁽ⁿ⁺¹⁾`.
    pub flux_plus: f64,
    pub flux_minus: f64,
    pub micro: MicroscopicData,
}

/// A closure model with its precomputed data.
#[derive(Clone, Debug)]
pub struct ClosureModel {
    kind: ModelKind,
    pub options: SolverOptions,
    pn: Option<Arc<PnSystem>>,
    mpn: Option<Arc<MpnBasis>>,
}

impl PartialEq for ClosureModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.options == other.options
    }
}

impl fmt::Display for ClosureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl FromStr for ClosureModel {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Distance kept from the realizability boundary when evaluating MM1.
const MM1_INTERIOR: f64 = 1e-11;

impl ClosureModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let pn = match kind {
            ModelKind::Pn(n) => Some(Arc::new(PnSystem::new(n)?)),
            _ => None,
        };
        let mpn = match kind {
            ModelKind::MPn(n) => Some(Arc::new(MpnBasis::new(n)?)),
            ModelKind::MK1 => Some(Arc::new(MpnBasis::new(1)?)),
            ModelKind::MK2 => Some(Arc::new(MpnBasis::new(2)?)),
            _ => None,
        };
        Ok(Self { kind, options: SolverOptions::default(), pn, mpn })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_vars(&self) -> usize {
        self.kind.n_vars()
    }

    pub fn order(&self) -> usize {
        self.kind.order()
    }

    pub fn is_mixed(&self) -> bool {
        self.kind.is_mixed()
    }

    pub fn scheme(&self) -> Scheme {
        self.kind.scheme()
    }

    pub fn file_label(&self) -> String {
        self.kind.file_label()
    }

    /// Every model's characteristic speeds are bounded by one in magnitude.
    pub fn wave_speed_bound(&self) -> f64 {
        1.0
    }

    pub fn pn_system(&self) -> Option<&PnSystem> {
        self.pn.as_deref()
    }

    pub fn mpn_basis(&self) -> Option<&MpnBasis> {
        self.mpn.as_deref()
    }

    /// `ψ⁽²⁾` for the full-moment nonlinear models from `(ψ⁽⁰⁾, ψ⁽¹⁾)`.
    pub fn close_full(&self, u: &[f64]) -> Result<f64> {
        let (psi0, psi1) = (u[0], u[1]);
        if !(psi0 > 0.0) {
            return if psi0 == 0.0 && psi1 == 0.0 {
                Ok(0.0)
            } else {
                Err(MomentError::Domain(format!("full moments need psi0 > 0, got {psi0}")))
            };
        }
        let phi = (psi1 / psi0).clamp(-1.0, 1.0);
        let chi = match self.kind {
            ModelKind::M1 => {
                let phi = phi.clamp(-1.0 + 1e-12, 1.0 - 1e-12);
                m1_closure_with(phi, self.options.newton_tol, self.options.max_iter)?
            }
            ModelKind::K1 => k1_closure(phi)?,
            other => return Err(MomentError::Domain(format!("{other} is not a full-moment closure"))),
        };
        Ok(chi * psi0)
    }

    /// Closed flux moments and microscopic data for a flat mixed state.
    pub fn close_mixed(&self, u: &[f64]) -> Result<MixedClosure> {
        let n = self.order();
        if u.len() != 2 * n + 1 {
            return Err(MomentError::Domain(format!("{} expects {} moments, got {}", self.kind, 2 * n + 1, u.len())));
        }
        let psi0 = u[0];
        match self.kind {
            ModelKind::MPn(_) => {
                let c = self.mpn.as_ref().expect("built in new").closure(u)?;
                Ok(MixedClosure {
                    flux_plus: c.flux_plus,
                    flux_minus: c.flux_minus,
                    micro: MicroscopicData { psi_at_0: c.psi_at_0, mass_plus: c.mass_plus, mass_minus: c.mass_minus },
                })
            }
            ModelKind::MM1 => {
                if !(psi0 > 0.0) {
                    return vacuum(psi0, u);
                }
                let (p, m) = interior_first_order(u[1] / psi0, u[2] / psi0, MM1_INTERIOR);
                let c = mm1_closure_with(psi0, p * psi0, m * psi0, self.options.newton_tol, self.options.max_iter)?;
                Ok(MixedClosure {
                    flux_plus: c.psi2_plus,
                    flux_minus: c.psi2_minus,
                    micro: MicroscopicData { psi_at_0: c.psi_at_0, mass_plus: c.mass_plus, mass_minus: c.mass_minus },
                })
            }
            ModelKind::MK1 | ModelKind::MK2 => {
                if !(psi0 > 0.0) {
                    return vacuum(psi0, u);
                }
                let micro = self.kershaw_micro(u)?;
                let (fp, fm) = if self.kind == ModelKind::MK1 {
                    let (a, b) = mk1_closure(u[1] / psi0, u[2] / psi0)?;
                    (a * psi0, b * psi0)
                } else {
                    let g = NormalizedMixedMoments {
                        plus: vec![u[1] / psi0, u[2] / psi0],
                        minus: vec![u[3] / psi0, u[4] / psi0],
                    };
                    let (a, b) = mk2_closure_robust(&g)?;
                    (a * psi0, b * psi0)
                };
                Ok(MixedClosure { flux_plus: fp, flux_minus: fm, micro })
            }
            other => Err(MomentError::Domain(format!("{other} is not a mixed-moment closure"))),
        }
    }

    /// Point data for the Kershaw models from the MPn reconstruction, kept
    /// within the bounds of a nonnegative density.
    fn kershaw_micro(&self, u: &[f64]) -> Result<MicroscopicData> {
        let c = self.mpn.as_ref().expect("built in new").closure(u)?;
        let psi0 = u[0];
        let mass_plus = c.mass_plus.clamp(0.0, psi0);
        Ok(MicroscopicData { psi_at_0: c.psi_at_0.max(0.0), mass_plus, mass_minus: psi0 - mass_plus })
    }
}

fn vacuum(psi0: f64, u: &[f64]) -> Result<MixedClosure> {
    if psi0 == 0.0 && u.iter().all(|v| *v == 0.0) {
        Ok(MixedClosure {
            flux_plus: 0.0,
            flux_minus: 0.0,
            micro: MicroscopicData { psi_at_0: 0.0, mass_plus: 0.0, mass_minus: 0.0 },
        })
    } else {
        Err(MomentError::Domain(format!("mixed closure needs psi0 > 0, got {psi0}")))
    }
}

/// Moves normalized first-order moments `(φ₊, φ₋)` along the ray to
/// `(1/4, −1/4)` until every first-order condition has slack `eps`.
pub fn interior_first_order(p: f64, m: f64, eps: f64) -> (f64, f64) {
    // conditions: φ₊ ≥ eps, −φ₋ ≥ eps, 1 − φ₊ + φ₋ ≥ eps; each is affine along the ray
    let mut alpha: f64 = 1.0;
    let mut limit = |v: f64, v_eq: f64| {
        if v < eps {
            alpha = alpha.min((v_eq - eps) / (v_eq - v));
        }
    };
    limit(p, 0.25);
    limit(-m, 0.25);
    limit(1.0 - p + m, 0.5);
    let alpha = alpha.clamp(0.0, 1.0);
    (alpha * p + (1.0 - alpha) * 0.25, alpha * m - (1.0 - alpha) * 0.25)
}
