//! Minimum-entropy closures: full-moment M1 and mixed-moment MM1.

use crate::error::{MomentError, Result};

/// Below this `|β|` the exponential-integral maps use Taylor expansions.
const SERIES_CUTOFF: f64 = 0.05;

/// Langevin function `L(β) = coth β − 1/β`, the normalized first moment of
/// `e^{βμ}` on `[-1, 1]`.
pub fn langevin(b: f64) -> f64 {
    if b.abs() < SERIES_CUTOFF {
        let b2 = b * b;
        b * (1.0 / 3.0 + b2 * (-1.0 / 45.0 + b2 * (2.0 / 945.0 + b2 * (-1.0 / 4725.0 + b2 * 2.0 / 93555.0))))
    } else {
        1.0 / b.tanh() - 1.0 / b
    }
}

/// `L'(β) = 1/β² − 1/sinh² β`.
pub fn langevin_derivative(b: f64) -> f64 {
    let a = b.abs();
    if a < SERIES_CUTOFF {
        let b2 = b * b;
        1.0 / 3.0 + b2 * (-1.0 / 15.0 + b2 * (2.0 / 189.0 + b2 * (-1.0 / 675.0)))
    } else if a > 350.0 {
        1.0 / (b * b)
    } else {
        let e = (-2.0 * a).exp();
        1.0 / (b * b) - 4.0 * e / ((1.0 - e) * (1.0 - e))
    }
}

/// Eddington factor `χ(β) = 1 − 2L(β)/β`, the normalized second moment.
pub fn eddington_of_beta(b: f64) -> f64 {
    if b.abs() < SERIES_CUTOFF {
        let b2 = b * b;
        1.0 / 3.0 + b2 * (2.0 / 45.0 + b2 * (-4.0 / 945.0 + b2 * (2.0 / 4725.0 + b2 * (-4.0 / 93555.0))))
    } else {
        1.0 - 2.0 * langevin(b) / b
    }
}

/// Inverse of the Langevin function by safeguarded Newton on `[0, 1/(1−|φ|)]`.
pub fn inverse_langevin(phi: f64, tol: f64, max_iter: usize) -> Result<f64> {
    if !(phi.abs() < 1.0) {
        return Err(MomentError::Domain(format!("|phi1| = {} must be below 1", phi.abs())));
    }
    let t = phi.abs();
    if t == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0 / (1.0 - t));
    // Padé-type starting guess
    let mut b = (t * (3.0 - t * t) / (1.0 - t * t)).clamp(lo, hi);
    for _ in 0..max_iter {
        let f = langevin(b) - t;
        if f.abs() <= tol * t.max(1e-300) {
            return Ok(b.copysign(phi));
        }
        if f > 0.0 {
            hi = b;
        } else {
            lo = b;
        }
        let mut next = b - f / langevin_derivative(b);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - b).abs() <= 1e-15 * b.abs() {
            return Ok(next.copysign(phi));
        }
        b = next;
    }
    Err(MomentError::NoConvergence { what: "M1 dual solve", iterations: max_iter })
}

/// M1 Eddington factor `φ⁽²⁾` as a function of `φ⁽¹⁾`.
pub fn m1_closure(phi1: f64) -> Result<f64> {
    m1_closure_with(phi1, 1e-12, 200)
}

pub fn m1_closure_with(phi1: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let t = phi1.abs();
    if t > 1.0 + 1e-12 || t.is_nan() {
        return Err(MomentError::Domain(format!("|phi1| = {t} exceeds 1")));
    }
    if t >= 1.0 - 1e-14 {
        return Ok(1.0);
    }
    let b = inverse_langevin(phi1, tol, max_iter)?;
    Ok(eddington_of_beta(b).clamp(t * t, 1.0))
}

/// Exponential moment maps on the half interval `[0, 1]` for `e^{bμ}`.
pub mod half {
    use super::SERIES_CUTOFF;

    /// `log ∫₀¹ e^{bμ} dμ`.
    pub fn log_f0(b: f64) -> f64 {
        if b.abs() < 1e-10 {
            0.5 * b
        } else if b > 0.0 {
            b + (-(-b).exp_m1() / b).ln()
        } else {
            (b.exp_m1() / b).ln()
        }
    }

    /// Normalized first moment `m(b) = 1/(1 − e^{−b}) − 1/b`.
    pub fn mean(b: f64) -> f64 {
        if b.abs() < SERIES_CUTOFF {
            let b2 = b * b;
            0.5 + b * (1.0 / 12.0 + b2 * (-1.0 / 720.0 + b2 * (1.0 / 30240.0 - b2 / 1209600.0)))
        } else {
            1.0 / (-(-b).exp_m1()) - 1.0 / b
        }
    }

    /// Variance `m'(b)` of μ under the normalized half density.
    pub fn variance(b: f64) -> f64 {
        let a = b.abs();
        if a < SERIES_CUTOFF {
            let b2 = b * b;
            1.0 / 12.0 + b2 * (-1.0 / 240.0 + b2 * (1.0 / 6048.0 - b2 / 172800.0))
        } else if a > 700.0 {
            1.0 / (b * b)
        } else {
            let em = (-a).exp_m1();
            1.0 / (b * b) - (-a).exp() / (em * em)
        }
    }

    /// Normalized second moment.
    pub fn second(b: f64) -> f64 {
        let m = mean(b);
        variance(b) + m * m
    }

    /// Inverse of [`mean`] via the Langevin inverse: `m(b) = (1 + L(b/2))/2`.
    pub fn inverse_mean(t: f64, tol: f64, max_iter: usize) -> crate::Result<f64> {
        Ok(2.0 * super::inverse_langevin(2.0 * t - 1.0, tol, max_iter)?)
    }
}

/// Lagrange multipliers of `ψ = exp(α + β±μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyDual {
    pub alpha: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
}

/// Normalized quantities of the MM1 ansatz for given half multipliers.
#[derive(Clone, Copy, Debug)]
struct Mm1Eval {
    log_z: f64,
    /// Fraction of the mass on `[0, 1]`, and its complement computed without cancellation.
    w: f64,
    w_minus: f64,
    mean_p: f64,
    mean_m: f64,
    var_p: f64,
    var_m: f64,
}

fn mm1_eval(bp: f64, bm: f64) -> Mm1Eval {
    // the minus half maps to [0, 1] under μ → −μ with multiplier −β₋
    let (lp, lm) = (half::log_f0(bp), half::log_f0(-bm));
    let mx = lp.max(lm);
    let log_z = mx + ((lp - mx).exp() + (lm - mx).exp()).ln();
    let w = 1.0 / (1.0 + (lm - lp).exp());
    let w_minus = 1.0 / (1.0 + (lp - lm).exp());
    Mm1Eval {
        log_z,
        w,
        w_minus,
        mean_p: half::mean(bp),
        mean_m: half::mean(-bm),
        var_p: half::variance(bp),
        var_m: half::variance(-bm),
    }
}

/// Solves for the MM1 multipliers reproducing `(ψ⁽⁰⁾, ψ₊⁽¹⁾, ψ₋⁽¹⁾)`.
///
/// With `α` eliminated the problem is the minimization of the strictly
/// convex `log Z(β₊, β₋) − β₊φ₊ − β₋φ₋`, solved by damped Newton; a
/// bracketed one-dimensional search over the mass split is the fallback.
pub fn mm1_dual_solve(psi0: f64, psi_p: f64, psi_m: f64) -> Result<EntropyDual> {
    mm1_dual_solve_with(psi0, psi_p, psi_m, 1e-12, 200)
}

pub fn mm1_dual_solve_with(psi0: f64, psi_p: f64, psi_m: f64, tol: f64, max_iter: usize) -> Result<EntropyDual> {
    Ok(mm1_solve(psi0, psi_p, psi_m, tol, max_iter)?.0)
}

/// Multipliers together with the half mass fractions `(w, 1 − w)`.
///
/// Near the corners of the realizable set the fractions cannot be recovered
/// from the multipliers (they differ by `exp` of a difference of numbers of
/// size `|β|`), so they are carried along from the solve.
fn mm1_solve(psi0: f64, psi_p: f64, psi_m: f64, tol: f64, max_iter: usize) -> Result<(EntropyDual, f64, f64)> {
    if !(psi0 > 0.0) {
        return Err(MomentError::Domain(format!("MM1 needs psi0 > 0, got {psi0}")));
    }
    let (fp, fm) = (psi_p / psi0, psi_m / psi0);
    if !(fp > 0.0 && fm < 0.0 && fp - fm < 1.0) {
        return Err(MomentError::Domain(format!(
            "MM1 needs strictly realizable moments, got phi+ = {fp}, phi- = {fm}"
        )));
    }
    let (bp, bm, w, wm) = match mm1_newton(fp, fm, tol, max_iter) {
        Ok(b) => b,
        Err(_) => mm1_split_search(fp, fm, tol, max_iter)?,
    };
    // α from the heavier half
    let alpha = if w >= wm { psi0.ln() + w.ln() - half::log_f0(bp) } else { psi0.ln() + wm.ln() - half::log_f0(-bm) };
    Ok((EntropyDual { alpha, beta_plus: bp, beta_minus: bm }, w, wm))
}

fn mm1_newton(fp: f64, fm: f64, tol: f64, max_iter: usize) -> Result<(f64, f64, f64, f64)> {
    let objective = |bp: f64, bm: f64| mm1_eval(bp, bm).log_z - bp * fp - bm * fm;
    // start from the per-half Langevin inverse at the middle of the admissible split
    let w0 = 0.5 * (fp + 1.0 + fm);
    let (mut bp, mut bm) =
        match (half::inverse_mean(fp / w0, 1e-8, 100), half::inverse_mean(-fm / (1.0 - w0), 1e-8, 100)) {
            (Ok(a), Ok(b)) => (a, -b),
            _ => (0.0, 0.0),
        };
    let mut f = objective(bp, bm);
    for _ in 0..max_iter {
        let e = mm1_eval(bp, bm);
        let g1 = e.w * e.mean_p - fp;
        let g2 = -e.w_minus * e.mean_m - fm;
        // relative to each half: a tiny half must still be resolved
        let res = (g1 / fp).abs().max((g2 / fm).abs());
        if res <= tol {
            return Ok((bp, bm, e.w, e.w_minus));
        }
        let ww = e.w * e.w_minus;
        let h11 = e.w * e.var_p + ww * e.mean_p * e.mean_p;
        let h22 = e.w_minus * e.var_m + ww * e.mean_m * e.mean_m;
        let h12 = ww * e.mean_p * e.mean_m;
        let det = h11 * h22 - h12 * h12;
        if !(det > 0.0) || !det.is_finite() {
            break;
        }
        let d1 = -(h22 * g1 - h12 * g2) / det;
        let d2 = -(h11 * g2 - h12 * g1) / det;
        let slope = g1 * d1 + g2 * d2;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (nbp, nbm) = (bp + step * d1, bm + step * d2);
            let nf = objective(nbp, nbm);
            if nf.is_finite() && nf <= f + 1e-4 * step * slope + 1e-15 * f.abs() {
                bp = nbp;
                bm = nbm;
                f = nf;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // objective is flat to rounding: accept if the residual is small
            if res <= 1e3 * tol {
                return Ok((bp, bm, e.w, e.w_minus));
            }
            break;
        }
    }
    Err(MomentError::NoConvergence { what: "MM1 dual Newton", iterations: max_iter })
}

/// For a fixed mass split each half is a scalar inverse problem; the
/// continuity of the exponential ansatz at 0 is restored by bisection on
/// the split (the mismatch is monotone in it). The search variable is the
/// mass fraction of the lighter half so that a nearly empty half keeps its
/// relative precision.
fn mm1_split_search(fp: f64, fm: f64, tol: f64, max_iter: usize) -> Result<(f64, f64, f64, f64)> {
    // (w, 1 − w) from the search variable
    let minus_light = fp - fm > 0.5 + fp;
    let split = |v: f64| if minus_light { (1.0 - v, v) } else { (v, 1.0 - v) };
    let betas = |v: f64| -> Result<(f64, f64)> {
        let (w, wm) = split(v);
        let bp = half::inverse_mean((fp / w).min(1.0 - 1e-16), tol, max_iter)?;
        let bm = -half::inverse_mean((-fm / wm).min(1.0 - 1e-16), tol, max_iter)?;
        Ok((bp, bm))
    };
    // log ψ(0⁺) − log ψ(0⁻) = log w − log F0(β₊) − log(1−w) + log F0(−β₋)
    let mismatch = |v: f64| -> Result<f64> {
        let (bp, bm) = betas(v)?;
        let (w, wm) = split(v);
        Ok(w.ln() - half::log_f0(bp) - wm.ln() + half::log_f0(-bm))
    };
    let (mut lo, mut hi) = if minus_light { (-fm, 1.0 - fp) } else { (fp, 1.0 + fm) };
    let span = hi - lo;
    lo += 1e-14 * span;
    hi -= 1e-14 * span;
    let mut m_lo = mismatch(lo)?;
    for _ in 0..400 {
        // geometric bisection while the bracket spans decades
        let mid = if hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let m = mismatch(mid)?;
        if (m > 0.0) == (m_lo > 0.0) {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo {
            break;
        }
    }
    let v = 0.5 * (lo + hi);
    let (bp, bm) = betas(v)?;
    let (w, wm) = split(v);
    Ok((bp, bm, w, wm))
}

/// MM1 closure output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mm1Closure {
    pub psi2_plus: f64,
    pub psi2_minus: f64,
    pub psi_at_0: f64,
    /// Zeroth half moments of the ansatz.
    pub mass_plus: f64,
    pub mass_minus: f64,
    pub dual: EntropyDual,
}

pub fn mm1_closure(psi0: f64, psi_p: f64, psi_m: f64) -> Result<Mm1Closure> {
    mm1_closure_with(psi0, psi_p, psi_m, 1e-12, 200)
}

pub fn mm1_closure_with(psi0: f64, psi_p: f64, psi_m: f64, tol: f64, max_iter: usize) -> Result<Mm1Closure> {
    let (dual, w, wm) = mm1_solve(psi0, psi_p, psi_m, tol, max_iter)?;
    let (mp, mm) = (psi0 * w, psi0 * wm);
    Ok(Mm1Closure {
        psi2_plus: mp * half::second(dual.beta_plus),
        psi2_minus: mm * half::second(-dual.beta_minus),
        psi_at_0: dual.alpha.exp(),
        mass_plus: mp,
        mass_minus: mm,
        dual,
    })
}
