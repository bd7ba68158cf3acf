//! Adaptive Bogacki-Shampine RK2(3) for method-of-lines systems.

use crate::error::{MomentError, Result};

/// A semi-discrete system `u' = f(t, u)`.
pub trait OdeSystem {
    fn rhs(&self, t: f64, u: &[f64], du: &mut [f64]) -> Result<()>;

    /// Largest stable step at state `u` (CFL and relaxation bounds).
    fn max_dt(&self, u: &[f64]) -> f64;

    /// Maps a stage value back into the admissible set; returns how many
    /// cells were changed.
    fn project(&self, _u: &mut [f64]) -> usize {
        0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Rk23Options {
    pub atol: f64,
    pub rtol: f64,
    pub dt_min: f64,
    pub max_steps: usize,
}

impl Default for Rk23Options {
    fn default() -> Self {
        Self { atol: 1e-8, rtol: 1e-6, dt_min: 1e-12, max_steps: 10_000_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub projections: usize,
    pub dt_min_used: f64,
    pub dt_max_used: f64,
}

/// One accepted step, for run logs.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub t: f64,
    pub dt: f64,
    pub projected: usize,
}

/// Integrates from `t0` through each time in `stops` (increasing), landing
/// on them exactly and calling `on_stop(t, u)` there.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    u: &mut Vec<f64>,
    t0: f64,
    stops: &[f64],
    opts: &Rk23Options,
    mut on_stop: impl FnMut(f64, &[f64]) -> Result<()>,
    mut on_step: impl FnMut(StepInfo),
) -> Result<IntegrationStats> {
    let n = u.len();
    let mut stats = IntegrationStats { dt_min_used: f64::INFINITY, ..Default::default() };
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut t = t0;
    sys.rhs(t, u, &mut k1)?;
    stats.rhs_evals += 1;
    let mut h = f64::INFINITY;
    for &stop in stops {
        if stop < t {
            return Err(MomentError::Domain(format!("stop time {stop} before current time {t}")));
        }
        while t < stop {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(MomentError::NoConvergence { what: "rk23 step budget", iterations: opts.max_steps });
            }
            let cap = sys.max_dt(u);
            h = h.min(cap);
            let last = t + h >= stop * (1.0 - 1e-14) || h >= stop - t;
            let proposed = h;
            if last {
                h = stop - t;
            }
            if h < opts.dt_min.max(1e-14 * t.abs()) {
                return Err(MomentError::StepUnderflow { t });
            }
            let mut projected = 0;
            let stage = |coef: &[(f64, &[f64])], out: &mut Vec<f64>| {
                for i in 0..n {
                    let mut v = u[i];
                    for (c, k) in coef {
                        v += c * k[i];
                    }
                    out[i] = v;
                }
            };
            let attempt = (|| -> Result<f64> {
                stage(&[(0.5 * h, &k1)], &mut y);
                projected += sys.project(&mut y);
                sys.rhs(t + 0.5 * h, &y, &mut k2)?;
                stage(&[(0.75 * h, &k2)], &mut y);
                projected += sys.project(&mut y);
                sys.rhs(t + 0.75 * h, &y, &mut k3)?;
                stage(&[(2.0 / 9.0 * h, &k1), (h / 3.0, &k2), (4.0 / 9.0 * h, &k3)], &mut y1);
                projected += sys.project(&mut y1);
                sys.rhs(t + h, &y1, &mut k4)?;
                let mut acc = 0.0;
                for i in 0..n {
                    let e = h * (-5.0 / 72.0 * k1[i] + k2[i] / 12.0 + k3[i] / 9.0 - k4[i] / 8.0);
                    let sc = opts.atol + opts.rtol * u[i].abs().max(y1[i].abs());
                    acc += (e / sc) * (e / sc);
                }
                Ok((acc / n.max(1) as f64).sqrt())
            })();
            stats.rhs_evals += 3;
            match attempt {
                Ok(err) if err <= 1.0 => {
                    t = if last { stop } else { t + h };
                    std::mem::swap(u, &mut y1);
                    std::mem::swap(&mut k1, &mut k4);
                    stats.accepted += 1;
                    stats.projections += projected;
                    stats.dt_min_used = stats.dt_min_used.min(h);
                    stats.dt_max_used = stats.dt_max_used.max(h);
                    on_step(StepInfo { t, dt: h, projected });
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 5.0) };
                    h *= grow;
                    if last {
                        // a step shortened to hit the stop says nothing about the next one
                        h = h.max(proposed);
                    }
                }
                Ok(err) => {
                    stats.rejected += 1;
                    h *= (0.9 * err.powf(-1.0 / 3.0)).clamp(0.1, 0.5);
                }
                Err(
                    e
                    @ (MomentError::NoConvergence { .. } | MomentError::Domain(_) | MomentError::NotRealizable { .. }),
                ) => {
                    // closures can fail on poor stage values; retry smaller
                    stats.rejected += 1;
                    h *= 0.25;
                    if h < opts.dt_min {
                        return Err(e);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        on_stop(t, u)?;
    }
    if stats.accepted == 0 {
        stats.dt_min_used = 0.0;
    }
    Ok(stats)
}
