//! Discrete-ordinates reference solver for the Fokker-Planck equation
//!
//! ```text
//! ∂ₜψ + μ ∂ₓψ + σ_a ψ = T/2 ∂_μ((1 − μ²) ∂_μ ψ) + Q
//! ```
//!
//! on a uniform μ grid with first-order upwinding in x and a conservative
//! three-point stencil in μ.

use crate::error::{MomentError, Result};
use crate::kinetic::KineticDensity;
use crate::metrics::DensityField;
use crate::moments::uniform_nodes;
use crate::ode::{integrate, IntegrationStats, OdeSystem, Rk23Options, StepInfo};
use crate::par::Exec;
use crate::quadrature::trapezoid_weights;
use crate::scenario::Scenario;

/// Courant number used for every explicit step bound.
pub const CFL: f64 = 0.9;

#[derive(Clone, Debug)]
pub struct FpOptions {
    pub n_x: usize,
    pub n_mu: usize,
    /// Strang splitting with implicit collision instead of adaptive RK.
    pub stiff: bool,
    pub exec: Exec,
    pub ode: Rk23Options,
}

impl FpOptions {
    pub fn new(n_x: usize, n_mu: usize) -> Self {
        Self { n_x, n_mu, stiff: false, exec: Exec::default(), ode: Rk23Options::default() }
    }
}

/// Grid, coefficients and boundary values for one scenario.
pub struct FpSystem {
    pub n_x: usize,
    pub n_mu: usize,
    pub mu: Vec<f64>,
    /// Trapezoid weights in μ.
    pub w: Vec<f64>,
    pub dmu: f64,
    pub dx: f64,
    pub x: Vec<f64>,
    sigma: Vec<f64>,
    transport: Vec<f64>,
    source: Vec<f64>,
    /// `1 − μ²` at the faces between nodes.
    face: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    exec: Exec,
}

/// Nodal values of a kinetic density on the nodes selected by `keep`; a
/// point mass of weight W goes to the nearest kept node as W / w_j.
fn nodal(d: &KineticDensity, mu: &[f64], w: &[f64], keep: impl Fn(f64) -> bool) -> Vec<f64> {
    let mut out: Vec<f64> = mu.iter().map(|&m| if keep(m) { d.smooth_value(m) } else { 0.0 }).collect();
    for &(weight, pos) in d.atoms() {
        let j =
            (0..mu.len()).filter(|&j| keep(mu[j])).min_by(|&a, &b| (mu[a] - pos).abs().total_cmp(&(mu[b] - pos).abs()));
        if let Some(j) = j {
            out[j] += weight / w[j];
        }
    }
    out
}

impl FpSystem {
    pub fn new(s: &Scenario, n_x: usize, n_mu: usize, exec: Exec) -> Result<Self> {
        if n_x < 2 || n_mu < 3 {
            return Err(MomentError::Validation(format!("grid too small: n_x = {n_x}, n_mu = {n_mu}")));
        }
        let mu = uniform_nodes(n_mu);
        let w = trapezoid_weights(&mu);
        let dmu = 2.0 / (n_mu - 1) as f64;
        let dx = (s.x_max - s.x_min) / n_x as f64;
        let edges = |i: usize| (s.x_min + i as f64 * dx, s.x_min + (i + 1) as f64 * dx);
        let avg = |c: &crate::scenario::Piecewise<f64>| -> Vec<f64> {
            (0..n_x)
                .map(|i| {
                    let (a, b) = edges(i);
                    c.cell_average(a, b)
                })
                .collect()
        };
        let face = (0..n_mu - 1)
            .map(|j| {
                let m = 0.5 * (mu[j] + mu[j + 1]);
                1.0 - m * m
            })
            .collect();
        Ok(Self {
            n_x,
            n_mu,
            x: (0..n_x).map(|i| s.x_min + (i as f64 + 0.5) * dx).collect(),
            sigma: avg(&s.sigma_a),
            transport: avg(&s.transport),
            source: avg(&s.source),
            left: nodal(&s.left.plus, &mu, &w, |m| m > 0.0),
            right: nodal(&s.right.minus, &mu, &w, |m| m < 0.0),
            face,
            mu,
            w,
            dmu,
            dx,
            exec,
        })
    }

    /// Cell-averaged initial data, `u[i * n_mu + j]`.
    pub fn initial(&self, s: &Scenario) -> Vec<f64> {
        let mut u = vec![0.0; self.n_x * self.n_mu];
        for (i, cell) in u.chunks_mut(self.n_mu).enumerate() {
            let xl = s.x_min + i as f64 * self.dx;
            for (f, d) in s.initial.pieces(xl, xl + self.dx) {
                for (c, v) in cell.iter_mut().zip(nodal(d, &self.mu, &self.w, |_| true)) {
                    *c += f * v;
                }
            }
        }
        u
    }

    /// Cell densities `Σⱼ wⱼ ψⱼ`.
    pub fn density(&self, u: &[f64]) -> Vec<f64> {
        u.chunks(self.n_mu).map(|c| c.iter().zip(&self.w).map(|(a, b)| a * b).sum()).collect()
    }

    /// Mass-weighted mean over cells of `|ψ₊⁽¹⁾/ψ⁽⁰⁾ − 1/4|`, zero at isotropy.
    pub fn anisotropy(&self, u: &[f64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for c in u.chunks(self.n_mu) {
            let mut psi0 = 0.0;
            let mut plus1 = 0.0;
            for ((&w, &mu), &v) in self.w.iter().zip(&self.mu).zip(c) {
                psi0 += w * v;
                if mu > 0.0 {
                    plus1 += w * mu * v;
                }
            }
            if psi0 > 0.0 {
                num += (plus1 / psi0 - 0.25).abs() * psi0;
                den += psi0;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// `(Lψ)_j = [(1 − μ²)_{j+½}(ψ_{j+1} − ψ_j) − (1 − μ²)_{j−½}(ψ_j − ψ_{j−1})] / (Δμ wⱼ)`.
    pub fn collision(&self, psi: &[f64], out: &mut [f64]) {
        let n = self.n_mu;
        let mut flux_lo = 0.0;
        for j in 0..n {
            let flux_hi = if j + 1 < n { self.face[j] * (psi[j + 1] - psi[j]) / self.dmu } else { 0.0 };
            out[j] = (flux_hi - flux_lo) / self.w[j];
            flux_lo = flux_hi;
        }
    }

    /// Transport, absorption and source for cell `i`, added into `out`.
    fn transport_cell(&self, i: usize, u: &[f64], out: &mut [f64]) {
        let n = self.n_mu;
        let cell = &u[i * n..(i + 1) * n];
        let left = if i == 0 { &self.left[..] } else { &u[(i - 1) * n..i * n] };
        let right = if i + 1 == self.n_x { &self.right[..] } else { &u[(i + 1) * n..(i + 2) * n] };
        let (sig, q) = (self.sigma[i], self.source[i]);
        for j in 0..n {
            let m = self.mu[j];
            let adv = if m > 0.0 { m * (cell[j] - left[j]) } else { m * (right[j] - cell[j]) };
            out[j] += -adv / self.dx - sig * cell[j] + q;
        }
    }

    /// Tridiagonal solve of `(I − c L) ψ_new = ψ` in place.
    fn implicit_collision(&self, psi: &mut [f64], c: f64) {
        let n = self.n_mu;
        let k = c / self.dmu;
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for j in 0..n {
            let lo = if j > 0 { self.face[j - 1] } else { 0.0 };
            let hi = if j + 1 < n { self.face[j] } else { 0.0 };
            let s = k / self.w[j];
            sub[j] = -s * lo;
            sup[j] = -s * hi;
            diag[j] = 1.0 + s * (lo + hi);
        }
        // Thomas algorithm; the matrix is an M-matrix so no pivoting needed
        for j in 1..n {
            let m = sub[j] / diag[j - 1];
            diag[j] -= m * sup[j - 1];
            psi[j] -= m * psi[j - 1];
        }
        psi[n - 1] /= diag[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = (psi[j] - sup[j] * psi[j + 1]) / diag[j];
        }
    }

    fn t_max(&self) -> f64 {
        self.transport.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Step bound for the transport part alone.
    pub fn advective_dt(&self) -> f64 {
        let mu_max = self.mu.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let sig = self.sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
        CFL / (mu_max / self.dx + sig)
    }

    /// Explicit bound including the collision stencil (Gershgorin radius).
    pub fn explicit_dt(&self) -> f64 {
        let n = self.n_mu;
        let mut rho = 0.0_f64;
        for j in 0..n {
            let lo = if j > 0 { self.face[j - 1] } else { 0.0 };
            let hi = if j + 1 < n { self.face[j] } else { 0.0 };
            rho = rho.max(2.0 * (lo + hi) / (self.dmu * self.w[j]));
        }
        let coll = 0.5 * self.t_max() * rho;
        // the real stability interval of RK2(3) reaches about -2.5
        let dt_coll = if coll > 0.0 { CFL * 2.5 / coll } else { f64::INFINITY };
        self.advective_dt().min(dt_coll)
    }

    /// One Strang step: half implicit collision, Heun transport, half collision.
    pub fn strang_step(&self, u: &mut Vec<f64>, dt: f64) {
        let n = self.n_mu;
        let half = |u: &mut Vec<f64>| {
            self.exec.for_each_chunk_mut(u, n, |i, c| {
                let t = self.transport[i];
                if t > 0.0 {
                    self.implicit_collision(c, 0.25 * dt * t);
                }
            });
        };
        half(u);
        let rate = |u: &[f64]| -> Vec<f64> {
            let mut k = vec![0.0; u.len()];
            self.exec.for_each_chunk_mut(&mut k, n, |i, c| self.transport_cell(i, u, c));
            k
        };
        let k1 = rate(u);
        let y: Vec<f64> = u.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
        let k2 = rate(&y);
        for ((a, k1), k2) in u.iter_mut().zip(&k1).zip(&k2) {
            *a += 0.5 * dt * (k1 + k2);
        }
        half(u);
    }
}

impl OdeSystem for FpSystem {
    fn rhs(&self, _t: f64, u: &[f64], du: &mut [f64]) -> Result<()> {
        let n = self.n_mu;
        self.exec.for_each_chunk_mut(du, n, |i, out| {
            let t = self.transport[i];
            if t > 0.0 {
                self.collision(&u[i * n..(i + 1) * n], out);
                out.iter_mut().for_each(|v| *v *= 0.5 * t);
            } else {
                out.fill(0.0);
            }
            self.transport_cell(i, u, out);
        });
        Ok(())
    }

    fn max_dt(&self, _u: &[f64]) -> f64 {
        self.explicit_dt()
    }
}

/// Densities at the sample times plus solver diagnostics.
#[derive(Clone, Debug)]
pub struct FpSolution {
    pub field: DensityField,
    /// [`FpSystem::anisotropy`] at each sample time.
    pub anisotropy: Vec<f64>,
    /// Smallest nodal value seen at any sample.
    pub min_value: f64,
    pub stats: IntegrationStats,
}

/// Runs the reference solver, recording `t = 0` and every time in `samples`.
pub fn fp_solve(s: &Scenario, opts: &FpOptions, samples: &[f64]) -> Result<FpSolution> {
    fp_solve_logged(s, opts, samples, |_| {})
}

pub fn fp_solve_logged(
    s: &Scenario,
    opts: &FpOptions,
    samples: &[f64],
    on_step: impl FnMut(StepInfo),
) -> Result<FpSolution> {
    let sys = FpSystem::new(s, opts.n_x, opts.n_mu, opts.exec)?;
    let mut u = sys.initial(s);
    let mut field = DensityField::new(sys.x.clone());
    let mut anisotropy = Vec::new();
    let mut min_value = f64::INFINITY;
    let mut record = |t: f64, u: &[f64]| -> Result<()> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(MomentError::Domain(format!("non-finite state at t = {t}")));
        }
        field.push(t, sys.density(u));
        anisotropy.push(sys.anisotropy(u));
        min_value = u.iter().fold(min_value, |a, &b| a.min(b));
        Ok(())
    };
    record(0.0, &u)?;
    let stops: Vec<f64> = samples.iter().copied().filter(|&t| t > 0.0).collect();
    let stats = if opts.stiff {
        strang_integrate(&sys, &mut u, &stops, &mut record, on_step)?
    } else {
        integrate(&sys, &mut u, 0.0, &stops, &opts.ode, &mut record, on_step)?
    };
    Ok(FpSolution { field, anisotropy, min_value, stats })
}

fn strang_integrate(
    sys: &FpSystem,
    u: &mut Vec<f64>,
    stops: &[f64],
    record: &mut impl FnMut(f64, &[f64]) -> Result<()>,
    mut on_step: impl FnMut(StepInfo),
) -> Result<IntegrationStats> {
    let dt_max = sys.advective_dt();
    let mut stats = IntegrationStats { dt_min_used: f64::INFINITY, ..Default::default() };
    let mut t = 0.0;
    for &stop in stops {
        while t < stop {
            let remaining = stop - t;
            // equal steps up to the stop
            let steps = (remaining / dt_max).ceil().max(1.0);
            let dt = remaining / steps;
            sys.strang_step(u, dt);
            t = if dt >= remaining * (1.0 - 1e-12) { stop } else { t + dt };
            stats.accepted += 1;
            stats.rhs_evals += 2;
            stats.dt_min_used = stats.dt_min_used.min(dt);
            stats.dt_max_used = stats.dt_max_used.max(dt);
            on_step(StepInfo { t, dt, projected: 0 });
        }
        record(t, u)?;
    }
    Ok(stats)
}
