//! Spherical-harmonics (Legendre) Pn system.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg::abs_matrix;

/// Legendre polynomials `P_0(μ) … P_n(μ)`.
pub fn legendre_all(n: usize, mu: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(mu);
    }
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * mu * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// Tridiagonal flux matrix of the Pn equations for Legendre moments.
pub fn pn_flux_matrix(n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n + 1, n + 1);
    for l in 0..=n {
        let lf = l as f64;
        if l < n {
            a[(l, l + 1)] = (lf + 1.0) / (2.0 * lf + 1.0);
        }
        if l > 0 {
            a[(l, l - 1)] = lf / (2.0 * lf + 1.0);
        }
    }
    a
}

/// Reaction diagonal `−σ_a − (T/2) l(l+1)`.
pub fn pn_reaction(n: usize, sigma_a: f64, t: f64) -> Vec<f64> {
    (0..=n).map(|l| -sigma_a - 0.5 * t * (l * (l + 1)) as f64).collect()
}

pub fn pn_system(n: usize, sigma_a: f64, t: f64) -> (DMatrix<f64>, Vec<f64>) {
    (pn_flux_matrix(n), pn_reaction(n, sigma_a, t))
}

/// Flux matrix together with its absolute value for upwinding.
#[derive(Clone, Debug)]
pub struct PnSystem {
    pub n: usize,
    pub flux: DMatrix<f64>,
    pub abs_flux: DMatrix<f64>,
}

impl PnSystem {
    pub fn new(n: usize) -> Result<Self> {
        let flux = pn_flux_matrix(n);
        let abs_flux = abs_matrix(&flux)?;
        Ok(Self { n, flux, abs_flux })
    }
}
