//! Mixed polynomial closure MPn: a continuous piecewise polynomial ansatz
//! `α + Σ β±⁽ⁱ⁾ μⁱ` on each half interval.
//!
//! The moment matrix is Hilbert-like and badly conditioned, so every linear
//! map needed by the solver is computed once in exact rational arithmetic.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MomentError, Result};

/// `∫₀¹ μᵏ dμ` and `∫₋₁⁰ μᵏ dμ` as exact rationals.
fn half_integral(k: usize, minus: bool) -> BigRational {
    let v = BigRational::new(BigInt::one(), BigInt::from(k + 1));
    if minus && k % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Moment matrix: rows are the constraints `(ψ⁽⁰⁾, ψ₊⁽¹..ⁿ⁾, ψ₋⁽¹..ⁿ⁾)`,
/// columns the coefficients `(α, β₊⁽¹..ⁿ⁾, β₋⁽¹..ⁿ⁾)`.
fn moment_matrix(n: usize) -> Vec<Vec<BigRational>> {
    let dim = 2 * n + 1;
    let mut m = vec![vec![BigRational::zero(); dim]; dim];
    m[0][0] = BigRational::from_integer(BigInt::from(2));
    for i in 1..=n {
        m[0][i] = half_integral(i, false);
        m[0][n + i] = half_integral(i, true);
    }
    for j in 1..=n {
        m[j][0] = half_integral(j, false);
        m[n + j][0] = half_integral(j, true);
        for i in 1..=n {
            m[j][i] = half_integral(i + j, false);
            m[n + j][n + i] = half_integral(i + j, true);
        }
    }
    m
}

fn invert(mut a: Vec<Vec<BigRational>>) -> Result<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(MomentError::Singular("MPn moment system"))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let (sa, si) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] = &a[r][j] - sa;
                    inv[r][j] = &inv[r][j] - si;
                }
            }
        }
    }
    Ok(inv)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Precomputed linear maps of the MPn closure of order `n`.
#[derive(Clone, Debug)]
pub struct MpnBasis {
    pub n: usize,
    /// Moments → coefficients `(α, β₊, β₋)`.
    pub solve: DMatrix<f64>,
    /// Rows mapping moments to `ψ₊⁽ⁿ⁺¹⁾`, `ψ₋⁽ⁿ⁺¹⁾`, `ψ(0)`, `ψ₊⁽⁰⁾`, `ψ₋⁽⁰⁾`.
    closure_plus: Vec<f64>,
    closure_minus: Vec<f64>,
    at_zero: Vec<f64>,
    mass_plus: Vec<f64>,
    mass_minus: Vec<f64>,
}

/// Coefficients of the fitted ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct MpnCoefficients {
    pub alpha: f64,
    pub beta_plus: Vec<f64>,
    pub beta_minus: Vec<f64>,
}

/// MPn closure output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpnClosure {
    pub flux_plus: f64,
    pub flux_minus: f64,
    pub psi_at_0: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
}

impl MpnBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(MomentError::Domain("MPn needs n >= 1".into()));
        }
        let dim = 2 * n + 1;
        let inv = invert(moment_matrix(n))?;
        // a linear functional of the ansatz, given by its values on the coefficient basis
        let row = |functional: Vec<BigRational>| -> Vec<f64> {
            (0..dim)
                .map(|c| {
                    let s = functional.iter().enumerate().fold(BigRational::zero(), |acc, (k, f)| acc + f * &inv[k][c]);
                    to_f64(&s)
                })
                .collect()
        };
        let moment_functional = |order: usize, minus: bool| -> Vec<BigRational> {
            let mut f = vec![BigRational::zero(); dim];
            f[0] = half_integral(order, minus);
            let off = if minus { n } else { 0 };
            for i in 1..=n {
                f[off + i] = half_integral(order + i, minus);
            }
            f
        };
        let mut zero = vec![BigRational::zero(); dim];
        zero[0] = BigRational::one();
        Ok(Self {
            n,
            solve: DMatrix::from_fn(dim, dim, |i, j| to_f64(&inv[i][j])),
            closure_plus: row(moment_functional(n + 1, false)),
            closure_minus: row(moment_functional(n + 1, true)),
            at_zero: row(zero),
            mass_plus: row(moment_functional(0, false)),
            mass_minus: row(moment_functional(0, true)),
        })
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != 2 * self.n + 1 {
            return Err(MomentError::Domain(format!(
                "MP{} expects {} moments, got {}",
                self.n,
                2 * self.n + 1,
                u.len()
            )));
        }
        Ok(())
    }

    /// Fits the ansatz to the flat mixed moments `u`.
    pub fn solve(&self, u: &[f64]) -> Result<MpnCoefficients> {
        self.check(u)?;
        let c: Vec<f64> = (0..u.len()).map(|i| (0..u.len()).map(|j| self.solve[(i, j)] * u[j]).sum()).collect();
        Ok(MpnCoefficients { alpha: c[0], beta_plus: c[1..=self.n].to_vec(), beta_minus: c[self.n + 1..].to_vec() })
    }

    pub fn closure(&self, u: &[f64]) -> Result<MpnClosure> {
        self.check(u)?;
        let dot = |r: &[f64]| r.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
        Ok(MpnClosure {
            flux_plus: dot(&self.closure_plus),
            flux_minus: dot(&self.closure_minus),
            psi_at_0: dot(&self.at_zero),
            mass_plus: dot(&self.mass_plus),
            mass_minus: dot(&self.mass_minus),
        })
    }
}

impl MpnCoefficients {
    pub fn eval(&self, mu: f64) -> f64 {
        let b = if mu >= 0.0 { &self.beta_plus } else { &self.beta_minus };
        self.alpha + b.iter().enumerate().map(|(i, c)| c * mu.powi(i as i32 + 1)).sum::<f64>()
    }
}
