//! Moment vectors, Hankel matrices and moments of concrete densities.

use nalgebra::DMatrix;

use crate::error::{MomentError, Result};
use crate::quadrature::trapezoid;

/// A support interval `[a, b]` inside `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub const FULL: Interval = Interval { a: -1.0, b: 1.0 };
    pub const PLUS: Interval = Interval { a: 0.0, b: 1.0 };
    pub const MINUS: Interval = Interval { a: -1.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a < -1.0 || b > 1.0 {
            return Err(MomentError::Domain(format!("invalid interval [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu >= self.a && mu <= self.b
    }
}

/// Full moments `(ψ⁽⁰⁾, …, ψ⁽ⁿ⁾)` of a density on an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    values: Vec<f64>,
    interval: Interval,
}

impl MomentVector {
    pub fn new(values: Vec<f64>, interval: Interval) -> Result<Self> {
        if values.is_empty() {
            return Err(MomentError::Domain("moment vector needs at least psi0".into()));
        }
        Ok(Self { values, interval })
    }

    /// Moments on `[-1, 1]`.
    pub fn full(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Interval::FULL)
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// `A(k) = (ψ⁽ⁱ⁺ʲ⁾)_{i,j=0..k}`.
    pub fn hankel_a(&self, k: usize) -> Result<DMatrix<f64>> {
        self.need(2 * k)?;
        Ok(DMatrix::from_fn(k + 1, k + 1, |i, j| self.values[i + j]))
    }

    /// `B(k) = (ψ⁽ⁱ⁺ʲ⁺¹⁾)_{i,j=0..k}`.
    pub fn hankel_b(&self, k: usize) -> Result<DMatrix<f64>> {
        self.need(2 * k + 1)?;
        Ok(DMatrix::from_fn(k + 1, k + 1, |i, j| self.values[i + j + 1]))
    }

    /// `C(k) = (ψ⁽ⁱ⁺ʲ⁾)_{i,j=1..k}`.
    pub fn hankel_c(&self, k: usize) -> Result<DMatrix<f64>> {
        self.need(2 * k)?;
        Ok(DMatrix::from_fn(k, k, |i, j| self.values[i + j + 2]))
    }

    fn need(&self, order: usize) -> Result<()> {
        if order > self.order() {
            Err(MomentError::OrderTooLow { order: self.order(), size: order })
        } else {
            Ok(())
        }
    }
}

/// Mixed moments `(ψ⁽⁰⁾, ψ₊⁽¹⁾…ψ₊⁽ⁿ⁾, ψ₋⁽¹⁾…ψ₋⁽ⁿ⁾)`.
///
/// The flat layout used by the solvers is exactly this order, so a state of
/// order `n` has `2n + 1` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedMomentVector {
    pub psi0: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl MixedMomentVector {
    pub fn new(psi0: f64, plus: Vec<f64>, minus: Vec<f64>) -> Result<Self> {
        if plus.is_empty() || plus.len() != minus.len() {
            return Err(MomentError::Domain(format!(
                "mixed moments need equal, nonzero half orders (got {} and {})",
                plus.len(),
                minus.len()
            )));
        }
        Ok(Self { psi0, plus, minus })
    }

    /// Reads the flat layout of length `2n + 1`.
    pub fn from_slice(u: &[f64]) -> Result<Self> {
        if u.len() < 3 || u.len().is_multiple_of(2) {
            return Err(MomentError::Domain(format!("flat mixed vector of length {}", u.len())));
        }
        let n = (u.len() - 1) / 2;
        Ok(Self { psi0: u[0], plus: u[1..=n].to_vec(), minus: u[n + 1..].to_vec() })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + 2 * self.order());
        v.push(self.psi0);
        v.extend_from_slice(&self.plus);
        v.extend_from_slice(&self.minus);
        v
    }

    pub fn order(&self) -> usize {
        self.plus.len()
    }

    /// Mixed moments of `ψ ≡ ψ⁽⁰⁾/2`.
    pub fn equilibrium(psi0: f64, n: usize) -> Self {
        let plus: Vec<f64> = (1..=n).map(|j| 0.5 * psi0 / (j as f64 + 1.0)).collect();
        let minus = plus.iter().enumerate().map(|(i, v)| if i % 2 == 0 { -v } else { *v }).collect();
        Self { psi0, plus, minus }
    }

    /// `s·self + t·other` (same order).
    pub fn combine(&self, s: f64, other: &Self, t: f64) -> Self {
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| s * x + t * y).collect();
        Self {
            psi0: s * self.psi0 + t * other.psi0,
            plus: mix(&self.plus, &other.plus),
            minus: mix(&self.minus, &other.minus),
        }
    }

    /// Parity image under `μ → −μ`.
    pub fn reflect(&self) -> Self {
        let flip = |v: &[f64]| v.iter().enumerate().map(|(i, x)| if i % 2 == 0 { -x } else { *x }).collect();
        Self { psi0: self.psi0, plus: flip(&self.minus), minus: flip(&self.plus) }
    }

    pub fn normalized(&self) -> Option<NormalizedMixedMoments> {
        (self.psi0 > 0.0).then(|| NormalizedMixedMoments {
            plus: self.plus.iter().map(|v| v / self.psi0).collect(),
            minus: self.minus.iter().map(|v| v / self.psi0).collect(),
        })
    }
}

/// `φ±⁽ʲ⁾ = ψ±⁽ʲ⁾ / ψ⁽⁰⁾`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedMixedMoments {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl NormalizedMixedMoments {
    pub fn order(&self) -> usize {
        self.plus.len()
    }

    pub fn to_mixed(&self, psi0: f64) -> MixedMomentVector {
        MixedMomentVector {
            psi0,
            plus: self.plus.iter().map(|v| v * psi0).collect(),
            minus: self.minus.iter().map(|v| v * psi0).collect(),
        }
    }
}

/// How an atom sitting exactly at `μ = 0` is attributed to the half intervals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeroSide {
    /// Counted in the full moments; the half zeroth moments share it equally.
    #[default]
    Full,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub position: f64,
    pub zero_side: ZeroSide,
}

impl Atom {
    pub fn new(weight: f64, position: f64) -> Self {
        Self { weight, position, zero_side: ZeroSide::Full }
    }
}

/// Weighted sum of Dirac masses `Σ ρᵢ δ(μ − μᵢ)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomicDensity {
    pub atoms: Vec<Atom>,
}

impl AtomicDensity {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(a.weight >= 0.0) || !(-1.0..=1.0).contains(&a.position) {
                return Err(MomentError::Domain(format!(
                    "atom (weight {}, position {}) outside the admissible set",
                    a.weight, a.position
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(w, p)| Atom::new(w, p)).collect())
    }

    /// Weight of `atom` seen by the `j`-th moment over `interval`.
    fn share(atom: &Atom, interval: Interval, j: usize) -> f64 {
        if !interval.contains(atom.position) {
            return 0.0;
        }
        let half_split = atom.position == 0.0 && interval.a < 0.0 && interval.b > 0.0;
        if atom.position == 0.0 && !half_split {
            if j > 0 {
                return 0.0;
            }
            let on_plus = interval.a == 0.0;
            return match atom.zero_side {
                ZeroSide::Full => 0.5 * atom.weight,
                ZeroSide::Plus if on_plus => atom.weight,
                ZeroSide::Minus if !on_plus => atom.weight,
                _ => 0.0,
            };
        }
        atom.weight * atom.position.powi(j as i32)
    }
}

/// Pointwise samples of a density on sorted nodes in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedDensity {
    mu: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(mu: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if mu.len() < 2 || mu.len() != values.len() {
            return Err(MomentError::Domain("tabulated density needs ≥ 2 matching samples".into()));
        }
        if mu.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MomentError::Domain("nodes must be strictly increasing".into()));
        }
        if mu[0] != -1.0 || *mu.last().unwrap() != 1.0 {
            return Err(MomentError::Domain("nodes must include both endpoints".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(MomentError::Domain("tabulated density must be nonnegative".into()));
        }
        Ok(Self { mu, values })
    }

    /// Samples `f` on `n` uniform nodes including the endpoints.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mu = uniform_nodes(n);
        let values = mu.iter().map(|&m| f(m)).collect();
        Self::new(mu, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.mu
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Piecewise-linear interpolant.
    pub fn eval(&self, m: f64) -> f64 {
        let i = self.mu.partition_point(|&x| x < m);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.mu.len() {
            return *self.values.last().unwrap();
        }
        let (x0, x1) = (self.mu[i - 1], self.mu[i]);
        let s = (m - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - s) + self.values[i] * s
    }

    /// Nodes restricted to `interval`, with interpolated endpoints inserted.
    fn restricted(&self, interval: Interval) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![interval.a];
        let mut y = vec![self.eval(interval.a)];
        for (&m, &v) in self.mu.iter().zip(&self.values) {
            if m > interval.a && m < interval.b {
                x.push(m);
                y.push(v);
            }
        }
        x.push(interval.b);
        y.push(self.eval(interval.b));
        (x, y)
    }
}

/// `n` uniform nodes on `[-1, 1]`, endpoints included; the middle node is
/// exactly zero when `n` is odd.
pub fn uniform_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    let h = 2.0 / (n - 1) as f64;
    (0..n)
        .map(|j| {
            if 2 * j + 1 == n {
                0.0
            } else if j + 1 == n {
                1.0
            } else {
                -1.0 + j as f64 * h
            }
        })
        .collect()
}

/// Anything whose moments over an interval can be evaluated.
pub trait Density {
    /// `∫_a^b μʲ ψ(μ) dμ` for `j = 0..=n`.
    fn moments_on(&self, n: usize, interval: Interval) -> Vec<f64>;
}

impl Density for AtomicDensity {
    fn moments_on(&self, n: usize, interval: Interval) -> Vec<f64> {
        (0..=n).map(|j| self.atoms.iter().map(|a| Self::share(a, interval, j)).sum()).collect()
    }
}

impl Density for TabulatedDensity {
    fn moments_on(&self, n: usize, interval: Interval) -> Vec<f64> {
        let (x, y) = self.restricted(interval);
        (0..=n)
            .map(|j| {
                let f: Vec<f64> = x.iter().zip(&y).map(|(m, v)| v * m.powi(j as i32)).collect();
                trapezoid(&x, &f)
            })
            .collect()
    }
}

/// Moments `ψ⁽⁰⁾…ψ⁽ⁿ⁾` of `d` over `interval`.
pub fn moments_of_density<D: Density + ?Sized>(d: &D, n: usize, interval: Interval) -> MomentVector {
    MomentVector { values: d.moments_on(n, interval), interval }
}

/// Mixed moments of order `n ≥ 1`.
pub fn mixed_moments_of_density<D: Density + ?Sized>(d: &D, n: usize) -> Result<MixedMomentVector> {
    if n == 0 {
        return Err(MomentError::Domain("mixed moments need order ≥ 1".into()));
    }
    let p = d.moments_on(n, Interval::PLUS);
    let m = d.moments_on(n, Interval::MINUS);
    Ok(MixedMomentVector { psi0: p[0] + m[0], plus: p[1..].to_vec(), minus: m[1..].to_vec() })
}
