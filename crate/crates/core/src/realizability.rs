//! Realizability of full and mixed moment vectors, minimal atomic measures,
//! and projection back into the realizable set.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{MomentError, Result};
use crate::linalg::{min_eigenvalue, monic_roots, pinv_quadratic, solve_vandermonde};
use crate::moments::{Atom, AtomicDensity, MixedMomentVector, MomentVector, ZeroSide};

/// Relative threshold for Hankel rank detection.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Imaginary parts below this are treated as rounding noise in root finding.
pub const ROOT_IMAG_TOL: f64 = 1e-9;

/// Which condition decided a negative verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailedCondition {
    None,
    HankelPsd,
    HausdorffPair,
    Range,
    Coupling,
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailedCondition::None => "none",
            FailedCondition::HankelPsd => "hankel-psd",
            FailedCondition::HausdorffPair => "hausdorff-pair",
            FailedCondition::Range => "range",
            FailedCondition::Coupling => "coupling",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizabilityVerdict {
    pub realizable: bool,
    /// Smallest slack over all tested conditions; negative when violated.
    pub margin: f64,
    pub failed_condition: FailedCondition,
}

#[derive(Default)]
struct Slacks(Vec<(f64, FailedCondition)>);

impl Slacks {
    fn push(&mut self, slack: f64, label: FailedCondition) {
        self.0.push((slack, label));
    }

    fn verdict(self, tol: f64) -> RealizabilityVerdict {
        let (margin, label) = self.0.into_iter().fold((f64::INFINITY, FailedCondition::None), |acc, (s, l)| {
            // NaN slacks count as violations
            let s = if s.is_nan() { f64::NEG_INFINITY } else { s };
            if s < acc.0 {
                (s, l)
            } else {
                acc
            }
        });
        let realizable = margin >= -tol;
        RealizabilityVerdict {
            realizable,
            margin,
            failed_condition: if realizable { FailedCondition::None } else { label },
        }
    }
}

/// Truncated Hausdorff moment problem on the vector's interval.
pub fn is_realizable_full(m: &MomentVector, tol: f64) -> RealizabilityVerdict {
    let n = m.order();
    let iv = m.interval();
    let (a, b) = (iv.a, iv.b);
    let mut s = Slacks::default();
    if n == 0 {
        s.push(m.get(0), FailedCondition::HankelPsd);
    } else if n % 2 == 1 {
        let k = (n - 1) / 2;
        let am = m.hankel_a(k).expect("order checked");
        let bm = m.hankel_b(k).expect("order checked");
        s.push(min_eigenvalue(&(&am * b - &bm)), FailedCondition::HausdorffPair);
        s.push(min_eigenvalue(&(&bm - &am * a)), FailedCondition::HausdorffPair);
    } else {
        let k = n / 2;
        s.push(min_eigenvalue(&m.hankel_a(k).expect("order checked")), FailedCondition::HankelPsd);
        let a1 = m.hankel_a(k - 1).expect("order checked");
        let b1 = m.hankel_b(k - 1).expect("order checked");
        let c = m.hankel_c(k).expect("order checked");
        s.push(min_eigenvalue(&(&b1 * (a + b) - &a1 * (a * b) - c)), FailedCondition::HausdorffPair);
    }
    s.verdict(tol)
}

/// Half-sequence `h[j] = ψ±⁽ʲ⁾` with `h[0]` unused.
fn half_seq(v: &[f64]) -> Vec<f64> {
    let mut h = Vec::with_capacity(v.len() + 1);
    h.push(f64::NAN);
    h.extend_from_slice(v);
    h
}

fn hankel(h: &[f64], size: usize, shift: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| h[i + j + shift])
}

/// Mixed-moment realizability, in the reduced form without half zeroth moments.
pub fn is_realizable_mixed(g: &MixedMomentVector, tol: f64) -> RealizabilityVerdict {
    let n = g.order();
    let mut s = Slacks::default();
    // coupling ψ⁽⁰⁾ − linear ≥ Σ± bᵀC†b, tested as positive semidefiniteness of
    // [[ψ⁽⁰⁾ − linear, b₊ᵀ, b₋ᵀ], [b₊, C₊, 0], [b₋, 0, C₋]]: the explicit
    // quadratic form loses accuracy when C is nearly singular
    let mut linear = 0.0;
    let mut blocks: Vec<(DMatrix<f64>, DVector<f64>)> = Vec::new();
    for (sign, half) in [(1.0, &g.plus), (-1.0, &g.minus)] {
        let h = half_seq(half);
        if n.is_multiple_of(2) {
            let k = n / 2;
            // ±B(k−1) − C(k) and C(k)
            let bm = hankel(&h, k, 1) * sign;
            let cm = hankel(&h, k, 2);
            s.push(min_eigenvalue(&(bm - &cm)), FailedCondition::HausdorffPair);
            s.push(min_eigenvalue(&cm), FailedCondition::HankelPsd);
            let bv = DVector::from_fn(k, |i, _| h[i + 1]);
            s.push(-pinv_quadratic(&cm, &bv).range_residual, FailedCondition::Range);
            blocks.push((cm, bv));
        } else {
            let k = (n - 1) / 2;
            // ±B(k), C(k) ∓ D(k)
            s.push(min_eigenvalue(&(hankel(&h, k + 1, 1) * sign)), FailedCondition::HankelPsd);
            linear += sign * h[1];
            if k > 0 {
                let cm = hankel(&h, k, 2) - hankel(&h, k, 3) * sign;
                s.push(min_eigenvalue(&cm), FailedCondition::HausdorffPair);
                let bv = DVector::from_fn(k, |i, _| h[i + 1] - sign * h[i + 2]);
                s.push(-pinv_quadratic(&cm, &bv).range_residual, FailedCondition::Range);
                blocks.push((cm, bv));
            }
        }
    }
    let size = 1 + blocks.iter().map(|b| b.1.len()).sum::<usize>();
    let mut m = DMatrix::zeros(size, size);
    m[(0, 0)] = g.psi0 - linear;
    let mut off = 1;
    for (cm, bv) in &blocks {
        let k = bv.len();
        m.view_mut((off, off), (k, k)).copy_from(cm);
        for i in 0..k {
            m[(0, off + i)] = bv[i];
            m[(off + i, 0)] = bv[i];
        }
        off += k;
    }
    s.push(min_eigenvalue(&m), FailedCondition::Coupling);
    s.verdict(tol)
}

/// Realizability check on the vector scaled to `ψ⁽⁰⁾ = 1` (for `ψ⁽⁰⁾ > 0`).
pub fn is_realizable_mixed_normalized(g: &MixedMomentVector, tol: f64) -> RealizabilityVerdict {
    if g.psi0 > 0.0 {
        is_realizable_mixed(&g.combine(1.0 / g.psi0, g, 0.0), tol)
    } else {
        is_realizable_mixed(g, tol)
    }
}

/// `g(μ) = μʳ − Σ φᵢ μⁱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingFunction {
    pub rank: usize,
    pub coefficients: Vec<f64>,
}

impl GeneratingFunction {
    pub fn eval(&self, mu: f64) -> f64 {
        let poly = self.coefficients.iter().rev().fold(0.0, |acc, c| acc * mu + c);
        mu.powi(self.rank as i32) - poly
    }

    /// Real roots, clamped into `[lo, hi]` when within `ROOT_IMAG_TOL` of it.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let c: Vec<f64> = self.coefficients.iter().map(|v| -v).collect();
        let mut out = Vec::with_capacity(self.rank);
        for z in monic_roots(&c) {
            if z.im.abs() > ROOT_IMAG_TOL {
                return Err(MomentError::Domain(format!("generating function has complex root {z}")));
            }
            let x = z.re;
            if x < lo - ROOT_IMAG_TOL || x > hi + ROOT_IMAG_TOL {
                return Err(MomentError::Domain(format!("generating function root {x} outside [{lo}, {hi}]")));
            }
            out.push(x.clamp(lo, hi));
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

/// Generating function of degree `r` for the sequence `s[0..2r]` via
/// `Φ = A(r−1)⁻¹ v(r, r−1)`.
pub fn generating_function(s: &[f64], r: usize) -> Result<GeneratingFunction> {
    if s.len() < 2 * r {
        return Err(MomentError::OrderTooLow { order: s.len().saturating_sub(1), size: 2 * r - 1 });
    }
    if r == 0 {
        return Ok(GeneratingFunction { rank: 0, coefficients: Vec::new() });
    }
    let a = DMatrix::from_fn(r, r, |i, j| s[i + j]);
    let v = DVector::from_fn(r, |i, _| s[r + i]);
    let phi = a.lu().solve(&v).ok_or(MomentError::Singular("generating function"))?;
    Ok(GeneratingFunction { rank: r, coefficients: phi.iter().copied().collect() })
}

fn is_singular(a: &DMatrix<f64>) -> bool {
    let eig = nalgebra::SymmetricEigen::new(a.clone()).eigenvalues;
    let lmax = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    lmax == 0.0 || eig.min() <= RANK_THRESHOLD * lmax
}

/// Admissible range of `ψ⁽²ᵏ⁺¹⁾` given `ψ⁽⁰⁾…ψ⁽²ᵏ⁾` on `[a, b]`.
fn next_odd_moment_range(m: &[f64], a: f64, b: f64) -> (f64, f64) {
    let k = (m.len() - 1) / 2;
    let mut ext = m.to_vec();
    ext.push(0.0);
    let am = DMatrix::from_fn(k + 1, k + 1, |i, j| ext[i + j]);
    let bm = DMatrix::from_fn(k + 1, k + 1, |i, j| ext[i + j + 1]);
    // B − aA ≥ 0 bounds x from below, bA − B ≥ 0 from above; x only enters the last diagonal entry.
    let schur = |mat: DMatrix<f64>| -> f64 {
        if k == 0 {
            return 0.0;
        }
        let top = mat.view((0, 0), (k, k)).into_owned();
        let col = mat.view((0, k), (k, 1)).column(0).into_owned();
        pinv_quadratic(&top, &col).value
    };
    let lower_mat = &bm - &am * a;
    let upper_mat = &am * b - &bm;
    let lo = a * ext[2 * k] + schur(lower_mat);
    let hi = b * ext[2 * k] - schur(upper_mat);
    (lo, hi)
}

/// Minimal atomic representing measure of a realizable full moment vector.
pub fn minimal_atomic_measure(m: &MomentVector) -> Result<AtomicDensity> {
    let iv = m.interval();
    let scale = m.get(0).abs().max(f64::MIN_POSITIVE);
    let verdict = is_realizable_full(&MomentVector::new(m.values().iter().map(|v| v / scale).collect(), iv)?, 1e-9);
    if !verdict.realizable {
        return Err(MomentError::NotRealizable { margin: verdict.margin });
    }
    let mut vals = m.values().to_vec();
    let n = m.order();
    if m.get(0) <= RANK_THRESHOLD * vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())) {
        if vals.iter().all(|v| *v == 0.0) {
            return Ok(AtomicDensity::default());
        }
        return Err(MomentError::RankDetection);
    }
    let k = n / 2;
    let mut r = k + 1;
    for j in 1..=k {
        if is_singular(&DMatrix::from_fn(j + 1, j + 1, |p, q| vals[p + q])) {
            r = j;
            break;
        }
    }
    if r == k + 1 && n.is_multiple_of(2) {
        let (lo, hi) = next_odd_moment_range(&vals, iv.a, iv.b);
        vals.push(0.5 * (lo + hi));
    }
    let gf = generating_function(&vals, r)?;
    let nodes = gf.roots_in(iv.a, iv.b)?;
    let weights = solve_vandermonde(&nodes, &vals[..r])?;
    AtomicDensity::new(nodes.into_iter().zip(weights).map(|(x, w)| Atom::new(w.max(0.0), x)).collect())
}

/// Half interval selector for mixed moments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

const DEGENERATE: f64 = 1e-13;

fn ratio(num: f64, den: f64, scale: f64) -> Result<f64> {
    if den.abs() < DEGENERATE * scale {
        Err(MomentError::DegenerateDenominator("mixed generating function"))
    } else {
        Ok(num / den)
    }
}

/// Generating function for one half of a mixed vector of order `n ≤ 6`,
/// with `γᵢ = (±1)ⁱ φ±⁽ⁱ⁾`; its roots are the half's atoms mapped to `[0, 1]`.
pub fn mixed_generating_coefficients(side: Side, g: &MixedMomentVector) -> Result<GeneratingFunction> {
    let n = g.order();
    if n > 6 {
        return Err(MomentError::Domain(format!("mixed generating functions are tabulated for n ≤ 6, got {n}")));
    }
    let half = match side {
        Side::Plus => &g.plus,
        Side::Minus => &g.minus,
    };
    let norm = if g.psi0 > 0.0 { g.psi0 } else { 1.0 };
    let s = side.sign();
    let mut gm = [0.0; 7];
    for (i, v) in half.iter().enumerate() {
        gm[i + 1] = s.powi(i as i32 + 1) * v / norm;
    }
    let [_, g1, g2, g3, g4, g5, g6] = [gm[0], gm[1], gm[2], gm[3], gm[4], gm[5], gm[6]];
    let k = n.div_ceil(2);
    let odd = n % 2 == 1;
    let sc = g1.abs().max(f64::MIN_POSITIVE);
    let coefficients = match (k, odd) {
        (1, true) => vec![1.0],
        (1, false) => vec![ratio(g2, g1, sc)?],
        (2, true) => {
            let den = g1 - g2;
            vec![-ratio(g2 - g3, den, sc)?, ratio(g1 - g3, den, sc)?]
        }
        (2, false) => {
            let den = -g2 * g2 + g1 * g3;
            let sc = sc * sc;
            vec![-ratio(-g3 * g3 + g2 * g4, den, sc)?, ratio(g1 * g4 - g2 * g3, den, sc)?]
        }
        (3, true) => {
            let d0 = g2 * g3 + g2 * g4 + g1 * (g3 - g4) - g2 * g2 - g3 * g3;
            let d1 = g1 * g4 - g2 * g4 + g2 * g2 + g3 * g3 - g3 * (g1 + g2);
            let sc = sc * sc;
            vec![
                ratio(g3 * g4 + g3 * g5 + g2 * (g4 - g5) - g3 * g3 - g4 * g4, d0, sc)?,
                ratio(g1 * g4 - g2 * g3 - g1 * g5 + g2 * g4 + g3 * g5 - g4 * g4, d1, sc)?,
                -ratio(g2 * g4 - g1 * g5 + g2 * g5 + g3 * (g1 - g4) - g2 * g2, d1, sc)?,
            ]
        }
        (3, false) => {
            let d0 = g1 * (-g4 * g4 + g3 * g5) - g2 * g2 * g5 - g3 * g3 * g3 + 2.0 * g2 * g3 * g4;
            let d1 = g5 * g2 * g2 - 2.0 * g2 * g3 * g4 + g3 * g3 * g3 - g1 * g5 * g3 + g1 * g4 * g4;
            let sc = sc * sc * sc;
            vec![
                ratio(g2 * (-g5 * g5 + g4 * g6) - g3 * g3 * g6 - g4 * g4 * g4 + 2.0 * g3 * g4 * g5, d0, sc)?,
                ratio(g3 * g3 * g5 + (-g4 * g4 - g2 * g6) * g3 - g1 * g5 * g5 + g2 * g4 * g5 + g1 * g4 * g6, d1, sc)?,
                ratio(g3 * g3 * g4 - g2 * g4 * g4 - g3 * (g1 * g6 + g2 * g5) + g2 * g2 * g6 + g1 * g4 * g5, d1, sc)?,
            ]
        }
        _ => unreachable!("1 ≤ n ≤ 6"),
    };
    Ok(GeneratingFunction { rank: k, coefficients })
}

/// Atoms of one half recovered from the tabulated generating function.
///
/// Weights solve `Σ ρⱼ νⱼⁱ = γᵢ` for `i = 1..k`, positions are mapped back by
/// `μ = ±ν`. Atoms at `μ = 0` carry no half moment of order ≥ 1 and are
/// dropped.
pub fn mixed_half_atoms(side: Side, g: &MixedMomentVector) -> Result<AtomicDensity> {
    let gf = mixed_generating_coefficients(side, g)?;
    let nu = gf.roots_in(0.0, 1.0)?;
    let s = side.sign();
    let half = match side {
        Side::Plus => &g.plus,
        Side::Minus => &g.minus,
    };
    let nonzero: Vec<f64> = nu.into_iter().filter(|v| *v > ROOT_IMAG_TOL).collect();
    let rhs: Vec<f64> = (0..nonzero.len()).map(|i| s.powi(i as i32 + 1) * half[i]).collect();
    // Σ (ρⱼνⱼ) νⱼ^{i−1} = γᵢ
    let scaled = solve_vandermonde(&nonzero, &rhs)?;
    let side_flag = if s > 0.0 { ZeroSide::Plus } else { ZeroSide::Minus };
    AtomicDensity::new(
        nonzero
            .iter()
            .zip(scaled)
            .map(|(&v, w)| Atom { weight: (w / v).max(0.0), position: s * v, zero_side: side_flag })
            .collect(),
    )
}

/// Pulls `g` along the ray towards the equilibrium vector with the same
/// `ψ⁽⁰⁾` until it is realizable within `tol` (checked on the normalized
/// vector). Realizable input is returned unchanged.
pub fn project_to_realizable(g: &MixedMomentVector, tol: f64) -> MixedMomentVector {
    project_with_alpha(g, tol).0
}

/// As [`project_to_realizable`], also returning the ray parameter α.
pub fn project_with_alpha(g: &MixedMomentVector, tol: f64) -> (MixedMomentVector, f64) {
    if is_realizable_mixed_normalized(g, tol).realizable {
        return (g.clone(), 1.0);
    }
    let eq = MixedMomentVector::equilibrium(g.psi0, g.order());
    let at = |alpha: f64| g.combine(alpha, &eq, 1.0 - alpha);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if is_realizable_mixed_normalized(&at(mid), tol).realizable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (at(lo), lo)
}
