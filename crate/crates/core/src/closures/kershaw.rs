//! Kershaw closures: full-moment K1 and mixed-moment MK1, MK2.

use crate::error::{MomentError, Result};
use crate::moments::NormalizedMixedMoments;

const INPUT_TOL: f64 = 1e-12;
const DEGENERATE: f64 = 1e-13;

/// `φ⁽²⁾ = (2φ⁽¹⁾² + 1)/3`.
pub fn k1_closure(phi1: f64) -> Result<f64> {
    if !(phi1.abs() <= 1.0 + INPUT_TOL) {
        return Err(MomentError::Domain(format!("K1 needs |phi1| <= 1, got {phi1}")));
    }
    Ok((2.0 * phi1 * phi1 + 1.0) / 3.0)
}

fn check_first_order(p: f64, m: f64) -> Result<()> {
    if p >= -INPUT_TOL && m <= INPUT_TOL && p - m <= 1.0 + INPUT_TOL {
        Ok(())
    } else {
        Err(MomentError::Domain(format!("first-order mixed moments ({p}, {m}) are not realizable")))
    }
}

/// `Φ±⁽²⁾ = ±Φ±⁽¹⁾/3 ± (2/3)Φ±⁽¹⁾(Φ₊⁽¹⁾ − Φ₋⁽¹⁾)`.
pub fn mk1_closure(p: f64, m: f64) -> Result<(f64, f64)> {
    check_first_order(p, m)?;
    let d = p - m;
    let w = (1.0 + 2.0 * d) / 3.0;
    Ok((p * w, -m * w))
}

/// Third moments of the lower boundary measure, `Φ±⁽²⁾²/Φ±⁽¹⁾`, with the
/// removable singularity at `Φ±⁽¹⁾ = 0` taken as 0.
pub fn mk2_lower(g: &NormalizedMixedMoments) -> (f64, f64) {
    let term = |p1: f64, p2: f64| if p1 == 0.0 { 0.0 } else { p2 * p2 / p1 };
    (term(g.plus[0], g.plus[1]), term(g.minus[0], g.minus[1]))
}

fn guard(d: f64) -> Result<f64> {
    if d.abs() < DEGENERATE || !d.is_finite() {
        Err(MomentError::DegenerateDenominator("MK2 upper boundary"))
    } else {
        Ok(d)
    }
}

fn k_term(g: &NormalizedMixedMoments) -> f64 {
    let (p1, p2, m1, m2) = (g.plus[0], g.plus[1], g.minus[0], g.minus[1]);
    p2 * m1 * m1 + m2 * p1 * p1 - m2 * p2
}

/// Upper-boundary third moment on the plus side.
pub fn mk2_upper_plus(g: &NormalizedMixedMoments) -> Result<f64> {
    let (p1, p2, m1, m2) = (g.plus[0], g.plus[1], g.minus[0], g.minus[1]);
    let inner = guard(p2 * (m1 - p1 + 1.0))?;
    let mid = guard(m2 + k_term(g) / inner)?;
    let outer = guard(m1 - p1 - (m1 * m1 + m2 * m1) / mid + 1.0)?;
    Ok(p2 - (p1 - p2) * (p1 - p2) / outer)
}

/// Upper-boundary third moment on the minus side.
pub fn mk2_upper_minus(g: &NormalizedMixedMoments) -> Result<f64> {
    let (p1, p2, m1, m2) = (g.plus[0], g.plus[1], g.minus[0], g.minus[1]);
    let inner = guard(m2 * (m1 - p1 + 1.0))?;
    let mid = guard(p2 + k_term(g) / inner)?;
    let outer = guard(m1 - p1 + (p1 * p2 - p1 * p1) / mid + 1.0)?;
    Ok((m1 + m2) * (m1 + m2) / outer - m2)
}

fn check_second_order(g: &NormalizedMixedMoments) -> Result<()> {
    if g.order() != 2 {
        return Err(MomentError::Domain(format!("MK2 needs order-2 moments, got order {}", g.order())));
    }
    let v = crate::realizability::is_realizable_mixed(&g.to_mixed(1.0), 1e-10);
    if v.realizable {
        Ok(())
    } else {
        Err(MomentError::NotRealizable { margin: v.margin })
    }
}

/// MK2: the average of lower and upper boundary third moments.
pub fn mk2_closure(g: &NormalizedMixedMoments) -> Result<(f64, f64)> {
    check_second_order(g)?;
    let (lp, lm) = mk2_lower(g);
    Ok((0.5 * lp + 0.5 * mk2_upper_plus(g)?, 0.5 * lm + 0.5 * mk2_upper_minus(g)?))
}

/// As [`mk2_closure`], but a side whose upper formula degenerates uses the
/// lower boundary value, which is exact where the two boundaries meet.
pub fn mk2_closure_robust(g: &NormalizedMixedMoments) -> Result<(f64, f64)> {
    check_second_order(g)?;
    let (lp, lm) = mk2_lower(g);
    let p = mk2_upper_plus(g).map(|u| 0.5 * (lp + u)).unwrap_or(lp);
    let m = mk2_upper_minus(g).map(|u| 0.5 * (lm + u)).unwrap_or(lm);
    Ok((p, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{mixed_moments_of_density, AtomicDensity, MixedMomentVector};

    fn nm(p: [f64; 2], m: [f64; 2]) -> NormalizedMixedMoments {
        NormalizedMixedMoments { plus: p.to_vec(), minus: m.to_vec() }
    }

    #[test]
    fn k1_examples() {
        assert_eq!(k1_closure(0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(k1_closure(1.0).unwrap(), 1.0);
        assert_eq!(k1_closure(-1.0).unwrap(), 1.0);
        assert!((k1_closure(0.5).unwrap() - 0.5).abs() < 1e-16);
        assert!(k1_closure(1.5).is_err());
    }

    #[test]
    fn mk1_examples() {
        let (a, b) = mk1_closure(0.25, -0.25).unwrap();
        assert!((a - 1.0 / 6.0).abs() < 1e-16 && (b - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(mk1_closure(1.0, 0.0).unwrap(), (1.0, 0.0));
        let (a, b) = mk1_closure(0.3, -0.2).unwrap();
        assert!((a - (0.1 + 0.3 * (2.0 / 3.0) * 0.5)).abs() < 1e-15);
        assert!((b - (0.2 / 3.0 + 0.2 * (2.0 / 3.0) * 0.5)).abs() < 1e-15);
        assert!(mk1_closure(0.7, -0.5).is_err());
    }

    /// MK1 is a 1/3 : 2/3 mixture of two boundary measures.
    #[test]
    fn mk1_is_a_mixture_of_boundary_measures() {
        for &(p, m) in &[(0.3, -0.2), (0.1, -0.7), (0.45, -0.05)] {
            // atoms at ±1 carrying the first moments, the rest at 0
            let ends = AtomicDensity::from_pairs(&[(p, 1.0), (-m, -1.0), (1.0 - p + m, 0.0)]).unwrap();
            // each half concentrated at ±(Φ₊⁽¹⁾ − Φ₋⁽¹⁾), no mass at 0
            let d = p - m;
            let inner = AtomicDensity::from_pairs(&[(p / d, d), (-m / d, -d)]).unwrap();
            let gl = mixed_moments_of_density(&ends, 2).unwrap();
            let gu = mixed_moments_of_density(&inner, 2).unwrap();
            let mix = gl.combine(1.0 / 3.0, &gu, 2.0 / 3.0);
            assert!((mix.plus[0] - p).abs() < 1e-14 && (mix.minus[0] - m).abs() < 1e-14);
            let (a, b) = mk1_closure(p, m).unwrap();
            assert!((mix.plus[1] - a).abs() < 1e-14 && (mix.minus[1] - b).abs() < 1e-14);
        }
    }

    #[test]
    fn mk2_examples() {
        let eq = nm([0.25, 1.0 / 6.0], [-0.25, 1.0 / 6.0]);
        let (a, b) = mk2_closure(&eq).unwrap();
        assert!((a - 0.125).abs() < 1e-15 && (b + 0.125).abs() < 1e-15);
        assert!((mk2_upper_plus(&eq).unwrap() - 5.0 / 36.0).abs() < 1e-15);
        assert!((mk2_lower(&eq).0 - 1.0 / 9.0).abs() < 1e-15);

        let beam = nm([1.0, 1.0], [0.0, 0.0]);
        assert!(mk2_closure(&beam).is_err());
        assert_eq!(mk2_closure_robust(&beam).unwrap(), (1.0, 0.0));
    }

    /// The corrected lower-boundary measure reproduces the stated moments.
    #[test]
    fn mk2_lower_measure_reproduces_moments() {
        let (p1, p2, m1, m2) = (0.3, 0.2, -0.2, 0.1);
        let low = AtomicDensity::from_pairs(&[
            (p1 * p1 / p2, p2 / p1),
            (m1 * m1 / m2, m2 / m1),
            (1.0 - p1 * p1 / p2 - m1 * m1 / m2, 0.0),
        ])
        .unwrap();
        let g = mixed_moments_of_density(&low, 3).unwrap();
        assert!((g.psi0 - 1.0).abs() < 1e-14);
        assert!((g.plus[0] - p1).abs() < 1e-14 && (g.plus[1] - p2).abs() < 1e-14);
        assert!((g.minus[0] - m1).abs() < 1e-14 && (g.minus[1] - m2).abs() < 1e-14);
        let (lp, lm) = mk2_lower(&nm([p1, p2], [m1, m2]));
        assert!((g.plus[2] - lp).abs() < 1e-14 && (g.minus[2] - lm).abs() < 1e-14);
    }

    /// The upper values satisfy the odd coupling condition with equality.
    #[test]
    fn mk2_upper_meets_coupling_with_equality() {
        for &(p1, p2, m1, m2) in &[(0.3, 0.15, -0.2, 0.1), (0.25, 1.0 / 6.0, -0.25, 1.0 / 6.0), (0.5, 0.4, -0.1, 0.03)]
        {
            let g = nm([p1, p2], [m1, m2]);
            let (up, um) = (mk2_upper_plus(&g).unwrap(), mk2_upper_minus(&g).unwrap());
            let lhs = p1 + (p1 - p2).powi(2) / (p2 - up) - m1 + (m1 + m2).powi(2) / (m2 + um);
            assert!((lhs - 1.0).abs() < 1e-12, "{lhs}");
            let full = MixedMomentVector::new(1.0, vec![p1, p2, up], vec![m1, m2, um]).unwrap();
            assert!(crate::realizability::is_realizable_mixed(&full, 1e-10).realizable);
        }
    }

    #[test]
    fn mk2_parity() {
        let g = nm([0.3, 0.15], [-0.2, 0.1]);
        let r = nm([0.2, 0.1], [-0.3, 0.15]);
        let (a, b) = mk2_closure(&g).unwrap();
        let (c, d) = mk2_closure(&r).unwrap();
        assert!((a + d).abs() < 1e-14 && (b + c).abs() < 1e-14);
    }
}
