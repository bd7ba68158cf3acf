//! Moments of the Laplace-Beltrami collision operator `(T/2) ∂_μ((1−μ²)∂_μψ)`.

use crate::moments::MixedMomentVector;

/// Point data of the representing density needed by the mixed moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicroscopicData {
    /// `ψ(0)`, continuous across `μ = 0`.
    pub psi_at_0: f64,
    /// Zeroth half moments `ψ₊⁽⁰⁾`, `ψ₋⁽⁰⁾`.
    pub mass_plus: f64,
    pub mass_minus: f64,
}

/// Mixed-moment source in the flat layout `(0, plus₁..ₙ, minus₁..ₙ)`.
pub fn laplace_beltrami_moments(g: &MixedMomentVector, micro: MicroscopicData, t: f64) -> Vec<f64> {
    let n = g.order();
    let mut out = vec![0.0; 2 * n + 1];
    laplace_beltrami_into(g.psi0, &g.plus, &g.minus, micro, t, &mut out);
    out
}

/// Writes the source into `out` (length `2n + 1`); `out[0]` is set to 0.
pub fn laplace_beltrami_into(_psi0: f64, plus: &[f64], minus: &[f64], micro: MicroscopicData, t: f64, out: &mut [f64]) {
    let n = plus.len();
    let h = 0.5 * t;
    out[0] = 0.0;
    for (side, half, mass, off) in [(1.0, plus, micro.mass_plus, 0), (-1.0, minus, micro.mass_minus, n)] {
        for m in 1..=n {
            let mf = m as f64;
            let v = if m == 1 {
                side * micro.psi_at_0 - 2.0 * half[0]
            } else {
                let lower = if m == 2 { mass } else { half[m - 3] };
                mf * (mf - 1.0) * lower - mf * (mf + 1.0) * half[m - 1]
            };
            out[off + m] = h * v;
        }
    }
}

/// Full monomial moments: `∫ μᵐ Δ_μψ = m(m−1)ψ⁽ᵐ⁻²⁾ − m(m+1)ψ⁽ᵐ⁾`.
pub fn laplace_beltrami_full(u: &[f64], t: f64) -> Vec<f64> {
    (0..u.len())
        .map(|m| {
            let mf = m as f64;
            let lower = if m >= 2 { mf * (mf - 1.0) * u[m - 2] } else { 0.0 };
            0.5 * t * (lower - mf * (mf + 1.0) * u[m])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{mixed_moments_of_density, TabulatedDensity};
    use crate::quadrature::CompositeRule;

    #[test]
    fn equilibrium_is_steady() {
        for n in 1..6 {
            let g = MixedMomentVector::equilibrium(3.0, n);
            let micro = MicroscopicData { psi_at_0: 1.5, mass_plus: 1.5, mass_minus: 1.5 };
            let s = laplace_beltrami_moments(&g, micro, 2.0);
            assert!(s.iter().all(|v| v.abs() < 1e-14), "n={n}: {s:?}");
        }
    }

    #[test]
    fn matches_quadrature_of_operator() {
        let f = |m: f64| 1.0 + 0.5 * m + (2.0 * m).cos() + 0.2 * (3.0 * m).exp();
        // Δ_μ f = −2μ f' + (1−μ²) f''
        let lap = |m: f64| {
            let d1 = 0.5 - 2.0 * (2.0 * m).sin() + 0.6 * (3.0 * m).exp();
            let d2 = -4.0 * (2.0 * m).cos() + 1.8 * (3.0 * m).exp();
            -2.0 * m * d1 + (1.0 - m * m) * d2
        };
        let d = TabulatedDensity::sample(40001, f).unwrap();
        let n = 4;
        let g = mixed_moments_of_density(&d, n).unwrap();
        let p = CompositeRule::new(0.0, 1.0, 8, 16);
        let mm = CompositeRule::new(-1.0, 0.0, 8, 16);
        let micro = MicroscopicData { psi_at_0: f(0.0), mass_plus: p.integrate(f), mass_minus: mm.integrate(f) };
        let t = 1.7;
        let s = laplace_beltrami_moments(&g, micro, t);
        assert_eq!(s[0], 0.0);
        for j in 1..=n {
            let ep = 0.5 * t * p.integrate(|m| m.powi(j as i32) * lap(m));
            let em = 0.5 * t * mm.integrate(|m| m.powi(j as i32) * lap(m));
            assert!((s[j] - ep).abs() < 1e-6, "plus {j}");
            assert!((s[n + j] - em).abs() < 1e-6, "minus {j}");
        }
    }

    #[test]
    fn full_moments() {
        // ψ = μ: Δψ = −2μ, ∫μ·(−2μ) = −4/3
        let s = laplace_beltrami_full(&[0.0, 2.0 / 3.0, 0.0], 2.0);
        assert_eq!(s[0], 0.0);
        assert!((s[1] + 4.0 / 3.0).abs() < 1e-15);
    }
}
