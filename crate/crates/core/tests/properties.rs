//! Property suites over the public API.

use moment_kit::closures::entropy::{m1_closure, mm1_closure};
use moment_kit::closures::kershaw::k1_closure;
use moment_kit::closures::ClosureModel;
use moment_kit::fp::{fp_solve, FpOptions};
use moment_kit::fv::{fv_solve, FvOptions, FvSolver};
use moment_kit::quadrature::CompositeRule;
use moment_kit::realizability::{is_realizable_full, is_realizable_mixed_normalized, minimal_atomic_measure};
use moment_kit::scenario::Scenario;
use moment_kit::{
    mixed_moments_of_density, moments_of_density, AtomicDensity, Density, Exec, Interval, MixedMomentVector,
    MomentVector, TabulatedDensity,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn full_ok(m: &MomentVector) -> bool {
    let s = m.get(0);
    is_realizable_full(&MomentVector::full(m.values().iter().map(|v| v / s).collect()).unwrap(), TOL).realizable
}

fn arb_atoms() -> impl Strategy<Value = AtomicDensity> {
    prop::collection::vec((0.01..2.0f64, -1.0..=1.0f64), 1..6)
        .prop_map(|pairs| AtomicDensity::from_pairs(&pairs).unwrap())
}

fn arb_tabulated() -> impl Strategy<Value = TabulatedDensity> {
    (11usize..42).prop_flat_map(|n| {
        prop::collection::vec(0.0..3.0f64, n).prop_filter_map("empty density", move |v| {
            (v.iter().sum::<f64>() > 1e-3)
                .then(|| TabulatedDensity::new(moment_kit::moments::uniform_nodes(n), v).unwrap())
        })
    })
}

/// Strictly positive smooth-ish density, so its moments are interior points.
fn arb_positive() -> impl Strategy<Value = TabulatedDensity> {
    prop::collection::vec(0.05..3.0f64, 21)
        .prop_map(|v| TabulatedDensity::new(moment_kit::moments::uniform_nodes(21), v).unwrap())
}

/// `exp(α + β±μ)` on the two halves, integrated with composite Gauss rules.
struct HalfExponential {
    alpha: f64,
    beta_plus: f64,
    beta_minus: f64,
}

impl Density for HalfExponential {
    fn moments_on(&self, n: usize, interval: Interval) -> Vec<f64> {
        let beta = if interval.a >= 0.0 { self.beta_plus } else { self.beta_minus };
        let rule = CompositeRule::new(interval.a, interval.b, 64, 8);
        (0..=n).map(|j| rule.integrate(|mu| mu.powi(j as i32) * (self.alpha + beta * mu).exp())).collect()
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn atomic_moments_are_realizable(d in arb_atoms(), n in 1usize..7) {
        prop_assert!(full_ok(&moments_of_density(&d, n, Interval::FULL)));
        let g = mixed_moments_of_density(&d, n).unwrap();
        prop_assert!(is_realizable_mixed_normalized(&g, TOL).realizable);
    }

    #[test]
    fn tabulated_moments_are_realizable(d in arb_tabulated(), n in 1usize..7) {
        prop_assert!(full_ok(&moments_of_density(&d, n, Interval::FULL)));
        let g = mixed_moments_of_density(&d, n).unwrap();
        prop_assert!(is_realizable_mixed_normalized(&g, TOL).realizable);
    }

    #[test]
    fn few_atoms_are_recovered_exactly(
        r in 1usize..4,
        raw in prop::collection::vec((0.2..1.0f64, 0.0..1.0f64), 3),
    ) {
        // r well separated positions inside (-0.95, 0.95)
        let slot = 1.9 / r as f64;
        let planted: Vec<(f64, f64)> = (0..r)
            .map(|i| (raw[i].0, -0.95 + slot * (i as f64 + 0.15 + 0.7 * raw[i].1)))
            .collect();
        let d = AtomicDensity::from_pairs(&planted).unwrap();
        let m = moments_of_density(&d, 2 * r, Interval::FULL);
        let got = minimal_atomic_measure(&m).unwrap();
        prop_assert_eq!(got.atoms.len(), r);
        let mut got: Vec<(f64, f64)> = got.atoms.iter().map(|a| (a.weight, a.position)).collect();
        got.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (g, p) in got.iter().zip(&planted) {
            prop_assert!((g.0 - p.0).abs() < 1e-8 && (g.1 - p.1).abs() < 1e-8, "{:?} vs {:?}", got, planted);
        }
    }

    #[test]
    fn mm1_reproduces_its_own_ansatz(alpha in -3.0..3.0f64, bp in -6.0..6.0f64, bm in -6.0..6.0f64) {
        let ansatz = HalfExponential { alpha, beta_plus: bp, beta_minus: bm };
        let g = mixed_moments_of_density(&ansatz, 2).unwrap();
        let c = mm1_closure(g.psi0, g.plus[0], g.minus[0]).unwrap();
        prop_assert!(rel_close(c.psi2_plus, g.plus[1], 1e-8), "{} vs {}", c.psi2_plus, g.plus[1]);
        prop_assert!(rel_close(c.psi2_minus, g.minus[1], 1e-8), "{} vs {}", c.psi2_minus, g.minus[1]);
        prop_assert!(rel_close(c.psi_at_0, alpha.exp(), 1e-8));
    }

    #[test]
    fn m1_reproduces_its_own_ansatz(beta in -8.0..8.0f64) {
        let ansatz = HalfExponential { alpha: 0.0, beta_plus: beta, beta_minus: beta };
        let m = ansatz.moments_on(2, Interval::PLUS);
        let w = ansatz.moments_on(2, Interval::MINUS);
        let (m0, m1, m2) = (m[0] + w[0], m[1] + w[1], m[2] + w[2]);
        prop_assert!(rel_close(m1_closure(m1 / m0).unwrap(), m2 / m0, 1e-8));
    }

    #[test]
    fn closures_stay_realizable(d in arb_positive()) {
        for name in ["k1", "m1"] {
            let model: ClosureModel = name.parse().unwrap();
            let m = moments_of_density(&d, 1, Interval::FULL);
            let u = [1.0, m.get(1) / m.get(0)];
            let chi = model.close_full(&u).unwrap();
            let ext = MomentVector::full(vec![1.0, u[1], chi]).unwrap();
            prop_assert!(is_realizable_full(&ext, TOL).realizable, "{name}: {ext:?}");
        }
        for name in ["mk1", "mm1", "mk2"] {
            let model: ClosureModel = name.parse().unwrap();
            let n = model.order();
            let g = mixed_moments_of_density(&d, n).unwrap();
            let c = model.close_mixed(&g.to_vec()).unwrap();
            let mut plus = g.plus.clone();
            plus.push(c.flux_plus);
            let mut minus = g.minus.clone();
            minus.push(c.flux_minus);
            let ext = MixedMomentVector::new(g.psi0, plus, minus).unwrap();
            prop_assert!(is_realizable_mixed_normalized(&ext, TOL).realizable, "{name}: {ext:?}");
        }
    }

    #[test]
    fn closures_commute_with_parity(d in arb_positive()) {
        for name in ["mk1", "mk2", "mm1", "mpn:3"] {
            let model: ClosureModel = name.parse().unwrap();
            let n = model.order();
            let g = mixed_moments_of_density(&d, n).unwrap();
            let c = model.close_mixed(&g.to_vec()).unwrap();
            let r = model.close_mixed(&g.reflect().to_vec()).unwrap();
            let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            let tol = 1e-9 * g.psi0;
            prop_assert!((r.flux_plus - sign * c.flux_minus).abs() <= tol, "{name}");
            prop_assert!((r.flux_minus - sign * c.flux_plus).abs() <= tol, "{name}");
            prop_assert!((r.micro.psi_at_0 - c.micro.psi_at_0).abs() <= tol, "{name}");
        }
    }

    #[test]
    fn full_closures_are_even_with_unit_range(phi in -0.999..0.999f64) {
        for f in [m1_closure, k1_closure] {
            let (a, b) = (f(phi).unwrap(), f(-phi).unwrap());
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((1.0 / 3.0 - 1e-14..1.0).contains(&a));
        }
        // the Kershaw curve lies above the entropy curve
        prop_assert!(k1_closure(phi).unwrap() >= m1_closure(phi).unwrap() - 1e-12);
    }
}

const PENCIL_BEAM: &str = "\
name = pencil-beam
domain = 0 1
t_end = 0.3
snapshots = 0.3
char_time = 0.3
[initial]
default = 0.0001
[left]
plus = dirac(1)
minus = 0.0001
[right]
plus = 0.0001
minus = 0.0001
";

#[test]
fn beam_front_does_not_outrun_unit_speed() {
    let s = Scenario::parse(PENCIL_BEAM).unwrap();
    let t = 0.3;
    for name in ["m1", "k1", "mk1", "mk2", "mm1", "pn:7"] {
        let sol = fv_solve(name.parse().unwrap(), &s, &FvOptions::new(400), &[t]).unwrap();
        let rho = sol.field.values.last().unwrap();
        // vacuum density is 2·10⁻⁴ (ψ = 10⁻⁴ on [-1, 1])
        let ahead = sol
            .field
            .x
            .iter()
            .zip(rho)
            .filter(|(x, _)| **x > t + 0.2)
            .map(|(_, r)| (r - 2e-4).abs())
            .fold(0.0, f64::max);
        assert!(ahead < 1e-12, "{name}: {ahead:e} ahead of the front");
    }
}

#[test]
fn first_order_kershaw_runs_need_no_projection() {
    for sc in ["two-beams", "rectangular-ic"] {
        let s = Scenario::builtin(sc).unwrap();
        for name in ["k1", "mk1", "mk2"] {
            let model: ClosureModel = name.parse().unwrap();
            let opts = FvOptions { projection: false, ..FvOptions::new(200) };
            let sol = fv_solve(model.clone(), &s, &opts, &[1.0]).unwrap();
            let solver = FvSolver::new(model, &s, &opts).unwrap();
            assert_eq!(solver.unrealizable_cells(&sol.final_state), 0, "{name} on {sc}");
            assert_eq!(sol.stats.projections, 0);
        }
    }
}

#[test]
fn reference_stays_nonnegative() {
    for sc in ["one-beam", "two-beams", "rectangular-ic"] {
        let s = Scenario::builtin(sc).unwrap();
        let opts = FpOptions { stiff: false, ..FpOptions::new(100, 40) };
        let sol = fp_solve(&s, &opts, &[0.5]).unwrap();
        assert!(sol.min_value >= 0.0, "{sc}: {}", sol.min_value);
    }
}

#[test]
fn parallel_and_sequential_runs_are_identical() {
    let s = Scenario::builtin("two-beams").unwrap();
    for name in ["mm1", "mk2", "pn:5"] {
        let run =
            |exec| fv_solve(name.parse().unwrap(), &s, &FvOptions { exec, ..FvOptions::new(120) }, &[0.5]).unwrap();
        let (a, b, c) = (run(Exec::Parallel), run(Exec::Sequential), run(Exec::Parallel));
        assert_eq!(a.final_state, b.final_state, "{name}");
        assert_eq!(a.final_state, c.final_state, "{name}");
    }
    let fp = |exec| fp_solve(&s, &FpOptions { exec, ..FpOptions::new(80, 40) }, &[0.5]).unwrap().field;
    assert_eq!(fp(Exec::Parallel), fp(Exec::Sequential));
}
