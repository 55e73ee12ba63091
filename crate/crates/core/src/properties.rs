//! Randomized invariants across modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use crate::eos::{ConservedVector, EosModel, MultiplierVector};
use crate::euler::{flux_a, periodic_interpolate, step, EulerSolution, MacroGrid, Polytropic};
use crate::harness::ExperimentConfig;
use crate::ldp::rate_i;
use crate::linalg::{herm_fn, CMatrix};
use crate::micro::{gibbs_gaussian, rel_entropy_gaussian, sample_field, GaussianState, Lattice, Window};
use crate::scalar::{Cplx, Real};

fn conserved() -> impl Strategy<Value = ConservedVector<f64>> {
    (0.05..2.0f64, -1.0..1.0f64, 0.01..2.0f64)
        .prop_map(|(rho, v, eint)| ConservedVector::new(1, rho, &[rho * v], eint + 0.5 * rho * v * v))
}

fn herm(l: usize, entries: &[f64]) -> CMatrix<f64> {
    let g = CMatrix::<f64>::from_fn(l, l, |i, j| Cplx::new(entries[2 * (i * l + j)], entries[2 * (i * l + j) + 1]));
    (&g + g.adjoint()) * Cplx::new(0.5, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flux_is_mirror_odd(q in conserved(), p in 0.01..3.0f64) {
        let mut m = q;
        m.mom[0] = -q.mom[0];
        let (a, b) = (flux_a(&q, p).unwrap(), flux_a(&m, p).unwrap());
        prop_assert_eq!(a[0], -b[0]);
        prop_assert_eq!(a[1], b[1]);
        prop_assert_eq!(a[2], -b[2]);
    }

    #[test]
    fn boost_preserves_internal_energy(q in conserved(), s in -2.0..2.0f64) {
        let b = q.boosted(&[s]);
        prop_assert!((b.internal_energy() - q.internal_energy()).abs() <= 1e-12 * (1.0 + q.e + b.e));
        prop_assert!((b.velocity()[0] - q.velocity()[0] - s).abs() <= 1e-12 * (1.0 + s.abs()));
    }

    #[test]
    fn physical_multipliers_roundtrip(beta in 0.1..20.0f64, alpha in -3.0..3.0f64, mu in -2.0..2.0f64) {
        let l = MultiplierVector::from_physical(1, beta, &[alpha], mu);
        prop_assert!((l.beta() - beta).abs() <= 1e-14 * beta);
        prop_assert!((l.mu() - mu).abs() <= 1e-13);
        prop_assert!((l.alpha()[0] - alpha).abs() <= 1e-13);
    }

    #[test]
    fn window_squares_partition_unity(eta in 0.01..0.5f64, t in 0.0..1.0f64) {
        let w = Window::new(eta).unwrap();
        let s: f64 = (-3..=3).map(|j| w.chi_sq(t + j as f64)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
        prop_assert!(w.chi(0.5 + eta + t) == 0.0);
    }

    #[test]
    fn interpolation_reproduces_trig_polynomials(
        n in 8usize..40,
        c in proptest::collection::vec(-1.0..1.0f64, 6),
        x in 0.0..1.0f64,
    ) {
        let f = |x: f64| {
            let t = 2.0 * PI * x;
            c[0] + c[1] * t.cos() + c[2] * t.sin() + c[3] * (2.0 * t).cos() + c[4] * (3.0 * t).sin() + c[5] * (2.0 * t).sin()
        };
        let vals: Vec<f64> = (0..n).map(|j| f((j as f64 + 0.5) / n as f64)).collect();
        let got = periodic_interpolate(&vals, &[x])[0];
        prop_assert!((got - f(x)).abs() <= 1e-11);
    }

    #[test]
    fn euler_step_conserves_totals(
        amp in 0.0..0.3f64,
        shift in 0.0..1.0f64,
        v in -0.5..0.5f64,
    ) {
        let grid = MacroGrid::new(64).unwrap();
        let q: Vec<_> = grid
            .centers::<f64>()
            .iter()
            .map(|&x| {
                let rho = 1.0 + amp * (2.0 * PI * (x - shift)).sin();
                ConservedVector::new(1, rho, &[rho * v], 0.4 * rho.powi(3) + 0.5 * rho * v * v)
            })
            .collect();
        let gas = Polytropic(3.0);
        let s0 = EulerSolution::new(q, 0.4);
        let s1 = step(&s0, 1e-3, &gas).unwrap();
        let (a, b) = (s0.totals(), s1.totals());
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-13);
        }
    }

    #[test]
    fn free_evolution_conserves_totals(l in 4usize..12, entries in proptest::collection::vec(-1.0..1.0f64, 288), t in -5.0..5.0f64) {
        let lat = Lattice::unit(l).unwrap();
        let k = herm(l, &entries);
        let st = GaussianState::from_position(&lat, &herm_fn(&k, |x: f64| x.logistic()), 0.0).unwrap();
        let (a, b) = (st.totals(), st.evolve(t).totals());
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-11 * (1.0 + a[i].abs()));
        }
    }

    #[test]
    fn gaussian_relative_entropy_is_nonnegative(l in 2usize..7, e1 in proptest::collection::vec(-1.5..1.5f64, 72), e2 in proptest::collection::vec(-1.5..1.5f64, 72)) {
        let lat = Lattice::unit(l).unwrap();
        let g = GaussianState::from_position(&lat, &herm_fn(&herm(l, &e1), |x: f64| x.logistic()), 0.0).unwrap();
        let w = GaussianState::from_position(&lat, &herm_fn(&herm(l, &e2), |x: f64| x.logistic()), 0.0).unwrap();
        prop_assert!(rel_entropy_gaussian(&g, &w).unwrap().total >= -1e-12);
        prop_assert!(rel_entropy_gaussian(&g, &g).unwrap().total.abs() <= 1e-12);
    }

    #[test]
    fn boosting_a_gibbs_state_shifts_the_drift(beta in 1.0..6.0f64, mu in -0.3..0.6f64, m in -3i64..=3) {
        // half spacing keeps the zone edge (where the boost wraps) empty
        let lat = Lattice::new(64, 0.5).unwrap();
        let dp = 2.0 * PI / 32.0;
        let field = sample_field(&lat, |_| MultiplierVector::from_physical(1, beta, &[0.0], mu));
        let st = gibbs_gaussian(&lat, &field).unwrap();
        let [n0, p0, _] = st.totals();
        let [n1, p1, _] = st.boost(m).totals();
        prop_assert!((n1 - n0).abs() <= 1e-12 * n0);
        prop_assert!((p1 - p0 - m as f64 * dp * n0).abs() <= 1e-6 * (1.0 + n0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rate_function_is_nonnegative(
        fr in 0.8..1.25f64,
        fe in 0.8..1.25f64,
        dm in -0.05..0.05f64,
    ) {
        let m = EosModel::<f64>::unbounded(1);
        let lam = MultiplierVector::from_physical(1, 2.0, &[0.2], 0.3);
        let q = m.dual_q(&lam).unwrap();
        let qp = ConservedVector::new(1, q.rho * fr, &[q.mom[0] + dm], q.e * fe);
        prop_assume!(m.check_domain(&qp).is_ok());
        prop_assert!(rate_i(&m, &qp, &lam).unwrap().rate >= -1e-12);
    }

    #[test]
    fn config_survives_toml_roundtrip(
        sizes in proptest::collection::vec(prop_oneof![Just(64usize), Just(128), Just(256)], 1..4),
        seed in any::<u64>(),
        t in 0.0..0.1f64,
        cfl in 0.05..1.0f64,
    ) {
        let mut cfg = ExperimentConfig { sizes, seed, times: vec![0.0, t], ell_ratio: 8, ..Default::default() };
        cfg.euler.cfl = cfl;
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back.sizes, cfg.sizes);
        prop_assert_eq!(back.seed, cfg.seed);
        prop_assert_eq!(back.times, cfg.times);
        prop_assert_eq!(back.euler.cfl, cfg.euler.cfl);
    }
}
