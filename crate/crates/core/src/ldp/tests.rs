use super::*;

fn model() -> EosModel<f64> {
    EosModel::unbounded(1)
}

fn lam1(beta: f64, alpha: f64, mu: f64) -> MultiplierVector<f64> {
    MultiplierVector::from_physical(1, beta, &[alpha], mu)
}

#[test]
fn maximizer_is_the_dual_preimage() {
    let m = model();
    let lam = lam1(1.2, 0.3, -0.2);
    let (_, max) = entropy_s(&m, &m.dual_q(&lam).unwrap()).unwrap();
    assert!((max.to_dvector() - lam.to_dvector()).amax() < 1e-7);
}

#[test]
fn cold_state_entropy_against_grid_search() {
    let m = model();
    let q = ConservedVector::new(1, 0.318310, &[0.0], 0.0531);
    let (s, lam) = entropy_s(&m, &q).unwrap();
    // coarse search over (β, μ) at zero drift gives a lower bound close to the sup
    let mut best = f64::NEG_INFINITY;
    for i in 0..=200 {
        let beta = 10f64.powf(1.0 + 2.0 * i as f64 / 200.0);
        for j in 0..=200 {
            let mu = 0.45 + 0.1 * j as f64 / 200.0;
            let l = lam1(beta, 0.0, mu);
            best = best.max(l.pair(&q) - m.pressure_psi(&l).unwrap());
        }
    }
    assert!(best <= s + 1e-10);
    assert!(s - best < 1e-4, "{s} vs {best}");
    // signed pairing: s is minus the physical entropy density, small near T = 0
    assert!(s < 0.0 && s > -0.05, "{s}");
    // Sommerfeld: entropy density πT/(3p_F) at the fitted temperature
    let pf = std::f64::consts::PI * q.rho;
    assert!((s + std::f64::consts::PI / (3.0 * lam.beta() * pf)).abs() < 2e-3 * s.abs());
    assert!((s - (-0.010_058_54)).abs() < 1e-8, "{s}");
}

#[test]
fn young_inequality() {
    use rand::{Rng, SeedableRng};
    let m = model();
    let q = m.dual_q(&lam1(0.8, 0.1, 0.4)).unwrap();
    let (s, _) = entropy_s(&m, &q).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let l = lam1(rng.gen_range(0.2..5.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        assert!(l.pair(&q) - m.pressure_psi(&l).unwrap() <= s + 1e-10);
    }
}

#[test]
fn rate_vanishes_on_the_dual_and_is_quadratic_nearby() {
    let m = model();
    let lam = lam1(1.0, 0.2, 0.1);
    let q = m.dual_q(&lam).unwrap();
    assert!(rate_i(&m, &q, &lam).unwrap().rate.abs() < 1e-10);
    let delta = 1e-3;
    let qp = ConservedVector { rho: q.rho + delta, ..q };
    let r = rate_i(&m, &qp, &lam).unwrap().rate;
    let h = rate_hessian(&m, &q).unwrap();
    let want = 0.5 * delta * delta * h[(0, 0)];
    assert!(((r - want) / want).abs() < 0.1, "{r} vs {want}");
}

#[test]
fn rate_hessian_is_positive_definite() {
    let m = model();
    let q = m.dual_q(&lam1(1.0, 0.0, 0.0)).unwrap();
    let h = rate_hessian(&m, &q).unwrap();
    let ev = h.symmetric_eigenvalues();
    assert!(ev.min() > 0.0, "{ev}");
    let m3 = EosModel::<f64>::unbounded(3);
    let q = m3.dual_q(&MultiplierVector::from_physical(3, 1.5, &[0.1, 0.2, -0.3], 0.3)).unwrap();
    assert!(rate_hessian(&m3, &q).unwrap().symmetric_eigenvalues().min() > 0.0);
}

#[test]
fn rate_is_nonnegative_with_a_unique_zero() {
    use rand::{Rng, SeedableRng};
    let m = model();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let lam = lam1(rng.gen_range(0.5..3.0), rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0));
        let other = lam1(rng.gen_range(0.5..3.0), rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0));
        let q = m.dual_q(&other).unwrap();
        let r = rate_i(&m, &q, &lam).unwrap().rate;
        assert!(r >= -1e-12);
        let sep = (lam.to_dvector() - other.to_dvector()).amax();
        if sep > 1e-2 {
            assert!(r > 0.0);
        }
    }
}

#[test]
fn entropy_is_convex_along_segments() {
    use rand::{Rng, SeedableRng};
    let m = model();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = m.dual_q(&lam1(rng.gen_range(0.5..3.0), rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0))).unwrap();
        let b = m.dual_q(&lam1(rng.gen_range(0.5..3.0), rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0))).unwrap();
        let mid = ConservedVector::from_dvector(1, &((a.to_dvector() + b.to_dvector()) * 0.5));
        let s = |q: &ConservedVector<f64>| entropy_s(&m, q).unwrap().0;
        assert!(s(&mid) <= 0.5 * (s(&a) + s(&b)) + 1e-10);
    }
}

#[test]
fn truncation_is_inactive_near_the_center() {
    let m = model();
    let lam = lam1(1.0, 0.3, 0.2);
    let q = m.dual_q(&lam).unwrap();
    let t = rate_i_truncated(&m, &q, &lam, 0.05).unwrap();
    assert!(t.rate.abs() < 1e-10);
    assert!(t.active.iter().all(|a| !a));
    let qp = ConservedVector { rho: q.rho * 1.05, ..q };
    let full = rate_i(&m, &qp, &lam).unwrap().rate;
    let tr = rate_i_truncated(&m, &qp, &lam, 0.05).unwrap().rate;
    assert!((full - tr).abs() < 1e-10 * full.max(1e-12) + 1e-14);
}

#[test]
fn truncation_bites_for_extreme_states() {
    let m = model();
    let lam = lam1(1.0, 0.0, 0.0);
    // very cold target: its maximizer has β far beyond 1/η
    let qp = m.dual_q(&lam1(200.0, 0.0, 0.5)).unwrap();
    let full = rate_i(&m, &qp, &lam).unwrap().rate;
    let t = rate_i_truncated(&m, &qp, &lam, 0.05).unwrap();
    assert!(t.rate < full, "{} vs {full}", t.rate);
    assert!(t.active[2]);
    // a larger box gives a larger supremum
    let t2 = rate_i_truncated(&m, &qp, &lam, 0.02).unwrap();
    assert!(t2.rate >= t.rate - 1e-12 && t2.rate <= full + 1e-12);
}

#[test]
fn truncated_rate_is_convex_in_q() {
    let m = model();
    let lam = lam1(1.0, 0.0, 0.0);
    let a = m.dual_q(&lam1(200.0, 0.0, 0.5)).unwrap();
    let b = m.dual_q(&lam1(0.5, 0.4, -0.3)).unwrap();
    let f = |q: &ConservedVector<f64>| rate_i_truncated(&m, q, &lam, 0.05).unwrap().rate;
    for t in [0.25, 0.5, 0.75] {
        let q = ConservedVector::from_dvector(1, &(a.to_dvector() * t + b.to_dvector() * (1.0 - t)));
        assert!(f(&q) <= t * f(&a) + (1.0 - t) * f(&b) + 1e-10);
    }
}

#[test]
fn quadratic_penalty_model_problem() {
    // sup_x [x − x²/δ] = δ/4, attained at x = δ/2
    for delta in [1e-3, 0.1, 1.0, 7.0] {
        let f = |x: f64| x - x * x / delta;
        let (mut a, mut b) = (-10.0 * delta, 10.0 * delta);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let sup = f(0.5 * (a + b));
        assert!((sup - delta / 4.0).abs() < 1e-12 * delta.max(1.0));
        assert!(sup <= delta);
    }
}

#[test]
fn scan_marks_out_of_domain_points() {
    let m = model();
    let lam = lam1(1.0, 0.0, 0.0);
    let pts = rate_scan(&m, &lam, &[0.3], &[0.01, 0.5]).unwrap();
    assert!(pts[0].2.is_none());
    assert!(pts[1].2.unwrap() >= 0.0);
}
