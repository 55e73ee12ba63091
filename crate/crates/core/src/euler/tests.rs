use super::*;
use crate::eos::{ConservedVector, EosModel};
use crate::error::Error;
use crate::ldp::entropy_s;

fn bump() -> Profile {
    Profile::Bump { beta: 5.0, mu0: 0.3, amplitude: 0.2, width: 0.3, alpha: 0.0 }
}

fn gas() -> Polytropic<f64> {
    // exact closure of the one-dimensional continuum Fermi gas
    Polytropic(3.0)
}

fn field(profile: &Profile, n: usize) -> Vec<ConservedVector<f64>> {
    initial_field(profile, MacroGrid::new(n).unwrap(), &EosModel::<f64>::unbounded(1)).unwrap()
}

fn evolve(q0: &[ConservedVector<f64>], t: f64) -> Vec<ConservedVector<f64>> {
    let grid = MacroGrid::new(q0.len()).unwrap();
    run(q0, grid, &gas(), &RunOptions::until(t)).unwrap().last().q.clone()
}

fn l1_vs_restricted(coarse: &[ConservedVector<f64>], fine: &[ConservedVector<f64>]) -> f64 {
    let dx = 1.0 / coarse.len() as f64;
    coarse
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let (a, b) = (&fine[2 * j], &fine[2 * j + 1]);
            (c.rho - 0.5 * (a.rho + b.rho)).abs()
                + (c.mom[0] - 0.5 * (a.mom[0] + b.mom[0])).abs()
                + (c.e - 0.5 * (a.e + b.e)).abs()
        })
        .sum::<f64>()
        * dx
}

#[test]
fn flux_examples() {
    let q = ConservedVector::<f64>::new(1, 2.0, &[1.0], 3.0);
    let a = flux_a(&q, 0.4).unwrap();
    for (x, y) in a.iter().zip([1.0, 0.9, 1.7]) {
        assert!((x - y).abs() < 1e-15);
    }
    let rest = ConservedVector::new(1, 1.3, &[0.0], 0.7);
    assert_eq!(flux_a(&rest, 0.25).unwrap(), [0.0, 0.25, 0.0]);
    let dust = flux_a(&q, 0.0).unwrap();
    assert_eq!(dust, [1.0, 0.5, 1.5]);
    assert!(matches!(flux_a(&ConservedVector::new(1, 0.0, &[0.0], 1.0), 0.1), Err(Error::VacuumCell(_))));
}

#[test]
fn grid_contract() {
    assert!(MacroGrid::new(7).is_err());
    let g = MacroGrid::new(8).unwrap();
    assert_eq!(g.center::<f64>(0), 1.0 / 16.0);
    assert_eq!(g.dx::<f64>(), 0.125);
}

#[test]
fn sound_speed_of_polytrope() {
    // c² = γP/ρ for P = (γ − 1)e_int
    let (rho, eint) = (0.7, 0.4);
    let c = sound_speed(&gas(), rho, eint).unwrap();
    let exact = (3.0 * 2.0 * eint / rho).sqrt();
    assert!((c - exact).abs() < 1e-6 * exact, "{c} vs {exact}");
}

#[test]
fn constant_state_is_fixed() {
    let p = Profile::Constant { beta: 4.0, alpha: 0.3, mu: 0.2 };
    let q0 = field(&p, 32);
    let sol = EulerSolution::new(q0.clone(), 0.4);
    let dt = max_dt(&sol, &gas()).unwrap();
    let mut s = sol;
    for _ in 0..20 {
        s = step(&s, dt, &gas()).unwrap();
    }
    for (a, b) in s.q.iter().zip(&q0) {
        assert!((a.rho - b.rho).abs() < 1e-14);
        assert!((a.mom[0] - b.mom[0]).abs() < 1e-14);
        assert!((a.e - b.e).abs() < 1e-14);
    }
}

#[test]
fn cfl_is_enforced() {
    let sol = EulerSolution::new(field(&bump(), 32), 0.4);
    let dt = max_dt(&sol, &gas()).unwrap();
    assert!(matches!(step(&sol, 1.5 * dt, &gas()), Err(Error::CflViolation { .. })));
}

#[test]
fn conservation_per_step_and_long_run() {
    let q0 = field(&Profile::Wave { beta0: 5.0, beta1: 0.5, mu0: 0.3, mu1: 0.1, alpha0: 0.0, alpha1: 0.2 }, 64);
    let mut s = EulerSolution::new(q0, 0.4);
    let t0 = s.totals();
    let mut prev = t0;
    for _ in 0..1000 {
        let dt = max_dt(&s, &gas()).unwrap();
        s = step(&s, dt, &gas()).unwrap();
        let t = s.totals();
        for i in 0..3 {
            assert!((t[i] - prev[i]).abs() < 1e-13, "component {i}: {:e}", t[i] - prev[i]);
        }
        prev = t;
    }
    for i in 0..3 {
        assert!((prev[i] - t0[i]).abs() < 1e-10);
    }
}

#[test]
fn mirror_symmetry_is_kept() {
    let q0 = field(&bump(), 64);
    let n = q0.len();
    let mut s = EulerSolution::new(q0, 0.4);
    for _ in 0..100 {
        let dt = max_dt(&s, &gas()).unwrap();
        s = step(&s, dt, &gas()).unwrap();
    }
    for j in 0..n {
        let (a, b) = (&s.q[j], &s.q[n - 1 - j]);
        assert!((a.rho - b.rho).abs() < 1e-12);
        assert!((a.mom[0] + b.mom[0]).abs() < 1e-12);
        assert!((a.e - b.e).abs() < 1e-12);
    }
}

#[test]
fn zero_final_time_returns_initial_data() {
    let q0 = field(&bump(), 16);
    let tr = run(&q0, MacroGrid::new(16).unwrap(), &gas(), &RunOptions::until(0.0)).unwrap();
    assert_eq!(tr.steps, 0);
    assert_eq!(tr.last().q, q0);
}

#[test]
fn snapshots_land_on_requested_times() {
    let q0 = field(&bump(), 32);
    let opts = RunOptions { t_final: 0.02, snapshots: vec![0.0, 0.005, 0.013], cfl: 0.4 };
    let tr = run(&q0, MacroGrid::new(32).unwrap(), &gas(), &opts).unwrap();
    let times: Vec<f64> = tr.snapshots.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.0, 0.005, 0.013, 0.02]);
    assert!(tr.shock_time.is_none());
}

#[test]
fn self_convergence_order() {
    let q: Vec<_> = [128, 256, 512].iter().map(|&n| evolve(&field(&bump(), n), 0.05)).collect();
    let e1 = l1_vs_restricted(&q[0], &q[1]);
    let e2 = l1_vs_restricted(&q[1], &q[2]);
    let order = (e1 / e2).log2();
    assert!(order >= 0.8, "observed order {order} ({e1:e}, {e2:e})");
}

fn shift_back(q: &[ConservedVector<f64>], shift: f64, s: f64) -> Vec<ConservedVector<f64>> {
    let n = q.len();
    let g = MacroGrid::new(n).unwrap();
    let xs: Vec<f64> = (0..n).map(|j| (g.center::<f64>(j) + shift).rem_euclid(1.0)).collect();
    let comp = |f: &dyn Fn(&ConservedVector<f64>) -> f64| {
        periodic_interpolate(&q.iter().map(f).collect::<Vec<_>>(), &xs)
    };
    let (r, m, e) = (comp(&|c| c.rho), comp(&|c| c.mom[0]), comp(&|c| c.e));
    (0..n).map(|j| ConservedVector::new(1, r[j], &[m[j]], e[j]).boosted(&[-s])).collect()
}

#[test]
fn galilean_covariance_under_refinement() {
    let (s, t) = (0.3, 0.05);
    let mut errs = Vec::new();
    for n in [128, 256, 512] {
        let q0 = field(&bump(), n);
        let plain = evolve(&q0, t);
        let moved: Vec<_> = q0.iter().map(|c| c.boosted(&[s])).collect();
        let back = shift_back(&evolve(&moved, t), s * t, s);
        let num: f64 = plain.iter().zip(&back).map(|(a, b)| (a.rho - b.rho).abs() + (a.e - b.e).abs()).sum();
        let den: f64 = plain.iter().map(|a| a.rho.abs() + a.e.abs()).sum();
        errs.push(num / den);
    }
    assert!(errs[2] < 5e-2, "{errs:?}");
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn boost_is_consistent_with_conserved_transform() {
    // boosting by s then −s is the identity
    let q = ConservedVector::<f64>::new(1, 0.8, &[0.1], 0.9);
    let r = q.boosted(&[0.4]).boosted(&[-0.4]);
    assert!((r.e - q.e).abs() < 1e-15 && (r.mom[0] - q.mom[0]).abs() < 1e-15);
}

#[test]
fn interpolation_reproduces_trigonometric_data() {
    let n = 16;
    let g = MacroGrid::new(n).unwrap();
    let f = |x: f64| 1.0 + 0.3 * (2.0 * std::f64::consts::PI * x).cos() - 0.2 * (6.0 * std::f64::consts::PI * x).sin();
    let vals: Vec<f64> = (0..n).map(|j| f(g.center(j))).collect();
    let xs: Vec<f64> = (0..50).map(|i| i as f64 / 50.0).collect();
    for (x, y) in xs.iter().zip(periodic_interpolate(&vals, &xs)) {
        assert!((f(*x) - y).abs() < 1e-13);
    }
    // samples are reproduced, including a Nyquist component
    let alt: Vec<f64> = (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let back = periodic_interpolate(&alt, &g.centers::<f64>());
    for (a, b) in alt.iter().zip(back) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn weak_form_defect_vanishes_under_refinement() {
    let two_pi = 2.0 * std::f64::consts::PI;
    let j_fn = |x: f64| (two_pi * x).sin() + 0.5 * (two_pi * x).cos();
    let dj = |x: f64| two_pi * ((two_pi * x).cos() - 0.5 * (two_pi * x).sin());
    let t_end = 0.05;
    let mut defects = Vec::new();
    for n in [64, 128, 256] {
        let g = MacroGrid::new(n).unwrap();
        let dx = 1.0 / n as f64;
        let q0 = field(&bump(), n);
        let pairing = |q: &[ConservedVector<f64>]| -> [f64; 3] {
            let mut out = [0.0; 3];
            for (j, c) in q.iter().enumerate() {
                let p = 2.0 * c.internal_energy();
                let a = flux_a(c, p).unwrap();
                for i in 0..3 {
                    out[i] += dj(g.center(j)) * a[i] * dx;
                }
            }
            out
        };
        let mut s = EulerSolution::new(q0.clone(), 0.4);
        let mut integral = [0.0; 3];
        let mut f_prev = pairing(&s.q);
        while s.time < t_end {
            let dt = max_dt(&s, &gas()).unwrap().min(t_end - s.time);
            s = step(&s, dt, &gas()).unwrap();
            let f_next = pairing(&s.q);
            for i in 0..3 {
                integral[i] += 0.5 * dt * (f_prev[i] + f_next[i]);
            }
            f_prev = f_next;
        }
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let comp = |c: &ConservedVector<f64>| [c.rho, c.mom[0], c.e][i];
            let change: f64 =
                (0..n).map(|j| j_fn(g.center(j)) * (comp(&s.q[j]) - comp(&q0[j])) * dx).sum();
            worst = worst.max((change - integral[i]).abs());
        }
        defects.push(worst);
    }
    assert!(defects[1] < defects[0] && defects[2] < defects[1], "{defects:?}");
    assert!(defects[2] < 1e-3, "{defects:?}");
}

#[test]
fn entropy_is_nearly_constant_on_smooth_flow() {
    let model = EosModel::<f64>::unbounded(1);
    let total = |q: &[ConservedVector<f64>]| -> f64 {
        q.iter().map(|c| entropy_s(&model, c).unwrap().0).sum::<f64>() / q.len() as f64
    };
    let mut drift = Vec::new();
    for n in [32, 64] {
        let q0 = field(&bump(), n);
        let q1 = evolve(&q0, 0.05);
        drift.push(((total(&q1) - total(&q0)) / total(&q0)).abs());
    }
    assert!(drift[1] < drift[0], "{drift:?}");
    assert!(drift[1] < 1e-2, "{drift:?}");
}

#[test]
fn lambda_field_roundtrip() {
    let model = EosModel::<f64>::unbounded(1);
    let q = field(&bump(), 32);
    let lam = lambda_field_of(&q, &model).unwrap();
    for (l, c) in lam.iter().zip(&q) {
        let back = model.dual_q(l).unwrap();
        assert!((back.rho - c.rho).abs() < 1e-8 * c.rho);
        assert!((back.mom[0] - c.mom[0]).abs() < 1e-8);
        assert!((back.e - c.e).abs() < 1e-8 * c.e);
    }
    let p = Profile::Constant { beta: 3.0, alpha: 0.1, mu: 0.4 };
    let qc = field(&p, 8);
    let lc = lambda_field_of(&qc, &model).unwrap();
    let single = model.invert_to_multipliers(&qc[0], &model.initial_guess(&qc[0]).unwrap()).unwrap();
    for l in &lc {
        assert!((l.lam0 - single.lam0).abs() < 1e-9 && (l.lam4 - single.lam4).abs() < 1e-9);
    }
}

#[test]
fn lambda_field_reports_offending_cell() {
    let model = EosModel::<f64>::unbounded(1);
    let mut q = field(&bump(), 16);
    let floor = model.energy_floor(q[5].rho).unwrap();
    q[5].e = 0.5 * floor;
    match lambda_field_of(&q, &model) {
        Err(Error::OutOfDomainAt { cell, .. }) => assert_eq!(cell, 5),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn guard_halts_outside_one_phase_region() {
    let mut q = field(&bump(), 16);
    q[3].e = -1.0;
    match run(&q, MacroGrid::new(16).unwrap(), &gas(), &RunOptions::until(0.01)) {
        Err(Error::LeftOnePhaseRegion { cell, .. }) => assert_eq!(cell, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn table_and_direct_closures_agree() {
    let model = EosModel::<f64>::unbounded(1);
    let hot = Profile::Bump { beta: 1.0, mu0: -0.5, amplitude: 0.3, width: 0.5, alpha: 0.1 };
    let q0 = field(&hot, 16);
    let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (0.0f64, 0.0f64));
    for c in &q0 {
        lo = (lo.0.min(c.rho), lo.1.min(c.internal_energy()));
        hi = (hi.0.max(c.rho), hi.1.max(c.internal_energy()));
    }
    let table = model.tabulate((0.8 * lo.0, 1.2 * hi.0), (0.8 * lo.1, 1.2 * hi.1), (32, 32)).unwrap();
    let direct = DirectClosure(model.clone());
    let grid = MacroGrid::new(16).unwrap();
    let opts = RunOptions::until(0.01);
    let a = run(&q0, grid, &table, &opts).unwrap();
    let b = run(&q0, grid, &direct, &opts).unwrap();
    let c = run(&q0, grid, &gas(), &opts).unwrap();
    for ((x, y), z) in a.last().q.iter().zip(&b.last().q).zip(&c.last().q) {
        assert!((x.e - y.e).abs() < 1e-9 && (x.e - z.e).abs() < 1e-9);
    }
}

#[test]
fn steepening_flow_raises_shock_flag() {
    let p = Profile::Wave { beta0: 4.0, beta1: 0.0, mu0: 0.4, mu1: 0.3, alpha0: 0.0, alpha1: 0.8 };
    let q0 = field(&p, 128);
    let tr = run(&q0, MacroGrid::new(128).unwrap(), &gas(), &RunOptions::until(0.5)).unwrap();
    let t = tr.shock_time.expect("shock flagged");
    assert!(t > 0.1 && t < 0.3, "{t}");
    // the smooth bump splits into two weaker pulses and is never flagged
    let q1 = field(&bump(), 64);
    assert!(run(&q1, MacroGrid::new(64).unwrap(), &gas(), &RunOptions::until(0.3)).unwrap().shock_time.is_none());
}

