use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::eos::ConservedVector;
use crate::error::Result;
use crate::euler::{self, flux_a, time_derivative, Closure, RunOptions};
use crate::micro::{coarse_grain, entropy_production, rel_entropy_gaussian, GaussianState};

use super::config::ExperimentConfig;
use super::coupling::{build_closure, conserved_to_sites, local_gibbs_field, Coupling};

type Conserved = ConservedVector<f64>;

pub const COMPONENTS: [&str; 3] = ["rho", "mom", "e"];
pub const TEST_FUNCTIONS: [&str; 3] = ["one", "cos", "sin"];

fn test_function(name: &str, x: f64) -> f64 {
    match name {
        "cos" => (2.0 * PI * x).cos(),
        "sin" => (2.0 * PI * x).sin(),
        _ => 1.0,
    }
}

/// One entry of `E(T; ε, ℓ) = ε Σ_x f(εx)·(ū(x, T/ε) − q(εx, T))`.
///
/// `raw` compares the coarse-grained microscopic field with the pointwise
/// macroscopic one; `matched` coarse-grains both, which removes the
/// `O((ℓε)²)` smoothing bias that does not vanish at fixed `ℓ/L`.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorRow {
    pub size: usize,
    pub window: usize,
    pub epsilon: f64,
    pub time: f64,
    pub component: String,
    pub test_fn: String,
    pub raw: f64,
    pub matched: f64,
}

/// L²(dX) residual between the microscopic slope `−∇_X w` and `−∇_X·A(q)` at
/// `T = 0`, both coarse-grained (`matched`) or only the microscopic one (`raw`).
#[derive(Clone, Debug, Serialize)]
pub struct SlopeRow {
    pub size: usize,
    pub window: usize,
    pub epsilon: f64,
    pub component: String,
    pub raw: f64,
    pub matched: f64,
}

/// Monotonicity of a series along increasing `L` at fixed `L/ℓ`.
#[derive(Clone, Debug, Serialize)]
pub struct TrendRow {
    pub series: String,
    pub ratio: usize,
    pub time: f64,
    pub component: String,
    pub test_fn: String,
    pub form: String,
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
    pub strictly_decreasing: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceReport {
    pub errors: Vec<ErrorRow>,
    pub slopes: Vec<SlopeRow>,
    pub trends: Vec<TrendRow>,
    pub shock_times: Vec<(usize, Option<f64>)>,
    pub notes: Vec<String>,
}

pub const LONG_TIME_NOTE: &str = "free fermions are not ergodic: no convergence is claimed beyond short \
     macroscopic times; rows with T > 0 are reported, not asserted";

fn pair(f: &[f64], u: &[f64], v: &[f64], eps: f64) -> f64 {
    eps * f.iter().zip(u.iter().zip(v)).map(|(f, (a, b))| f * (a - b)).sum::<f64>()
}

fn micro_fields(st: &GaussianState<f64>) -> [Vec<f64>; 3] {
    let d = st.densities();
    [d.n, d.p, d.h]
}

/// Runs the commuting-diagram comparison, appending to `report` as it goes so
/// that a failure leaves the completed sizes in place.
pub fn hydro_compare_into(cfg: &ExperimentConfig, report: &mut ConvergenceReport) -> Result<()> {
    report.notes.push(LONG_TIME_NOTE.to_string());
    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let t_final = times.last().copied().unwrap_or(0.0);
    for &size in &cfg.sizes {
        let cp = Coupling::new(cfg, size)?;
        let (closure, _) = build_closure(cfg, &cp.q0)?;
        let eps = cp.epsilon();
        let lat = &cp.lattice;
        let xs: Vec<f64> = (0..size).map(|j| lat.position(j)).collect();
        let fns: Vec<Vec<f64>> =
            TEST_FUNCTIONS.iter().map(|n| xs.iter().map(|&x| test_function(n, x)).collect()).collect();
        let windows: Vec<usize> = cfg.pairs().into_iter().filter(|p| p.0 == size).map(|p| p.1).collect();

        let traj = euler::run(
            &cp.q0,
            cp.grid,
            &closure,
            &RunOptions { t_final, snapshots: times.clone(), cfl: cfg.euler.cfl },
        )?;
        report.shock_times.push((size, traj.shock_time));
        for snap in &traj.snapshots {
            let micro = micro_fields(&cp.gamma0.evolve(snap.time / eps));
            let macro_ = conserved_to_sites(lat, &snap.q);
            for &ell in &windows {
                for c in 0..3 {
                    let cu = coarse_grain(&micro[c], ell)?;
                    let cq = coarse_grain(&macro_[c], ell)?;
                    for (fi, f) in fns.iter().enumerate() {
                        report.errors.push(ErrorRow {
                            size,
                            window: ell,
                            epsilon: eps,
                            time: snap.time,
                            component: COMPONENTS[c].into(),
                            test_fn: TEST_FUNCTIONS[fi].into(),
                            raw: pair(f, &cu, &macro_[c], eps),
                            matched: pair(f, &cu, &cq, eps),
                        });
                    }
                }
            }
        }

        // short-time slopes at T = 0: d/dT u = −(1/ε)∇_x w against −∇_X·A(q)
        let w = cp.gamma0.currents(None);
        let micro_w = [w.w0, w.w1, w.w4];
        let sites = conserved_to_sites(lat, &cp.q0);
        let mut flux = [vec![0.0; size], vec![0.0; size], vec![0.0; size]];
        for j in 0..size {
            let q = Conserved::new(1, sites[0][j], &[sites[1][j]], sites[2][j]);
            let a = flux_a(&q, closure.pressure(q.rho, q.internal_energy())?)?;
            for c in 0..3 {
                flux[c][j] = a[c];
            }
        }
        for &ell in &windows {
            for c in 0..3 {
                let du: Vec<f64> = lat.gradient(&micro_w[c]).iter().map(|g| -g / eps).collect();
                let dq: Vec<f64> = lat.gradient(&flux[c]).iter().map(|g| -g / eps).collect();
                let cu = coarse_grain(&du, ell)?;
                let cq = coarse_grain(&dq, ell)?;
                let l2 = |a: &[f64], b: &[f64]| (eps * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).sqrt();
                report.slopes.push(SlopeRow {
                    size,
                    window: ell,
                    epsilon: eps,
                    component: COMPONENTS[c].into(),
                    raw: l2(&cu, &dq),
                    matched: l2(&cu, &cq),
                });
            }
        }
    }
    report.trends = trends(report);
    Ok(())
}

pub fn run_hydro_compare(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::default();
    hydro_compare_into(cfg, &mut report)?;
    Ok(report)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}

/// Groups rows by `(L/ℓ, T, component, f)` and flags strict decrease in `|E|`
/// along increasing `L`.
fn trends(report: &ConvergenceReport) -> Vec<TrendRow> {
    let mut out = Vec::new();
    let mut groups: BTreeMap<(usize, u64, String, String), Vec<&ErrorRow>> = BTreeMap::new();
    for r in &report.errors {
        groups
            .entry((r.size / r.window, r.time.to_bits(), r.component.clone(), r.test_fn.clone()))
            .or_default()
            .push(r);
    }
    for ((ratio, tb, comp, f), mut rows) in groups {
        rows.sort_by_key(|r| r.size);
        let sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
        for (form, pick) in [("raw", (|r: &ErrorRow| r.raw) as fn(&ErrorRow) -> f64), ("matched", |r: &ErrorRow| r.matched)] {
            let values: Vec<f64> = rows.iter().map(|r| pick(r).abs()).collect();
            out.push(TrendRow {
                series: "error".into(),
                ratio,
                time: f64::from_bits(tb),
                component: comp.clone(),
                test_fn: f.clone(),
                form: form.into(),
                strictly_decreasing: strictly_decreasing(&values),
                sizes: sizes.clone(),
                values,
            });
        }
    }
    let mut sgroups: BTreeMap<(usize, String), Vec<&SlopeRow>> = BTreeMap::new();
    for r in &report.slopes {
        sgroups.entry((r.size / r.window, r.component.clone())).or_default().push(r);
    }
    for ((ratio, comp), mut rows) in sgroups {
        rows.sort_by_key(|r| r.size);
        let sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
        for (form, pick) in [("raw", (|r: &SlopeRow| r.raw) as fn(&SlopeRow) -> f64), ("matched", |r: &SlopeRow| r.matched)] {
            let values: Vec<f64> = rows.iter().map(|r| pick(r)).collect();
            out.push(TrendRow {
                series: "slope".into(),
                ratio,
                time: 0.0,
                component: comp.clone(),
                test_fn: String::new(),
                form: form.into(),
                strictly_decreasing: strictly_decreasing(&values),
                sizes: sizes.clone(),
                values,
            });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyRow {
    pub size: usize,
    pub time: f64,
    pub micro_time: f64,
    /// `s(γ_t | ω^ε_t)/L`.
    pub density: f64,
    pub total: f64,
    /// Eigenvalue displacement applied by the logarithm clamp.
    pub clamped: f64,
    /// Production per site from the closed formula and from centred
    /// differences of the relative entropy.
    pub production: f64,
    pub production_fd: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EntropySeries {
    pub rows: Vec<EntropyRow>,
    pub notes: Vec<String>,
}

/// Micro-time step of the centred-difference production estimate.
const FD_STEP: f64 = 0.01;

/// Relative entropy of the evolved local Gibbs state against the local Gibbs
/// state of the Euler trajectory, with production cross-checks.
pub fn entropy_track_into(cfg: &ExperimentConfig, series: &mut EntropySeries) -> Result<()> {
    series.notes.push(LONG_TIME_NOTE.to_string());
    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let t_final = times.last().copied().unwrap_or(0.0);
    for &size in &cfg.sizes {
        let cp = Coupling::new(cfg, size)?;
        let (closure, _) = build_closure(cfg, &cp.q0)?;
        let eps = cp.epsilon();
        let traj = euler::run(
            &cp.q0,
            cp.grid,
            &closure,
            &RunOptions { t_final, snapshots: times.clone(), cfl: cfg.euler.cfl },
        )?;
        let per_site = 1.0 / size as f64;
        for snap in &traj.snapshots {
            let t = snap.time / eps;
            let dq = time_derivative(snap, &closure)?;
            let shifted = |dt_macro: f64| -> Vec<Conserved> {
                snap.q
                    .iter()
                    .zip(&dq)
                    .map(|(c, d)| {
                        ConservedVector::new(1, c.rho + dt_macro * d.rho, &[c.mom[0] + dt_macro * d.mom[0]], c.e + dt_macro * d.e)
                    })
                    .collect()
            };
            let gamma = cp.gamma0.evolve(t);
            let omega = cp.local_gibbs(&snap.q)?;
            let s = rel_entropy_gaussian(&gamma, &omega)?;
            let field_at = |big_t: f64| local_gibbs_field(&cp.lattice, &shifted(big_t - snap.time), &cp.model);
            let production = entropy_production(&gamma, field_at)?;
            let s_at = |h: f64| -> Result<f64> {
                let g = cp.gamma0.evolve(t + h);
                Ok(rel_entropy_gaussian(&g, &cp.local_gibbs(&shifted(eps * h))?)?.total)
            };
            let fd = (s_at(FD_STEP)? - s_at(-FD_STEP)?) / (2.0 * FD_STEP);
            series.rows.push(EntropyRow {
                size,
                time: snap.time,
                micro_time: t,
                density: s.density,
                total: s.total,
                clamped: s.clamped,
                production: production * per_site,
                production_fd: fd * per_site,
            });
        }
    }
    Ok(())
}

pub fn run_entropy_track(cfg: &ExperimentConfig) -> Result<EntropySeries> {
    let mut s = EntropySeries::default();
    entropy_track_into(cfg, &mut s)?;
    Ok(s)
}
