use crate::eos::{ConservedField, ConservedVector, EosModel, MultiplierField};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::closure::Closure;

pub const DEFAULT_CFL: f64 = 0.4;
const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITER: usize = 500;
/// Shock flag: maximal density gradient grew by this factor.
const SHOCK_GROWTH: f64 = 2.0;

/// Uniform periodic grid on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MacroGrid {
    n: usize,
}

impl MacroGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::Invalid(format!("grid needs at least 8 cells, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn dx<T: Real>(&self) -> T {
        T::one() / T::of_usize(self.n)
    }

    pub fn center<T: Real>(&self, j: usize) -> T {
        (T::of_usize(j) + T::of(0.5)) / T::of_usize(self.n)
    }

    pub fn centers<T: Real>(&self) -> Vec<T> {
        (0..self.n).map(|j| self.center(j)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct EulerSolution<T> {
    pub q: ConservedField<T>,
    pub time: T,
    pub cfl: T,
}

impl<T: Real> EulerSolution<T> {
    pub fn new(q: ConservedField<T>, cfl: T) -> Self {
        Self { q, time: T::zero(), cfl }
    }

    /// Cell-average totals `ΔX·Σ_j q_j` of (ρ, q¹, q⁴).
    pub fn totals(&self) -> [T; 3] {
        let dx = T::one() / T::of_usize(self.q.len());
        let mut t = [T::zero(); 3];
        for c in &self.q {
            t[0] += c.rho;
            t[1] += c.mom[0];
            t[2] += c.e;
        }
        t.map(|v| v * dx)
    }
}

/// `A(q)` in one dimension: `(q¹, P + (q¹)²/q⁰, q¹(q⁴ + P)/q⁰)`.
pub fn flux_a<T: Real>(q: &ConservedVector<T>, p: T) -> Result<[T; 3]> {
    if !(q.rho > T::zero()) {
        return Err(Error::VacuumCell(q.rho.to_f64_lossy()));
    }
    let m = q.mom[0];
    Ok([m, p + m * m / q.rho, m * (q.e + p) / q.rho])
}

fn one_phase<T: Real, C: Closure<T>>(closure: &C, q: &ConservedVector<T>, cell: usize, time: T) -> Result<T> {
    let fail = |reason: String| Error::LeftOnePhaseRegion { cell, time: time.to_f64_lossy(), reason };
    if !q.is_finite() || !(q.rho > T::zero()) {
        return Err(fail(format!("density {} is not positive", q.rho)));
    }
    let eint = q.internal_energy();
    let floor = closure.energy_floor(q.rho).map_err(|e| fail(e.to_string()))?;
    if !(eint > floor) {
        return Err(fail(format!("internal energy {eint:e} not above floor {floor:e}")));
    }
    closure.pressure(q.rho, eint).map_err(|e| fail(e.to_string()))
}

/// Sound speed: spectral radius of the finite-difference flux Jacobian at the
/// rest state with the same density and internal energy, by power iteration on
/// `J²` (whose top eigenvalue is `c²` even when `±c` tie).
pub fn sound_speed<T: Real, C: Closure<T>>(closure: &C, rho: T, eint: T) -> Result<T> {
    let base = [rho, T::zero(), eint];
    let scale = [rho, (rho * eint).abs().sqrt(), eint];
    let eval = |v: [T; 3]| -> Result<[T; 3]> {
        let q = ConservedVector::new(1, v[0], &[v[1]], v[2]);
        let p = closure.pressure(q.rho, q.internal_energy())?;
        flux_a(&q, p)
    };
    let mut jac = [[T::zero(); 3]; 3];
    for k in 0..3 {
        let h = T::of(1e-6) * scale[k];
        let mut up = base;
        let mut dn = base;
        up[k] += h;
        dn[k] -= h;
        let (fu, fd) = (eval(up)?, eval(dn)?);
        for i in 0..3 {
            jac[i][k] = (fu[i] - fd[i]) / (h + h);
        }
    }
    let mul = |a: &[[T; 3]; 3], v: [T; 3]| -> [T; 3] {
        let mut out = [T::zero(); 3];
        for i in 0..3 {
            for k in 0..3 {
                out[i] += a[i][k] * v[k];
            }
        }
        out
    };
    let norm = |v: [T; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let mut v = [T::one(), T::of(0.5), T::of(0.25)];
    let mut est = T::zero();
    for _ in 0..POWER_MAX_ITER {
        let w = mul(&jac, mul(&jac, v));
        let nw = norm(w);
        if !(nw > T::zero()) {
            return Ok(T::zero());
        }
        let next = nw / norm(v);
        v = w.map(|x| x / nw);
        if (next - est).abs() <= T::of(POWER_TOL) * next {
            est = next;
            break;
        }
        est = next;
    }
    Ok(est.sqrt())
}

struct Stage<T> {
    flux: Vec<[T; 3]>,
    speed: Vec<T>,
}

fn evaluate<T: Real, C: Closure<T>>(closure: &C, q: &[ConservedVector<T>], time: T) -> Result<Stage<T>> {
    let mut flux = Vec::with_capacity(q.len());
    let mut speed = Vec::with_capacity(q.len());
    for (j, c) in q.iter().enumerate() {
        let p = one_phase(closure, c, j, time)?;
        flux.push(flux_a(c, p)?);
        let cs = sound_speed(closure, c.rho, c.internal_energy()).map_err(|e| Error::LeftOnePhaseRegion {
            cell: j,
            time: time.to_f64_lossy(),
            reason: e.to_string(),
        })?;
        speed.push((c.mom[0] / c.rho).abs() + cs);
    }
    Ok(Stage { flux, speed })
}

/// Semi-discrete right-hand side `dq_j/dT = −(F_{j+½} − F_{j−½})/ΔX` with the
/// Rusanov interface flux.
fn residual<T: Real>(q: &[ConservedVector<T>], st: &Stage<T>) -> Vec<[T; 3]> {
    let n = q.len();
    let dx = T::one() / T::of_usize(n);
    let iface: Vec<[T; 3]> = (0..n)
        .map(|j| {
            let r = (j + 1) % n;
            let s = st.speed[j].max(st.speed[r]);
            let (ql, qr) = (&q[j], &q[r]);
            let jump = [qr.rho - ql.rho, qr.mom[0] - ql.mom[0], qr.e - ql.e];
            let mut f = [T::zero(); 3];
            for i in 0..3 {
                f[i] = T::of(0.5) * (st.flux[j][i] + st.flux[r][i]) - T::of(0.5) * s * jump[i];
            }
            f
        })
        .collect();
    (0..n)
        .map(|j| {
            let l = (j + n - 1) % n;
            let mut out = [T::zero(); 3];
            for i in 0..3 {
                out[i] = -(iface[j][i] - iface[l][i]) / dx;
            }
            out
        })
        .collect()
}

fn axpy<T: Real>(q: &[ConservedVector<T>], dt: T, r: &[[T; 3]]) -> ConservedField<T> {
    q.iter()
        .zip(r)
        .map(|(c, d)| ConservedVector::new(1, c.rho + dt * d[0], &[c.mom[0] + dt * d[1]], c.e + dt * d[2]))
        .collect()
}

/// `dq/dT` of the semi-discrete scheme.
pub fn time_derivative<T: Real, C: Closure<T>>(sol: &EulerSolution<T>, closure: &C) -> Result<ConservedField<T>> {
    let st = evaluate(closure, &sol.q, sol.time)?;
    Ok(residual(&sol.q, &st)
        .into_iter()
        .map(|d| ConservedVector::new(1, d[0], &[d[1]], d[2]))
        .collect())
}

/// Largest stable step `CFL·ΔX / max(|v| + c)`.
pub fn max_dt<T: Real, C: Closure<T>>(sol: &EulerSolution<T>, closure: &C) -> Result<T> {
    let st = evaluate(closure, &sol.q, sol.time)?;
    Ok(dt_bound(sol, &st))
}

fn dt_bound<T: Real>(sol: &EulerSolution<T>, st: &Stage<T>) -> T {
    let smax = st.speed.iter().fold(T::zero(), |a, &b| a.max(b));
    let dx = T::one() / T::of_usize(sol.q.len());
    if smax > T::zero() {
        sol.cfl * dx / smax
    } else {
        T::of(f64::INFINITY)
    }
}

/// One Heun step of length `dt`.
pub fn step<T: Real, C: Closure<T>>(sol: &EulerSolution<T>, dt: T, closure: &C) -> Result<EulerSolution<T>> {
    let st = evaluate(closure, &sol.q, sol.time)?;
    let bound = dt_bound(sol, &st);
    if dt > bound * (T::one() + T::of(1e-12)) {
        return Err(Error::CflViolation { dt: dt.to_f64_lossy(), bound: bound.to_f64_lossy() });
    }
    heun(sol, dt, closure, st)
}

fn heun<T: Real, C: Closure<T>>(sol: &EulerSolution<T>, dt: T, closure: &C, st: Stage<T>) -> Result<EulerSolution<T>> {
    let r1 = residual(&sol.q, &st);
    let q1 = axpy(&sol.q, dt, &r1);
    let st1 = evaluate(closure, &q1, sol.time + dt)?;
    let r2 = residual(&q1, &st1);
    let half = T::of(0.5);
    let q: ConservedField<T> = sol
        .q
        .iter()
        .zip(r1.iter().zip(&r2))
        .map(|(c, (a, b))| {
            ConservedVector::new(
                1,
                c.rho + half * dt * (a[0] + b[0]),
                &[c.mom[0] + half * dt * (a[1] + b[1])],
                c.e + half * dt * (a[2] + b[2]),
            )
        })
        .collect();
    let time = sol.time + dt;
    for (j, c) in q.iter().enumerate() {
        one_phase(closure, c, j, time)?;
    }
    Ok(EulerSolution { q, time, cfl: sol.cfl })
}

#[derive(Clone, Debug)]
pub struct RunOptions<T> {
    pub t_final: T,
    /// Requested snapshot times in `[0, t_final]`; `t_final` is always included.
    pub snapshots: Vec<T>,
    pub cfl: T,
}

impl<T: Real> RunOptions<T> {
    pub fn until(t_final: T) -> Self {
        Self { t_final, snapshots: Vec::new(), cfl: T::of(DEFAULT_CFL) }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub snapshots: Vec<EulerSolution<T>>,
    pub steps: usize,
    /// First time at which the density gradient blew up; results after it
    /// are not smooth solutions.
    pub shock_time: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &EulerSolution<T> {
        self.snapshots.last().expect("trajectory always holds a snapshot")
    }
}

fn max_gradient<T: Real>(q: &[ConservedVector<T>]) -> T {
    let n = q.len();
    let mut g = T::zero();
    for j in 0..n {
        g = g.max((q[(j + 1) % n].rho - q[j].rho).abs());
    }
    g * T::of_usize(n)
}

/// Evolves `initial` with adaptive CFL-limited steps, landing exactly on the
/// requested snapshot times.
pub fn run<T: Real, C: Closure<T>>(
    initial: &[ConservedVector<T>],
    grid: MacroGrid,
    closure: &C,
    opts: &RunOptions<T>,
) -> Result<Trajectory<T>> {
    if initial.len() != grid.cells() {
        return Err(Error::Invalid(format!("{} cells for a grid of {}", initial.len(), grid.cells())));
    }
    let mut stops: Vec<T> = opts.snapshots.iter().copied().filter(|&t| t >= T::zero() && t < opts.t_final).collect();
    stops.push(opts.t_final.max(T::zero()));
    stops.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    stops.dedup();

    let mut sol = EulerSolution::new(initial.to_vec(), opts.cfl);
    for (j, c) in sol.q.iter().enumerate() {
        one_phase(closure, c, j, T::zero())?;
    }
    let g0 = max_gradient(&sol.q);
    let mut shock_time = None;
    let mut snapshots = Vec::with_capacity(stops.len());
    let mut steps = 0;
    for &stop in &stops {
        while sol.time < stop {
            let st = evaluate(closure, &sol.q, sol.time)?;
            let mut dt = dt_bound(&sol, &st);
            let remaining = stop - sol.time;
            if dt >= remaining {
                dt = remaining;
            }
            let next = heun(&sol, dt, closure, st)?;
            sol = next;
            if dt == remaining {
                sol.time = stop;
            }
            steps += 1;
            if shock_time.is_none() && max_gradient(&sol.q) > T::of(SHOCK_GROWTH) * g0.max(T::tiny()) {
                shock_time = Some(sol.time);
            }
        }
        snapshots.push(sol.clone());
    }
    Ok(Trajectory { snapshots, steps, shock_time })
}

/// Pointwise inversion `q(X) ↦ λ(X)`, warm-starting each cell from its
/// neighbour.
pub fn lambda_field_of<T: Real>(qfield: &[ConservedVector<T>], model: &EosModel<T>) -> Result<MultiplierField<T>> {
    let mut out: MultiplierField<T> = Vec::with_capacity(qfield.len());
    for (cell, q) in qfield.iter().enumerate() {
        let at = |e: Error| Error::OutOfDomainAt { cell, reason: e.to_string() };
        model.check_domain(q).map_err(at)?;
        let guess = match out.last() {
            Some(prev) => *prev,
            None => model.initial_guess(q).map_err(at)?,
        };
        let lam = model
            .invert_to_multipliers(q, &guess)
            .or_else(|_| model.initial_guess(q).and_then(|g| model.invert_to_multipliers(q, &g)))
            .map_err(at)?;
        out.push(lam);
    }
    Ok(out)
}

/// Samples a profile's conserved densities at the cell centres.
pub fn initial_field<T: Real>(
    profile: &super::Profile,
    grid: MacroGrid,
    model: &EosModel<T>,
) -> Result<ConservedField<T>> {
    (0..grid.cells()).map(|j| model.dual_q(&profile.lambda_at(grid.center::<T>(j)))).collect()
}
