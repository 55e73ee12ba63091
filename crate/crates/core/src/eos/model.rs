use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::types::{ConservedVector, MultiplierVector};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::Real;

/// Exponent margin beyond which the Fermi integrand is dropped (e^{-60} ≈ 1e-26).
const TAIL_MARGIN: f64 = 60.0;
const MAX_NEWTON: usize = 100;

/// Momentum space over which the one-particle integrals run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentumDomain<T> {
    /// Continuum momenta over all of ℝᵈ.
    Unbounded,
    /// The discrete momenta `2πk/(n·a)`, `k ∈ (−n/2, n/2]`, of an `n`-site
    /// periodic lattice with spacing `a`, in every direction.
    Brillouin { nodes: usize, spacing: T },
}

/// ψ together with its first and second derivatives at one multiplier point.
///
/// `hess` is indexed like [`MultiplierVector::to_dvector`].
#[derive(Clone, Debug)]
pub struct Thermo<T: Real> {
    pub psi: T,
    pub q: ConservedVector<T>,
    pub hess: DMatrix<T>,
}

/// Free Fermi gas thermodynamics in dimension 1–3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EosModel<T> {
    pub dim: usize,
    pub domain: MomentumDomain<T>,
    pub quad: QuadratureSpec<T>,
}

/// Rest-frame closure value with its partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestPressure<T> {
    pub p: T,
    /// ∂P/∂ρ at fixed internal energy density.
    pub p_rho: T,
    /// ∂P/∂e_int at fixed density.
    pub p_e: T,
    pub lam: MultiplierVector<T>,
}

fn unit_sphere_area(k: usize) -> f64 {
    // area of S^{k}: S^0 = 2 points, S^1 = 2π
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => unreachable!(),
    }
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => unreachable!(),
    }
}

impl<T: Real> EosModel<T> {
    pub fn unbounded(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        Self { dim, domain: MomentumDomain::Unbounded, quad: QuadratureSpec::default() }
    }

    pub fn brillouin(dim: usize, nodes: usize, spacing: T) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        assert!(nodes >= 2 && spacing > T::zero());
        Self { dim, domain: MomentumDomain::Brillouin { nodes, spacing }, quad: QuadratureSpec::default() }
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec<T>) -> Self {
        self.quad = quad;
        self
    }

    fn check(&self, lam: &MultiplierVector<T>) -> Result<()> {
        if lam.dim != self.dim {
            return Err(Error::Invalid(format!("multiplier dimension {} != model dimension {}", lam.dim, self.dim)));
        }
        lam.validate()
    }

    pub fn pressure_psi(&self, lam: &MultiplierVector<T>) -> Result<T> {
        Ok(self.thermo(lam)?.psi)
    }

    pub fn dual_q(&self, lam: &MultiplierVector<T>) -> Result<ConservedVector<T>> {
        Ok(self.thermo(lam)?.q)
    }

    /// Physical pressure `ψ/β`.
    pub fn pressure(&self, lam: &MultiplierVector<T>) -> Result<T> {
        Ok(self.pressure_psi(lam)? / lam.lam4)
    }

    /// ψ, its gradient (as conserved densities) and its Hessian.
    pub fn thermo(&self, lam: &MultiplierVector<T>) -> Result<Thermo<T>> {
        self.check(lam)?;
        match self.domain {
            MomentumDomain::Unbounded => self.thermo_unbounded(lam),
            MomentumDomain::Brillouin { nodes, spacing } => Ok(self.thermo_lattice(lam, nodes, spacing)),
        }
    }

    fn thermo_lattice(&self, lam: &MultiplierVector<T>, n: usize, a: T) -> Thermo<T> {
        let d = self.dim;
        let two_pi = T::of(2.0 * PI);
        let dp = two_pi / (T::of_usize(n) * a);
        let half = T::of(0.5);
        // k ∈ (−n/2, n/2]
        let k0 = -(((n - 1) / 2) as i64);
        let moms: Vec<T> = (0..n).map(|i| T::of((k0 + i as i64) as f64) * dp).collect();
        let mut psi = T::zero();
        let mut grad = DVector::<T>::zeros(d + 2);
        let mut hess = DMatrix::<T>::zeros(d + 2, d + 2);
        let mut phi = DVector::<T>::zeros(d + 2);
        let total = n.pow(d as u32);
        for flat in 0..total {
            let mut idx = flat;
            let mut p = [T::zero(); 3];
            for pj in p.iter_mut().take(d) {
                *pj = moms[idx % n];
                idx /= n;
            }
            let mut g = lam.lam0;
            let mut p2 = T::zero();
            for j in 0..d {
                g += lam.lam_mom[j] * p[j];
                p2 += p[j] * p[j];
            }
            g -= lam.lam4 * p2 * half;
            let f = g.logistic();
            let fp = f * (T::one() - f);
            psi += g.softplus();
            phi[0] = T::one();
            for j in 0..d {
                phi[j + 1] = p[j];
            }
            phi[d + 1] = -p2 * half;
            for r in 0..d + 2 {
                grad[r] += phi[r] * f;
                for c in r..d + 2 {
                    hess[(r, c)] += phi[r] * phi[c] * fp;
                }
            }
        }
        let w = (T::of_usize(n) * a).powi(-(d as i32));
        for r in 0..d + 2 {
            for c in 0..r {
                hess[(r, c)] = hess[(c, r)];
            }
        }
        grad *= w;
        hess *= w;
        let mut q = ConservedVector::from_dvector(d, &grad);
        q.e = -q.e;
        Thermo { psi: psi * w, q, hess }
    }

    /// Continuum integrals. The momentum drift is rotated onto the first
    /// axis; transverse directions are integrated radially.
    fn thermo_unbounded(&self, lam: &MultiplierVector<T>) -> Result<Thermo<T>> {
        let d = self.dim;
        let half = T::of(0.5);
        let b4 = lam.lam4;
        let lnorm = lam.lam_mom_norm();
        let center = lnorm / b4;
        let a = (lam.lam0 + lnorm * lnorm / (T::of(2.0) * b4)).max(T::zero());
        let margin = T::of(TAIL_MARGIN);
        let radius = (T::of(2.0) * (a + margin) / b4).sqrt();
        let inner_spec = QuadratureSpec { rel_tol: self.quad.rel_tol * T::of(0.1), ..self.quad };

        // inner moments over the transverse radius: [softplus, f, f r², f', f' r², f' r⁴]
        let inner = |s: T| -> Result<[T; 6]> {
            let b = lam.lam0 + lnorm * s - b4 * s * s * half;
            if d == 1 {
                let f = b.logistic();
                return Ok([b.softplus(), f, T::zero(), f * (T::one() - f), T::zero(), T::zero()]);
            }
            if b < -margin {
                return Ok([T::zero(); 6]);
            }
            let r_max = (T::of(2.0) * (b.max(T::zero()) + margin) / b4).sqrt();
            let area = T::of(unit_sphere_area(d - 2));
            let v = integrate(
                |r: T, out: &mut [T]| {
                    let w = area * if d == 2 { T::one() } else { r };
                    let g = b - b4 * r * r * half;
                    let f = g.logistic();
                    let fp = f * (T::one() - f);
                    let r2 = r * r;
                    out[0] = w * g.softplus();
                    out[1] = w * f;
                    out[2] = w * f * r2;
                    out[3] = w * fp;
                    out[4] = w * fp * r2;
                    out[5] = w * fp * r2 * r2;
                },
                T::zero(),
                r_max,
                6,
                &inner_spec,
            )?;
            Ok([v[0], v[1], v[2], v[3], v[4], v[5]])
        };

        let mut failure = None;
        let outer = integrate(
            |s: T, out: &mut [T]| {
                let m = match inner(s) {
                    Ok(m) => m,
                    Err(e) => {
                        failure.get_or_insert(e);
                        [T::zero(); 6]
                    }
                };
                let s2 = s * s;
                out[0] = m[0];
                out[1] = m[1];
                out[2] = s * m[1];
                out[3] = half * (s2 * m[1] + m[2]);
                out[4] = m[3];
                out[5] = s * m[3];
                out[6] = -half * (s2 * m[3] + m[4]);
                out[7] = s2 * m[3];
                out[8] = m[4];
                out[9] = -half * s * (s2 * m[3] + m[4]);
                out[10] = T::of(0.25) * (s2 * s2 * m[3] + T::of(2.0) * s2 * m[4] + m[5]);
            },
            center - radius,
            center + radius,
            11,
            &self.quad,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let norm = T::of((2.0 * PI).powi(-(d as i32)));
        let o: Vec<T> = outer.into_iter().map(|x| x * norm).collect();

        // unit vector along λ⃗ (arbitrary axis when λ⃗ = 0)
        let mut u = [T::zero(); 3];
        if lnorm > T::zero() {
            for j in 0..d {
                u[j] = lam.lam_mom[j] / lnorm;
            }
        } else {
            u[0] = T::one();
        }
        let perp = if d > 1 { o[8] / T::of_usize(d - 1) } else { T::zero() };
        // odd moments vanish by parity when there is no drift
        let (o2, o5, o9) = if lnorm > T::zero() { (o[2], o[5], o[9]) } else { (T::zero(), T::zero(), T::zero()) };
        let mut mom = [T::zero(); 3];
        for j in 0..d {
            mom[j] = o2 * u[j];
        }
        let q = ConservedVector { rho: o[1], mom, e: o[3], dim: d };
        let mut h = DMatrix::<T>::zeros(d + 2, d + 2);
        h[(0, 0)] = o[4];
        h[(0, d + 1)] = o[6];
        h[(d + 1, 0)] = o[6];
        h[(d + 1, d + 1)] = o[10];
        for i in 0..d {
            h[(0, i + 1)] = o5 * u[i];
            h[(i + 1, 0)] = o5 * u[i];
            h[(d + 1, i + 1)] = o9 * u[i];
            h[(i + 1, d + 1)] = o9 * u[i];
            for j in 0..d {
                let delta = if i == j { perp } else { T::zero() };
                h[(i + 1, j + 1)] = (o[7] - perp) * u[i] * u[j] + delta;
            }
        }
        Ok(Thermo { psi: o[0], q, hess: h })
    }

    /// Minimum energy density at density `rho` (filled Fermi sea, at rest).
    pub fn energy_floor(&self, rho: T) -> Result<T> {
        if !(rho > T::zero()) {
            return Err(Error::OutOfDomain(format!("density {rho} is not positive")));
        }
        let d = self.dim as f64;
        let r = rho.to_f64_lossy();
        let p_f = 2.0 * PI * (r / unit_ball_volume(self.dim)).powf(1.0 / d);
        if let MomentumDomain::Brillouin { spacing, .. } = self.domain {
            let edge = PI / spacing.to_f64_lossy();
            if p_f >= edge {
                return Err(Error::OutOfDomain(format!(
                    "density {r} needs Fermi momentum {p_f} beyond the zone edge {edge}"
                )));
            }
        }
        Ok(T::of(d / (d + 2.0) * r * p_f * p_f / 2.0))
    }

    /// Checks that `q` lies strictly inside the dualizable region.
    pub fn check_domain(&self, q: &ConservedVector<T>) -> Result<()> {
        if q.dim != self.dim {
            return Err(Error::Invalid(format!("conserved dimension {} != model dimension {}", q.dim, self.dim)));
        }
        if !q.is_finite() {
            return Err(Error::OutOfDomain(format!("non-finite densities {q:?}")));
        }
        let floor = self.energy_floor(q.rho)?;
        let eint = q.internal_energy();
        if !(eint > floor) {
            return Err(Error::OutOfDomain(format!(
                "internal energy {eint:e} not above zero-temperature floor {floor:e} at density {}",
                q.rho
            )));
        }
        if let MomentumDomain::Brillouin { spacing, .. } = self.domain {
            // β → 0⁺ spreads particles uniformly over the zone
            let ceiling = q.rho * T::of_usize(self.dim) * T::of(PI * PI / 6.0) / (spacing * spacing);
            if !(eint < ceiling) {
                return Err(Error::OutOfDomain(format!(
                    "internal energy {eint:e} needs negative temperature (infinite-temperature value {ceiling:e})"
                )));
            }
        }
        Ok(())
    }

    /// A starting point for Newton from a classical/degenerate interpolation.
    pub fn initial_guess(&self, q: &ConservedVector<T>) -> Result<MultiplierVector<T>> {
        self.check_domain(q)?;
        let d = self.dim as f64;
        let rho = q.rho.to_f64_lossy();
        let de = (q.internal_energy() - self.energy_floor(q.rho)?).to_f64_lossy();
        let p_f = 2.0 * PI * (rho / unit_ball_volume(self.dim)).powf(1.0 / d);
        let e_f = 0.5 * p_f * p_f;
        let t_cl = 2.0 / d * de / rho;
        let dos = 0.5 * d * rho / e_f;
        let t_deg = (6.0 * de / (PI * PI * dos)).sqrt();
        let t = t_cl.max(t_deg);
        let beta = 1.0 / t;
        let mu_rest = if t < e_f { e_f } else { t * (rho * (2.0 * PI * beta).powf(0.5 * d)).ln() };
        let v = q.velocity();
        let v2: f64 = v[..self.dim].iter().map(|x| x.to_f64_lossy().powi(2)).sum();
        let alpha: Vec<T> = v[..self.dim].to_vec();
        Ok(MultiplierVector::from_physical(self.dim, T::of(beta), &alpha, T::of(mu_rest - 0.5 * v2)))
    }

    fn scaled_residual(&self, q: &ConservedVector<T>, target: &ConservedVector<T>) -> T {
        let mscale = target.mom_sq().sqrt().max((T::of(2.0) * target.rho * target.e).abs().sqrt());
        let mut r = ((q.rho - target.rho) / target.rho).abs().max(((q.e - target.e) / target.e).abs());
        for j in 0..self.dim {
            r = r.max(((q.mom[j] - target.mom[j]) / mscale).abs());
        }
        r
    }

    /// Finds λ with `dual_q(λ) = target` by damped Newton on the concave
    /// objective `λ·q − ψ(λ)`.
    pub fn invert_to_multipliers(
        &self,
        target: &ConservedVector<T>,
        initial_guess: &MultiplierVector<T>,
    ) -> Result<MultiplierVector<T>> {
        self.check_domain(target)?;
        let d = self.dim;
        let tol = (T::of(100.0) * self.quad.rel_tol).max(T::of(1e-12));
        let mut lam = *initial_guess;
        if lam.validate().is_err() || lam.dim != d {
            lam = self.initial_guess(target)?;
        }
        let mut th = self.thermo(&lam)?;
        let mut res = self.scaled_residual(&th.q, target);
        let tv = target.to_dvector();
        for _ in 0..MAX_NEWTON {
            if res <= tol {
                return Ok(lam);
            }
            // gradient of the objective: S·q* − ∇ψ, with S = diag(1,…,1,−1)
            let mut g = DVector::<T>::zeros(d + 2);
            let qv = th.q.to_dvector();
            for i in 0..d + 2 {
                g[i] = tv[i] - qv[i];
            }
            g[d + 1] = -g[d + 1];
            let step = match th.hess.clone().cholesky() {
                Some(ch) => ch.solve(&g),
                None => th.hess.clone().lu().solve(&g).unwrap_or(g.clone()),
            };
            let base = lam.to_dvector();
            let mut t = T::one();
            let mut accepted = false;
            for _ in 0..60 {
                let cand = MultiplierVector::from_dvector(d, &(&base + &step * t));
                if cand.lam4 > T::zero() && cand.lam0.is_finite() {
                    if let Ok(th_c) = self.thermo(&cand) {
                        let r_c = self.scaled_residual(&th_c.q, target);
                        if r_c < res {
                            lam = cand;
                            th = th_c;
                            res = r_c;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= T::of(0.5);
            }
            if !accepted {
                break;
            }
        }
        if res <= tol {
            return Ok(lam);
        }
        Err(Error::NoConvergence { iterations: MAX_NEWTON, residual: res.to_f64_lossy() })
    }

    /// Rest-frame closure `P(ρ, e_int)` with its partial derivatives.
    pub fn rest_state(&self, rho: T, eint: T, guess: Option<&MultiplierVector<T>>) -> Result<RestPressure<T>> {
        let d = self.dim;
        let zeros = [T::zero(); 3];
        let target = ConservedVector::new(d, rho, &zeros, eint);
        let g = match guess {
            Some(g) => *g,
            None => self.initial_guess(&target)?,
        };
        let lam = self.invert_to_multipliers(&target, &g)?;
        let th = self.thermo(&lam)?;
        let b = lam.lam4;
        let p = th.psi / b;
        // dP/dq = S·H⁻¹·∇_λP, since ∂q/∂λ = S·H with S = diag(1,…,1,−1);
        // the full system keeps the momentum pinned (the lattice zone is not
        // parity symmetric, so λ⃗ need not vanish at rest)
        let mut grad = DVector::<T>::zeros(d + 2);
        grad[0] = th.q.rho / b;
        for j in 0..d {
            grad[j + 1] = th.q.mom[j] / b;
        }
        grad[d + 1] = (-th.q.e - p) / b;
        let y = th
            .hess
            .clone()
            .cholesky()
            .map(|c| c.solve(&grad))
            .ok_or_else(|| Error::OutOfDomain("degenerate Hessian at rest state".into()))?;
        let p_rho = y[0];
        let p_e = -y[d + 1];
        Ok(RestPressure { p, p_rho, p_e, lam })
    }

    /// Rest-frame pressure evaluated at the internal energy of `q`.
    pub fn rest_pressure(&self, q: &ConservedVector<T>) -> Result<T> {
        self.check_domain(q)?;
        Ok(self.rest_state(q.rho, q.internal_energy(), None)?.p)
    }

    /// `2(e − ½|α|²ρ) − d·P`, which vanishes for the free gas.
    pub fn virial_gap(&self, lam: &MultiplierVector<T>) -> Result<T> {
        let th = self.thermo(lam)?;
        let p = th.psi / lam.lam4;
        Ok(T::of(2.0) * (th.q.e - T::of(0.5) * lam.alpha_sq() * th.q.rho) - T::of_usize(self.dim) * p)
    }
}
