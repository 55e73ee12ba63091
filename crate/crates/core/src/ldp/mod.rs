//! Legendre-transform entropy and large-deviation rate functions.

use nalgebra::{DMatrix, DVector};

use crate::eos::{ConservedVector, EosModel, MultiplierVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One evaluation of `I(q′, λ) = s(q′) + ψ(λ) − λ·q′`.
#[derive(Clone, Debug)]
pub struct RateEvaluation<T> {
    pub q_prime: ConservedVector<T>,
    pub lam: MultiplierVector<T>,
    pub s_value: T,
    pub rate: T,
    pub maximizer: MultiplierVector<T>,
}

/// Rate restricted to a box of multipliers.
#[derive(Clone, Debug)]
pub struct TruncatedRate<T> {
    pub rate: T,
    pub maximizer: MultiplierVector<T>,
    /// Components pinned at a face of the box.
    pub active: Vec<bool>,
}

/// `s(q′) = sup_λ [λ·q′ − ψ(λ)]` with the signed pairing, and its maximizer.
pub fn entropy_s<T: Real>(model: &EosModel<T>, q_prime: &ConservedVector<T>) -> Result<(T, MultiplierVector<T>)> {
    let guess = model.initial_guess(q_prime)?;
    let lam = model.invert_to_multipliers(q_prime, &guess)?;
    let s = lam.pair(q_prime) - model.pressure_psi(&lam)?;
    Ok((s, lam))
}

pub fn rate_i<T: Real>(
    model: &EosModel<T>,
    q_prime: &ConservedVector<T>,
    lam: &MultiplierVector<T>,
) -> Result<RateEvaluation<T>> {
    let (s_value, maximizer) = entropy_s(model, q_prime)?;
    let rate = s_value + model.pressure_psi(lam)? - lam.pair(q_prime);
    Ok(RateEvaluation { q_prime: *q_prime, lam: *lam, s_value, rate, maximizer })
}

/// `Hess_{q′} I = S·(∂q/∂λ)⁻¹` with `∂q/∂λ` from central differences of the
/// dual map at the maximizer.
pub fn rate_hessian<T: Real>(model: &EosModel<T>, q_prime: &ConservedVector<T>) -> Result<DMatrix<T>> {
    let (_, lam) = entropy_s(model, q_prime)?;
    let d = model.dim;
    let n = d + 2;
    let base = lam.to_dvector();
    let mut jac = DMatrix::<T>::zeros(n, n);
    for c in 0..n {
        let h = T::of(1e-4) * base[c].abs().max(T::one());
        let mut vp = base.clone();
        let mut vm = base.clone();
        vp[c] += h;
        vm[c] -= h;
        let qp = model.dual_q(&MultiplierVector::from_dvector(d, &vp))?.to_dvector();
        let qm = model.dual_q(&MultiplierVector::from_dvector(d, &vm))?.to_dvector();
        jac.set_column(c, &((qp - qm) / (T::of(2.0) * h)));
    }
    let inv = jac.try_inverse().ok_or_else(|| Error::OutOfDomain("singular dual Jacobian".into()))?;
    let mut hess = inv;
    for c in 0..n {
        hess[(n - 1, c)] = -hess[(n - 1, c)];
    }
    // symmetrize away difference noise
    Ok((&hess + hess.transpose()) * T::of(0.5))
}

fn box_bounds<T: Real>(dim: usize, eta: T) -> (DVector<T>, DVector<T>) {
    let big = T::one() / eta;
    let mut lo = DVector::from_element(dim + 2, -big);
    let hi = DVector::from_element(dim + 2, big);
    lo[dim + 1] = eta;
    (lo, hi)
}

fn clamp_into<T: Real>(v: &DVector<T>, lo: &DVector<T>, hi: &DVector<T>) -> DVector<T> {
    DVector::from_iterator(v.len(), (0..v.len()).map(|i| v[i].max(lo[i]).min(hi[i])))
}

/// Objective `ξ·q′ − ψ(ξ)` with its gradient and (negated) Hessian.
fn objective<T: Real>(
    model: &EosModel<T>,
    q_prime: &ConservedVector<T>,
    xi: &DVector<T>,
) -> Result<(T, DVector<T>, DMatrix<T>)> {
    let d = model.dim;
    let lam = MultiplierVector::from_dvector(d, xi);
    let th = model.thermo(&lam)?;
    let mut g = q_prime.to_dvector() - th.q.to_dvector();
    g[d + 1] = -g[d + 1];
    Ok((lam.pair(q_prime) - th.psi, g, th.hess))
}

/// `Ĩ_η(q′, λ)`: the supremum in the entropy restricted to
/// `|ξ_j| ≤ 1/η` (j < d+1) and `η ≤ ξ₄ ≤ 1/η`.
pub fn rate_i_truncated<T: Real>(
    model: &EosModel<T>,
    q_prime: &ConservedVector<T>,
    lam: &MultiplierVector<T>,
    eta: T,
) -> Result<TruncatedRate<T>> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::Invalid(format!("truncation parameter must lie in (0, 1), got {eta}")));
    }
    model.check_domain(q_prime)?;
    let d = model.dim;
    let n = d + 2;
    let (lo, hi) = box_bounds(d, eta);
    let start = match entropy_s(model, q_prime) {
        Ok((_, m)) => m.to_dvector(),
        Err(_) => lam.to_dvector(),
    };
    let mut xi = clamp_into(&start, &lo, &hi);
    let (mut val, mut g, mut h) = objective(model, q_prime, &xi)?;

    // gradient components are density differences; scale them like q′
    let mscale = q_prime.mom_sq().sqrt().max((T::of(2.0) * q_prime.rho * q_prime.e).abs().sqrt());
    let mut scale = DVector::from_element(n, mscale);
    scale[0] = q_prime.rho;
    scale[n - 1] = q_prime.e;
    let tol = T::of(1e-11);
    let slack = |v: T, b: T| (v - b).abs() <= T::of(1e-14) * b.abs().max(T::one());
    let free_mask = |xi: &DVector<T>, g: &DVector<T>| -> Vec<bool> {
        (0..n)
            .map(|i| !((slack(xi[i], lo[i]) && g[i] < T::zero()) || (slack(xi[i], hi[i]) && g[i] > T::zero())))
            .collect()
    };
    let pg_norm = |free: &[bool], g: &DVector<T>| {
        (0..n).filter(|&i| free[i]).fold(T::zero(), |a, i| a.max((g[i] / scale[i]).abs()))
    };

    let mut free = free_mask(&xi, &g);
    for _ in 0..200 {
        if pg_norm(&free, &g) <= tol {
            break;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let hf = DMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])]);
        let gf = DVector::from_iterator(idx.len(), idx.iter().map(|&i| g[i]));
        let Some(step) = hf.cholesky().map(|c| c.solve(&gf)) else { break };
        let mut t = T::one();
        let mut moved = false;
        for _ in 0..50 {
            let mut cand = xi.clone();
            for (k, &i) in idx.iter().enumerate() {
                cand[i] += t * step[k];
            }
            let cand = clamp_into(&cand, &lo, &hi);
            if let Ok((v, gc, hc)) = objective(model, q_prime, &cand) {
                if v > val {
                    xi = cand;
                    val = v;
                    g = gc;
                    h = hc;
                    moved = true;
                    break;
                }
            }
            t *= T::of(0.5);
        }
        free = free_mask(&xi, &g);
        if !moved {
            break;
        }
    }

    // coordinate-search fallback: concave 1-D Newton steps with clamping
    let mut sweeps = 0;
    while pg_norm(&free, &g) > tol && sweeps < 500 {
        sweeps += 1;
        for i in 0..n {
            if !free[i] {
                continue;
            }
            let mut t = T::one();
            for _ in 0..50 {
                let mut cand = xi.clone();
                cand[i] = (xi[i] + t * g[i] / h[(i, i)]).max(lo[i]).min(hi[i]);
                if let Ok((v, gc, hc)) = objective(model, q_prime, &cand) {
                    if v >= val {
                        xi = cand;
                        val = v;
                        g = gc;
                        h = hc;
                        break;
                    }
                }
                t *= T::of(0.5);
            }
            free = free_mask(&xi, &g);
        }
    }
    if pg_norm(&free, &g) > T::of(1e-7) {
        return Err(Error::NoConvergence { iterations: 200 + sweeps, residual: pg_norm(&free, &g).to_f64_lossy() });
    }
    let rate = val + model.pressure_psi(lam)? - lam.pair(q_prime);
    Ok(TruncatedRate { rate, maximizer: MultiplierVector::from_dvector(d, &xi), active: free.iter().map(|f| !f).collect() })
}

/// Rate `I(q′, λ)` on a `(ρ′, e′)` grid with the momentum density of `λ`;
/// points outside the one-phase domain are reported as `None`.
pub fn rate_scan<T: Real>(
    model: &EosModel<T>,
    lam: &MultiplierVector<T>,
    rho: &[T],
    e: &[T],
) -> Result<Vec<(T, T, Option<T>)>> {
    let q0 = model.dual_q(lam)?;
    let mut out = Vec::with_capacity(rho.len() * e.len());
    for &r in rho {
        for &en in e {
            let q = ConservedVector { rho: r, e: en, ..q0 };
            let v = match rate_i(model, &q, lam) {
                Ok(ev) => Some(ev.rate),
                Err(Error::OutOfDomain(_)) => None,
                Err(err) => return Err(err),
            };
            out.push((r, en, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
