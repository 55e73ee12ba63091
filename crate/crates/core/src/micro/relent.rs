use super::state::{exponent_of, gibbs_exponent, GaussianState};
use crate::eos::MultiplierVector;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, recompose, CMatrix};
use crate::scalar::{cplx, Real};

/// Eigenvalue clamp applied before logarithms.
pub const LOG_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianRelEntropy<T> {
    pub total: T,
    /// `total / L`.
    pub density: T,
    /// Total amount by which eigenvalues were moved by the clamp.
    pub clamped: T,
}

fn binary_entropy_term<T: Real>(g: T) -> T {
    let mut s = T::zero();
    if g > T::zero() {
        s += g * g.ln();
    }
    if g < T::one() {
        s += (T::one() - g) * (T::one() - g).ln();
    }
    s
}

/// `S(γ|ω) = tr[C_γ(log C_γ − log C_ω)] + tr[(𝟙−C_γ)(log(𝟙−C_γ) − log(𝟙−C_ω))]`.
pub fn rel_entropy_gaussian<T: Real>(gamma: &GaussianState<T>, omega: &GaussianState<T>) -> Result<GaussianRelEntropy<T>> {
    if gamma.lattice != omega.lattice {
        return Err(Error::Invalid("states live on different lattices".into()));
    }
    let l = T::of_usize(gamma.lattice.sites());
    if gamma.momentum_matrix() == omega.momentum_matrix() {
        return Ok(GaussianRelEntropy { total: T::zero(), density: T::zero(), clamped: T::zero() });
    }
    let clip = T::of(LOG_CLAMP);
    let (wg, _) = herm_eig(gamma.momentum_matrix());
    let (wo, uo) = herm_eig(omega.momentum_matrix());
    let mut clamped = T::zero();
    let mut s = T::zero();
    for &g in wg.iter() {
        let gc = g.max(T::zero()).min(T::one());
        clamped += (g - gc).abs();
        s += binary_entropy_term(gc);
    }
    // diagonal of U†C_γU in the eigenbasis of C_ω
    let rotated = uo.adjoint() * gamma.momentum_matrix() * &uo;
    for j in 0..wo.len() {
        let c = rotated[(j, j)].re;
        let w = wo[j];
        let wc = w.max(clip).min(T::one() - clip);
        if (w < clip && c > clip) || (w > T::one() - clip && c < T::one() - clip) {
            return Err(Error::SingularReference(w.to_f64_lossy()));
        }
        clamped += (w - wc).abs();
        s -= c * wc.ln() + (T::one() - c) * (T::one() - wc).ln();
    }
    Ok(GaussianRelEntropy { total: s, density: s / l, clamped })
}

/// Trace of a product `Re tr(AB)`.
fn tr_prod<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    crate::linalg::trace_prod_re(a, b)
}

/// Time derivative of `S(γ_t | ω_t)` where `γ_t` evolves freely and `ω_t`
/// is the local Gibbs state of the multiplier field `field_at(T)` at
/// macroscopic time `T = ε·t`:
///
/// `dS/dt = tr(C_γ(−i[h₁, K] − ∂_tK)) + tr(∂_tK·(𝟙 + e^{−K})⁻¹)`.
///
/// `∂_tK` uses a centered difference of step `1e-5` in macroscopic time.
pub fn entropy_production<T: Real, F>(gamma: &GaussianState<T>, field_at: F) -> Result<T>
where
    F: Fn(T) -> Result<Vec<MultiplierVector<T>>>,
{
    let lat = &gamma.lattice;
    let eps = lat.epsilon();
    let big_t = eps * gamma.time;
    let delta = T::of(1e-5);
    let k = gibbs_exponent(lat, &field_at(big_t)?)?;
    let fp = field_at(big_t + delta)?;
    let fm = field_at(big_t - delta)?;
    let diff: Vec<MultiplierVector<T>> = fp
        .iter()
        .zip(&fm)
        .map(|(a, b)| {
            let s = eps / (T::of(2.0) * delta);
            MultiplierVector::from_dvector(1, &((a.to_dvector() - b.to_dvector()) * s))
        })
        .collect();
    let dk = exponent_of(lat, &diff);
    let p = lat.momenta();
    let half = T::of(0.5);
    let l = lat.sites();
    // −i[h₁, K] is −i(E_k − E_k′)K_kk′ in momentum space
    let comm = CMatrix::from_fn(l, l, |a, b| k[(a, b)] * cplx(T::zero(), -half * (p[a] * p[a] - p[b] * p[b])));
    let (w, u) = herm_eig(&k);
    let fk = recompose(&w, &u, |x| x.logistic());
    let c = gamma.momentum_matrix();
    Ok(tr_prod(c, &(comm - &dk)) + tr_prod(&dk, &fk))
}
