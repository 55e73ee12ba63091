use nalgebra::DVector;

use super::lattice::Lattice;
use crate::eos::MultiplierVector;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, hermiticity_defect, recompose, CMatrix};
use crate::scalar::{cplx, creal, Cplx, Real};

/// Quasi-free state given by its one-particle correlation matrix
/// `C(x, y) = ⟨a⁺_y a_x⟩`, stored in the momentum basis `Ĉ = F†CF`.
#[derive(Clone, Debug)]
pub struct GaussianState<T: Real> {
    pub lattice: Lattice<T>,
    chat: CMatrix<T>,
    /// Microscopic time of the snapshot.
    pub time: T,
}

/// Local densities of particle number, momentum and kinetic energy, per unit
/// length.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityFields<T> {
    pub n: Vec<T>,
    pub p: Vec<T>,
    pub h: Vec<T>,
}

/// Currents of the three conserved densities.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentTensor<T> {
    pub w0: Vec<T>,
    pub w1: Vec<T>,
    pub w4: Vec<T>,
}

impl<T: Real> DensityFields<T> {
    /// Lattice sums `a·Σ_x u(x)` of `(n, p, h)`.
    pub fn totals(&self, spacing: T) -> [T; 3] {
        [&self.n, &self.p, &self.h].map(|f| f.iter().fold(T::zero(), |s, &x| s + x) * spacing)
    }
}

/// One-particle exponent `K` of a local Gibbs state, in the momentum basis:
/// `K = L⁰ + ½(L¹P + PL¹) − ½PL⁴P` with `Lᵘ = diag(λᵘ(εx))`.
pub fn gibbs_exponent<T: Real>(lattice: &Lattice<T>, field: &[MultiplierVector<T>]) -> Result<CMatrix<T>> {
    let l = lattice.sites();
    if field.len() != l {
        return Err(Error::Invalid(format!("multiplier field has {} samples for {l} sites", field.len())));
    }
    for lam in field {
        if lam.dim != 1 {
            return Err(Error::Invalid("microscopic states are one-dimensional".into()));
        }
        lam.validate()?;
    }
    Ok(exponent_of(lattice, field))
}

/// The same linear construction without validation (used for time
/// derivatives of the exponent, whose `λ⁴` need not be positive).
pub(crate) fn exponent_of<T: Real>(lattice: &Lattice<T>, field: &[MultiplierVector<T>]) -> CMatrix<T> {
    let l = lattice.sites();
    let v0 = lattice.coefficients(&field.iter().map(|m| m.lam0).collect::<Vec<_>>());
    let v1 = lattice.coefficients(&field.iter().map(|m| m.lam_mom[0]).collect::<Vec<_>>());
    let v4 = lattice.coefficients(&field.iter().map(|m| m.lam4).collect::<Vec<_>>());
    let p = lattice.momenta();
    let half = T::of(0.5);
    CMatrix::from_fn(l, l, |k, kp| {
        let m = (k + l - kp) % l;
        v0[m] + v1[m] * creal(half * (p[k] + p[kp])) - v4[m] * creal(half * p[k] * p[kp])
    })
}

fn is_homogeneous<T: Real>(field: &[MultiplierVector<T>]) -> bool {
    field.iter().all(|m| m == &field[0])
}

/// Quasi-free local Gibbs state `C = (𝟙 + e^{−K})⁻¹`.
pub fn gibbs_gaussian<T: Real>(lattice: &Lattice<T>, field: &[MultiplierVector<T>]) -> Result<GaussianState<T>> {
    let k = gibbs_exponent(lattice, field)?;
    let chat = if is_homogeneous(field) {
        // diagonal in momentum
        CMatrix::from_diagonal(&DVector::from_fn(lattice.sites(), |i, _| creal(k[(i, i)].re.logistic())))
    } else {
        let (w, u) = herm_eig(&k);
        recompose(&w, &u, |x| x.logistic())
    };
    Ok(GaussianState { lattice: lattice.clone(), chat, time: T::zero() })
}

/// Samples a macroscopic multiplier profile at the lattice sites.
pub fn sample_field<T: Real>(lattice: &Lattice<T>, f: impl Fn(T) -> MultiplierVector<T>) -> Vec<MultiplierVector<T>> {
    (0..lattice.sites()).map(|j| f(lattice.position(j))).collect()
}

impl<T: Real> GaussianState<T> {
    pub fn from_momentum(lattice: &Lattice<T>, chat: CMatrix<T>, time: T) -> Result<Self> {
        let l = lattice.sites();
        if chat.nrows() != l || chat.ncols() != l {
            return Err(Error::NotAState(format!("correlation matrix must be {l}×{l}")));
        }
        Ok(Self { lattice: lattice.clone(), chat, time })
    }

    pub fn from_position(lattice: &Lattice<T>, c: &CMatrix<T>, time: T) -> Result<Self> {
        let l = lattice.sites();
        if c.nrows() != l || c.ncols() != l {
            return Err(Error::NotAState(format!("correlation matrix must be {l}×{l}")));
        }
        Ok(Self { lattice: lattice.clone(), chat: lattice.to_momentum(c), time })
    }

    pub fn momentum_matrix(&self) -> &CMatrix<T> {
        &self.chat
    }

    pub fn position_matrix(&self) -> CMatrix<T> {
        self.lattice.to_position(&self.chat)
    }

    /// Checks hermiticity and `0 ≤ C ≤ 𝟙`.
    pub fn validate(&self) -> Result<()> {
        let defect = hermiticity_defect(&self.chat);
        if defect > T::of(1e-12) {
            return Err(Error::NotAState(format!("correlation matrix not Hermitian (defect {defect:e})")));
        }
        let (w, _) = herm_eig(&self.chat);
        let tol = T::of(1e-10);
        if w.min() < -tol || w.max() > T::one() + tol {
            return Err(Error::NotAState(format!("spectrum [{}, {}] outside [0, 1]", w.min(), w.max())));
        }
        Ok(())
    }

    pub fn spectrum(&self) -> DVector<T> {
        herm_eig(&self.chat).0
    }

    /// Total particle number `tr C`.
    pub fn particle_number(&self) -> T {
        self.chat.diagonal().iter().fold(T::zero(), |s, z| s + z.re)
    }

    /// Momentum-mode occupations `N_p = Ĉ(p, p)`.
    pub fn mode_occupations(&self) -> Vec<T> {
        self.chat.diagonal().iter().map(|z| z.re).collect()
    }

    /// Free evolution by microscopic time `t`: `C ↦ UCU†`, `U = e^{−ith₁}`,
    /// `h₁ = P²/2`.
    pub fn evolve(&self, t: T) -> Self {
        let p = self.lattice.momenta();
        let half = T::of(0.5);
        let phase: Vec<Cplx<T>> = p
            .iter()
            .map(|&pk| {
                let th = -half * pk * pk * t;
                cplx(th.cos(), th.sin())
            })
            .collect();
        let l = self.lattice.sites();
        let chat = CMatrix::from_fn(l, l, |k, kp| phase[k] * self.chat[(k, kp)] * phase[kp].conj());
        Self { lattice: self.lattice.clone(), chat, time: self.time + t }
    }

    /// Galilean boost by `m` momentum quanta `2π/(l·a)`: `C(x, y) ↦
    /// e^{is(x−y)}C(x, y)`, a cyclic shift of the momentum labels.
    pub fn boost(&self, m: i64) -> Self {
        let l = self.lattice.sites() as i64;
        let idx = |k: usize| ((k as i64 - m).rem_euclid(l)) as usize;
        let chat = CMatrix::from_fn(l as usize, l as usize, |k, kp| self.chat[(idx(k), idx(kp))]);
        Self { lattice: self.lattice.clone(), chat, time: self.time }
    }

    /// Smears the state with a real momentum multiplier: `Ĉ ↦ φ̂ Ĉ φ̂`.
    pub fn smeared(&self, phi_hat: &[T]) -> Self {
        let l = self.lattice.sites();
        let chat = CMatrix::from_fn(l, l, |k, kp| self.chat[(k, kp)] * creal(phi_hat[k] * phi_hat[kp]));
        Self { lattice: self.lattice.clone(), chat, time: self.time }
    }

    /// Local field with momentum symbol `σ(p, p′)`:
    /// `u(x) = (1/a)·Σ_{k,k′} F(x,k) σ(p_k, p_k′) Ĉ_{kk′} F(x,k′)*`.
    pub fn symbol_field(&self, sigma: impl Fn(T, T) -> T) -> Vec<T> {
        let l = self.lattice.sites();
        let p = self.lattice.momenta();
        let mut d = vec![creal(T::zero()); l];
        for (m, dm) in d.iter_mut().enumerate() {
            let mut acc = creal(T::zero());
            for k in 0..l {
                let kp = (k + l - m) % l;
                acc += self.chat[(k, kp)] * creal(sigma(p[k], p[kp]));
            }
            *dm = acc;
        }
        self.lattice.ifft(&mut d);
        let s = T::one() / (T::of_usize(l) * self.lattice.spacing());
        d.into_iter().map(|z| z.re * s).collect()
    }

    pub fn densities(&self) -> DensityFields<T> {
        let half = T::of(0.5);
        DensityFields {
            n: self.symbol_field(|_, _| T::one()),
            p: self.symbol_field(|a, b| half * (a + b)),
            h: self.symbol_field(|a, b| half * a * b),
        }
    }

    /// Currents satisfying `∂_t n = −∇w⁰`, `∂_t p = −∇w¹`, `∂_t h = −∇w⁴`
    /// exactly under [`evolve`](Self::evolve) (up to aliasing at the zone
    /// edge). With `phi_hat`, they are evaluated in the smeared state.
    pub fn currents(&self, phi_hat: Option<&[T]>) -> CurrentTensor<T> {
        if let Some(phi) = phi_hat {
            return self.smeared(phi).currents(None);
        }
        let half = T::of(0.5);
        let quarter = T::of(0.25);
        let w0 = self.symbol_field(|a, b| half * (a + b));
        // ¼(p + p′)² = pp′ + ¼(p − p′)²: the (PCP) diagonal minus ¼∇²n
        let w1 = self.symbol_field(|a, b| quarter * (a + b) * (a + b));
        let w4 = self.symbol_field(|a, b| quarter * (a + b) * a * b);
        CurrentTensor { w0, w1, w4 }
    }

    /// Totals of `(N, P, H)`.
    pub fn totals(&self) -> [T; 3] {
        let p = self.lattice.momenta();
        let half = T::of(0.5);
        let mut t = [T::zero(); 3];
        for (k, &pk) in p.iter().enumerate() {
            let nk = self.chat[(k, k)].re;
            t[0] += nk;
            t[1] += pk * nk;
            t[2] += half * pk * pk * nk;
        }
        t
    }
}
