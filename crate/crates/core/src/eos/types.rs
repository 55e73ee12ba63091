use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lagrange multipliers `(βμ, βα, β)` of a (local) Gibbs state.
///
/// Only the first `dim` entries of `lam_mom` are meaningful; the rest are kept
/// at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplierVector<T> {
    pub lam0: T,
    pub lam_mom: [T; 3],
    pub lam4: T,
    pub dim: usize,
}

impl<T: Real> MultiplierVector<T> {
    pub fn new(dim: usize, lam0: T, lam_mom: &[T], lam4: T) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        let mut m = [T::zero(); 3];
        m[..dim].copy_from_slice(&lam_mom[..dim]);
        Self { lam0, lam_mom: m, lam4, dim }
    }

    /// Builds the multipliers from inverse temperature, drift velocity and
    /// chemical potential.
    pub fn from_physical(dim: usize, beta: T, alpha: &[T], mu: T) -> Self {
        let mut m = [T::zero(); 3];
        for j in 0..dim {
            m[j] = beta * alpha[j];
        }
        Self { lam0: beta * mu, lam_mom: m, lam4: beta, dim }
    }

    pub fn beta(&self) -> T {
        self.lam4
    }

    pub fn mu(&self) -> T {
        self.lam0 / self.lam4
    }

    pub fn alpha(&self) -> [T; 3] {
        self.lam_mom.map(|x| x / self.lam4)
    }

    pub fn alpha_sq(&self) -> T {
        self.alpha()[..self.dim].iter().fold(T::zero(), |a, &x| a + x * x)
    }

    pub fn lam_mom_norm(&self) -> T {
        self.lam_mom[..self.dim].iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
    }

    /// Signed pairing `λ⁰q⁰ + Σλʲqʲ − λ⁴q⁴`.
    pub fn pair(&self, q: &ConservedVector<T>) -> T {
        let mut s = self.lam0 * q.rho - self.lam4 * q.e;
        for j in 0..self.dim {
            s += self.lam_mom[j] * q.mom[j];
        }
        s
    }

    pub fn len(&self) -> usize {
        self.dim + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_dvector(&self) -> DVector<T> {
        let mut v = DVector::zeros(self.dim + 2);
        v[0] = self.lam0;
        for j in 0..self.dim {
            v[j + 1] = self.lam_mom[j];
        }
        v[self.dim + 1] = self.lam4;
        v
    }

    pub fn from_dvector(dim: usize, v: &DVector<T>) -> Self {
        let mut m = [T::zero(); 3];
        m[..dim].copy_from_slice(&v.as_slice()[1..=dim]);
        Self { lam0: v[0], lam_mom: m, lam4: v[dim + 1], dim }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.lam0.is_finite() && self.lam4.is_finite() && self.lam_mom.iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Invalid(format!("non-finite multipliers {self:?}")));
        }
        if self.lam4 <= T::zero() {
            return Err(Error::NonpositiveBeta(self.lam4.to_f64_lossy()));
        }
        Ok(())
    }
}

/// Conserved densities `(ρ, momentum density, energy density)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservedVector<T> {
    pub rho: T,
    pub mom: [T; 3],
    pub e: T,
    pub dim: usize,
}

impl<T: Real> ConservedVector<T> {
    pub fn new(dim: usize, rho: T, mom: &[T], e: T) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        let mut m = [T::zero(); 3];
        m[..dim].copy_from_slice(&mom[..dim]);
        Self { rho, mom: m, e, dim }
    }

    pub fn mom_sq(&self) -> T {
        self.mom[..self.dim].iter().fold(T::zero(), |a, &x| a + x * x)
    }

    pub fn velocity(&self) -> [T; 3] {
        self.mom.map(|m| m / self.rho)
    }

    /// Energy density in the local rest frame, `e − |q|²/(2ρ)`.
    pub fn internal_energy(&self) -> T {
        self.e - self.mom_sq() / (T::of(2.0) * self.rho)
    }

    /// Galilean boost by velocity `s`.
    pub fn boosted(&self, s: &[T]) -> Self {
        let mut out = *self;
        let mut s_sq = T::zero();
        let mut m_dot_s = T::zero();
        for j in 0..self.dim {
            out.mom[j] = self.mom[j] + self.rho * s[j];
            s_sq += s[j] * s[j];
            m_dot_s += self.mom[j] * s[j];
        }
        out.e = self.e + m_dot_s + self.rho * s_sq * T::of(0.5);
        out
    }

    pub fn to_dvector(&self) -> DVector<T> {
        let mut v = DVector::zeros(self.dim + 2);
        v[0] = self.rho;
        for j in 0..self.dim {
            v[j + 1] = self.mom[j];
        }
        v[self.dim + 1] = self.e;
        v
    }

    pub fn from_dvector(dim: usize, v: &DVector<T>) -> Self {
        let mut m = [T::zero(); 3];
        m[..dim].copy_from_slice(&v.as_slice()[1..=dim]);
        Self { rho: v[0], mom: m, e: v[dim + 1], dim }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.e.is_finite() && self.mom.iter().all(|x| x.is_finite())
    }
}

/// Multipliers sampled on a uniform periodic grid of `[0, 1)`.
pub type MultiplierField<T> = Vec<MultiplierVector<T>>;

/// Conserved densities sampled on a uniform periodic grid of `[0, 1)`.
pub type ConservedField<T> = Vec<ConservedVector<T>>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_carries_the_energy_sign() {
        let lam = MultiplierVector::from_physical(1, 2.0f64, &[0.5], 0.3);
        let q = ConservedVector::new(1, 1.0, &[0.2], 4.0);
        assert!((lam.pair(&q) - (0.6 + 1.0 * 0.2 - 8.0)).abs() < 1e-15);
        assert!((lam.mu() - 0.3).abs() < 1e-15);
        assert!((lam.alpha()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boost_preserves_internal_energy() {
        let q = ConservedVector::new(3, 0.7f64, &[0.1, -0.2, 0.05], 2.0);
        let b = q.boosted(&[0.3, 0.4, -1.0]);
        assert!((q.internal_energy() - b.internal_energy()).abs() < 1e-14);
        let back = b.boosted(&[-0.3, -0.4, 1.0]);
        assert!((back.e - q.e).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_nonpositive_beta() {
        let lam = MultiplierVector::new(1, 0.0, &[0.0], 0.0f64);
        assert!(matches!(lam.validate(), Err(Error::NonpositiveBeta(_))));
        let lam = MultiplierVector::new(1, f64::NAN, &[0.0], 1.0);
        assert!(lam.validate().is_err());
    }

    #[test]
    fn dvector_roundtrip() {
        let lam = MultiplierVector::new(2, 0.1, &[0.2, 0.3], 1.5f64);
        assert_eq!(MultiplierVector::from_dvector(2, &lam.to_dvector()), lam);
    }
}
