use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{creal, Cplx, Real};

/// Periodic 1D lattice of `l` sites with spacing `a`; macroscopic coordinate
/// `X = ε·x` with `ε = 1/(l·a)`.
#[derive(Clone)]
pub struct Lattice<T: Real> {
    l: usize,
    spacing: T,
    momenta: Vec<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Lattice<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("l", &self.l).field("spacing", &self.spacing).finish()
    }
}

impl<T: Real> PartialEq for Lattice<T> {
    fn eq(&self, other: &Self) -> bool {
        self.l == other.l && self.spacing == other.spacing
    }
}

impl<T: Real> Lattice<T> {
    pub fn new(l: usize, spacing: T) -> Result<Self> {
        if l < 2 {
            return Err(Error::Invalid(format!("lattice needs at least 2 sites, got {l}")));
        }
        if !(spacing > T::zero()) {
            return Err(Error::Invalid(format!("lattice spacing must be positive, got {spacing}")));
        }
        let mut planner = FftPlanner::new();
        let dp = T::of(2.0 * PI) / (T::of_usize(l) * spacing);
        // FFT order; the Nyquist mode k = l/2 sits at +π/a
        let momenta = (0..l)
            .map(|k| if k <= l / 2 { T::of_usize(k) * dp } else { -T::of_usize(l - k) * dp })
            .collect();
        Ok(Self { l, spacing, momenta, fwd: planner.plan_fft_forward(l), inv: planner.plan_fft_inverse(l) })
    }

    pub fn unit(l: usize) -> Result<Self> {
        Self::new(l, T::one())
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Scaling parameter `ε = 1/(l·a)`.
    pub fn epsilon(&self) -> T {
        T::one() / (T::of_usize(self.l) * self.spacing)
    }

    /// Macroscopic coordinate of site `j`.
    pub fn position(&self, j: usize) -> T {
        T::of_usize(j) / T::of_usize(self.l)
    }

    /// Momenta `p_k` in FFT order.
    pub fn momenta(&self) -> &[T] {
        &self.momenta
    }

    pub fn nyquist(&self) -> Option<usize> {
        (self.l % 2 == 0).then_some(self.l / 2)
    }

    /// Unnormalized forward transform `Σ_j v_j e^{−2πijk/l}`.
    pub fn fft(&self, v: &mut [Cplx<T>]) {
        self.fwd.process(v);
    }

    /// Unnormalized inverse transform `Σ_k v_k e^{+2πijk/l}`.
    pub fn ifft(&self, v: &mut [Cplx<T>]) {
        self.inv.process(v);
    }

    /// `(1/l)·fft(v)` of a real field: Fourier coefficients `v̂(m)`.
    pub fn coefficients(&self, v: &[T]) -> Vec<Cplx<T>> {
        let mut c: Vec<Cplx<T>> = v.iter().map(|&x| creal(x)).collect();
        self.fft(&mut c);
        let s = T::one() / T::of_usize(self.l);
        c.iter_mut().for_each(|z| *z *= s);
        c
    }

    fn apply_multiplier(&self, u: &[T], mult: impl Fn(usize, T) -> Cplx<T>) -> Vec<T> {
        let mut c = self.coefficients(u);
        for (k, z) in c.iter_mut().enumerate() {
            *z *= mult(k, self.momenta[k]);
        }
        self.ifft(&mut c);
        c.into_iter().map(|z| z.re).collect()
    }

    /// Spectral derivative `∂_x` in physical units (Nyquist mode dropped).
    pub fn gradient(&self, u: &[T]) -> Vec<T> {
        let nyq = self.nyquist();
        self.apply_multiplier(u, |k, p| if Some(k) == nyq { creal(T::zero()) } else { Cplx::new(T::zero(), p) })
    }

    /// Spectral second derivative.
    pub fn laplacian(&self, u: &[T]) -> Vec<T> {
        self.apply_multiplier(u, |_, p| creal(-p * p))
    }

    /// `F†·A·F` with `F(x, k) = e^{i p_k x}/√l`.
    pub fn to_momentum(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let half = self.transform_columns(a, true);
        self.transform_columns(&half.adjoint(), true).adjoint()
    }

    /// `F·Â·F†`.
    pub fn to_position(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let half = self.transform_columns(a, false);
        self.transform_columns(&half.adjoint(), false).adjoint()
    }

    fn transform_columns(&self, a: &CMatrix<T>, forward: bool) -> CMatrix<T> {
        let mut out = a.clone();
        let s = creal(T::one() / T::of_usize(self.l).sqrt());
        let n = out.nrows();
        for buf in out.as_mut_slice().chunks_mut(n) {
            if forward {
                self.fft(buf);
            } else {
                self.ifft(buf);
            }
            buf.iter_mut().for_each(|z| *z *= s);
        }
        out
    }
}
