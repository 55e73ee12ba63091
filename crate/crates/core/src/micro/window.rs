use crate::error::{Error, Result};
use crate::scalar::Real;

fn bump_tail<T: Real>(x: T) -> T {
    if x > T::zero() {
        (-T::one() / x).exp()
    } else {
        T::zero()
    }
}

/// C^∞ step: 1 for `s ≤ 0`, 0 for `s ≥ 1`, flat to all orders at both ends.
pub fn smooth_step<T: Real>(s: T) -> T {
    let a = bump_tail(T::one() - s);
    let b = bump_tail(s);
    a / (a + b)
}

/// Smooth window `χ` with `Σ_j χ²(t + j) = 1`, supported in
/// `|t| ≤ ½ + η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window<T> {
    pub eta: T,
}

impl<T: Real> Window<T> {
    pub fn new(eta: T) -> Result<Self> {
        if !(eta > T::zero() && eta <= T::of(0.5)) {
            return Err(Error::BadWindow(format!("transition width η = {eta} must lie in (0, ½]")));
        }
        Ok(Self { eta })
    }

    /// Window matched to a block of `ell` sites, `η = ℓ^{-1/2}`.
    pub fn for_block(ell: usize) -> Result<Self> {
        Self::new(T::one() / T::of_usize(ell).sqrt())
    }

    fn f(&self, s: T) -> T {
        smooth_step(s) * T::of(std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn chi(&self, t: T) -> T {
        let half = T::of(0.5);
        let a = t.abs();
        if a <= half {
            let f = self.f((half - a) / self.eta);
            (T::one() - f * f).sqrt()
        } else {
            self.f((a - half) / self.eta)
        }
    }

    pub fn chi_sq(&self, t: T) -> T {
        let c = self.chi(t);
        c * c
    }

    pub fn support(&self) -> T {
        T::of(0.5) + self.eta
    }
}

/// Coarse-grained field `(1/ℓ)·Σ_y χ²((y − x)/ℓ)·u(y)` on the periodic
/// lattice, with `η = ℓ^{-1/2}`. Requires `8 ≤ ℓ ≤ L/4` and `ℓ | L`.
pub fn coarse_grain<T: Real>(u: &[T], ell: usize) -> Result<Vec<T>> {
    let l = u.len();
    if ell < 8 || 4 * ell > l {
        return Err(Error::BadWindow(format!("block size {ell} outside [8, L/4] for L = {l}")));
    }
    if l % ell != 0 {
        return Err(Error::BadWindow(format!("block size {ell} does not divide L = {l}")));
    }
    let w = Window::<T>::for_block(ell)?;
    let el = T::of_usize(ell);
    let reach = (w.support() * el).ceil().to_f64_lossy() as i64;
    let weights: Vec<T> = (-reach..=reach).map(|r| w.chi_sq(T::of(r as f64) / el) / el).collect();
    let li = l as i64;
    Ok((0..li)
        .map(|x| {
            weights
                .iter()
                .enumerate()
                .fold(T::zero(), |s, (i, &wt)| s + wt * u[(x + i as i64 - reach).rem_euclid(li) as usize])
        })
        .collect())
}
