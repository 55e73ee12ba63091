//! Scalar abstraction shared by every numerical module.
//!
//! All core math is written against [`Real`], which is satisfied by `f32` and
//! `f64`. Tolerances in the test-suite are calibrated for `f64`; the `f32`
//! instantiation is supported for throughput experiments.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar usable throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the underlying type.
    fn machine_eps() -> Self;

    /// Smallest positive normal value.
    fn tiny() -> Self;

    /// Numerically stable `ln(1 + e^x)`.
    #[inline]
    fn softplus(self) -> Self {
        if self > Self::zero() {
            self + (-self).exp().ln_1p()
        } else {
            self.exp().ln_1p()
        }
    }

    /// Logistic function `1 / (1 + e^{-x})`.
    #[inline]
    fn logistic(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }
}

impl Real for f32 {
    fn machine_eps() -> Self {
        f32::EPSILON
    }

    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn machine_eps() -> Self {
        f64::EPSILON
    }

    fn tiny() -> Self {
        f64::MIN_POSITIVE
    }
}

/// Complex scalar over a [`Real`].
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

/// Modulus `|z|`.
#[inline]
pub fn cabs<T: Real>(z: Cplx<T>) -> T {
    nalgebra::ComplexField::modulus(z)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &x in &[-1.0f64, 0.0, 0.5, 12.0] {
            let naive = (1.0 + x.exp()).ln();
            assert!((x.softplus() - naive).abs() < 1e-14 * naive.max(1e-300));
        }
        assert!(((-30.0f64).softplus() / (-30.0f64).exp() - 1.0).abs() < 1e-12);
        assert!((800.0f64).softplus().is_finite());
        assert_eq!((-800.0f64).softplus(), 0.0);
    }

    #[test]
    fn logistic_is_symmetric() {
        for &x in &[-40.0f64, -2.0, 0.0, 3.0] {
            assert!((x.logistic() + (-x).logistic() - 1.0).abs() < 1e-15);
        }
        assert_eq!(0.0f32.logistic(), 0.5);
    }
}
