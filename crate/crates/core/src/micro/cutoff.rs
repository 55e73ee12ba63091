use std::f64::consts::PI;

use super::lattice::Lattice;
use super::window::smooth_step;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::Real;

/// High-momentum cutoff filter `φ_M = (g_λ ∗ g_λ)·h_M`, `λ = e^{M²}`, sampled
/// on the lattice and normalized to unit sum.
#[derive(Clone, Debug)]
pub struct MomentumCutoff<T> {
    pub m: T,
    /// Support radius `λ` of `g_λ ∗ g_λ`, in physical length.
    pub radius: T,
    /// Site values in FFT order (site `j` at signed distance `x_j`).
    pub phi: Vec<T>,
    /// Lattice Fourier multiplier `φ̂(p_k) = Σ_j φ_j e^{−ip_k x_j}` after the
    /// contraction rescaling.
    pub phi_hat: Vec<T>,
    /// Factor applied so that `max |φ̂| ≤ 1`.
    pub scale: T,
}

/// Bump `exp(−1/(1 − 4x²))` on `|x| < ½`, unnormalized.
fn bump<T: Real>(x: T) -> T {
    let s = T::one() - T::of(4.0) * x * x;
    if s > T::zero() {
        (-T::one() / s).exp()
    } else {
        T::zero()
    }
}

/// Flat smooth step in momentum: 1 on `|p| ≤ M`, 0 on `|p| ≥ 2M`.
pub fn cutoff_profile<T: Real>(p: T, m: T) -> T {
    smooth_step((p.abs() - m) / m)
}

pub fn momentum_cutoff<T: Real>(lattice: &Lattice<T>, m: T) -> Result<MomentumCutoff<T>> {
    if !(m >= T::one()) {
        return Err(Error::Invalid(format!("cutoff scale M = {m} must be at least 1")));
    }
    let radius = (m * m).exp();
    let l = lattice.sites();
    let a = lattice.spacing();
    let half_len = T::of_usize(l) * a * T::of(0.5);
    if !(radius < half_len) {
        return Err(Error::CutoffTooLarge { m: m.to_f64_lossy(), radius: radius.to_f64_lossy() });
    }
    let spec = QuadratureSpec { rel_tol: T::of(1e-12), max_segments: 4000 };
    let half = T::of(0.5);
    let norm = integrate(|x, o| o[0] = bump(x), -half, half, 1, &spec)?[0];
    // (g ∗ g)(y) for the unit-normalized bump, |y| < 1
    let self_conv = |y: T| -> Result<T> {
        let lo = (-half).max(y - half);
        let hi = half.min(y + half);
        if hi <= lo {
            return Ok(T::zero());
        }
        Ok(integrate(|z, o| o[0] = bump(z) * bump(y - z), lo, hi, 1, &spec)?[0] / (norm * norm))
    };
    // h_M(x) = (1/π)∫₀^{2M} ĥ(p) cos(px) dp
    let h_m = |x: T| -> Result<T> {
        let v = integrate(|p, o| o[0] = cutoff_profile(p, m) * (p * x).cos(), T::zero(), T::of(2.0) * m, 1, &spec)?[0];
        Ok(v / T::of(PI))
    };
    let mut phi = vec![T::zero(); l];
    for (j, v) in phi.iter_mut().enumerate() {
        let x = if j <= l / 2 { T::of_usize(j) * a } else { -T::of_usize(l - j) * a };
        if x.abs() < radius {
            *v = self_conv(x / radius)? / radius * h_m(x)?;
        }
    }
    let total = phi.iter().fold(T::zero(), |s, &x| s + x);
    phi.iter_mut().for_each(|x| *x /= total);
    // φ is even, so its transform is real
    let coeffs = lattice.coefficients(&phi);
    let mut phi_hat: Vec<T> = coeffs.iter().map(|z| z.re * T::of_usize(l)).collect();
    let peak = phi_hat.iter().fold(T::zero(), |s, &x| s.max(x.abs()));
    let scale = if peak > T::one() { T::one() / peak } else { T::one() };
    phi_hat.iter_mut().for_each(|x| *x *= scale);
    Ok(MomentumCutoff { m, radius, phi, phi_hat, scale })
}
