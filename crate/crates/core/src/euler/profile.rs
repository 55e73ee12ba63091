use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eos::MultiplierVector;
use crate::scalar::Real;

/// Named analytic multiplier profiles on the unit torus (1D).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// Homogeneous state.
    Constant { beta: f64, alpha: f64, mu: f64 },
    /// `β = β₀ + β₁cos 2πX`, `μ = μ₀ + μ₁sin 2πX`, `α = α₀ + α₁cos 2πX`.
    Wave { beta0: f64, beta1: f64, mu0: f64, mu1: f64, alpha0: f64, alpha1: f64 },
    /// Chemical-potential bump at rest centred at `X = ½`:
    /// `μ = μ₀ + A·exp((cos 2π(X − ½) − 1)/w²)`.
    Bump { beta: f64, mu0: f64, amplitude: f64, width: f64, alpha: f64 },
}

impl Profile {
    pub fn lambda_at<T: Real>(&self, x: T) -> MultiplierVector<T> {
        let x = x.to_f64_lossy();
        let t = 2.0 * PI * x;
        let (beta, alpha, mu) = match *self {
            Profile::Constant { beta, alpha, mu } => (beta, alpha, mu),
            Profile::Wave { beta0, beta1, mu0, mu1, alpha0, alpha1 } => {
                (beta0 + beta1 * t.cos(), alpha0 + alpha1 * t.cos(), mu0 + mu1 * t.sin())
            }
            Profile::Bump { beta, mu0, amplitude, width, alpha } => {
                let s = ((2.0 * PI * (x - 0.5)).cos() - 1.0) / (width * width);
                (beta, alpha, mu0 + amplitude * s.exp())
            }
        };
        MultiplierVector::from_physical(1, T::of(beta), &[T::of(alpha)], T::of(mu))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Constant { .. })
    }
}
