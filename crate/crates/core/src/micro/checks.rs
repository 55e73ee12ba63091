use super::cutoff::momentum_cutoff;
use super::state::GaussianState;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `ε Σ_p e^{cp²} N_p`. Reports divergence when the summand grows toward the
/// zone edge over the outer half of the zone, i.e. when the momentum tail of
/// the state is not Gaussian enough for this `c`.
pub fn maxwellian_moment<T: Real>(state: &GaussianState<T>, c: T) -> Result<T> {
    let lat = &state.lattice;
    let p = lat.momenta();
    let n = state.mode_occupations();
    let edge = p.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    let summand = |k: usize| (c * p[k] * p[k]).exp() * n[k].max(T::zero());
    for sign in [T::one(), -T::one()] {
        // summands in the outer half on one side, ordered by |p|
        let mut tail: Vec<(T, T)> = (0..p.len())
            .filter(|&k| p[k] * sign > edge * T::of(0.5))
            .map(|k| (p[k].abs(), summand(k)))
            .collect();
        tail.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if tail.len() >= 2 && tail.windows(2).all(|w| w[1].1 > w[0].1) {
            return Err(Error::MomentDiverges { c: c.to_f64_lossy() });
        }
    }
    Ok(lat.epsilon() * (0..p.len()).fold(T::zero(), |s, k| s + summand(k)))
}

/// Expectation-level check of the cutoff current bound for one state.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentBoundSample<T> {
    /// `|Σ_x w_M^μ|` for μ = 0, 1, 4.
    pub currents: [T; 3],
    /// `⟨H⟩ + ⟨N⟩`.
    pub budget: T,
    /// Smallest `C` with `|⟨w_M^μ⟩| ≤ C·M·(⟨H⟩ + ⟨N⟩)` for every component.
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport<T> {
    pub moment: Result<T, String>,
    pub cutoff_scale: T,
    pub current_bound: CurrentBoundSample<T>,
}

pub fn current_bound_sample<T: Real>(state: &GaussianState<T>, m: T) -> Result<CurrentBoundSample<T>> {
    let cut = momentum_cutoff(&state.lattice, m)?;
    let w = state.currents(Some(&cut.phi_hat));
    let a = state.lattice.spacing();
    let sum = |f: &[T]| f.iter().fold(T::zero(), |s, &x| s + x).abs() * a;
    let currents = [sum(&w.w0), sum(&w.w1), sum(&w.w4)];
    let [n, _, h] = state.totals();
    let budget = h + n;
    let ratio = currents.iter().fold(T::zero(), |r, &c| r.max(c / (m * budget)));
    Ok(CurrentBoundSample { currents, budget, ratio })
}

/// Smallest constant that makes the current bound hold on every sample.
pub fn fitted_current_constant<T: Real>(samples: &[CurrentBoundSample<T>]) -> T {
    samples.iter().fold(T::zero(), |c, s| c.max(s.ratio))
}

pub fn assumption_checks<T: Real>(state: &GaussianState<T>, c: T, m: T) -> Result<AssumptionReport<T>> {
    let moment = match maxwellian_moment(state, c) {
        Ok(v) => Ok(v),
        Err(e @ Error::MomentDiverges { .. }) => Err(e.to_string()),
        Err(e) => return Err(e),
    };
    let cut = momentum_cutoff(&state.lattice, m)?;
    Ok(AssumptionReport { moment, cutoff_scale: cut.scale, current_bound: current_bound_sample(state, m)? })
}
