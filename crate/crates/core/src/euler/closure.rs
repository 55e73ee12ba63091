use crate::eos::{EosModel, EosTable};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rest-frame pressure law `P(ρ, e_int)` used by the solver.
pub trait Closure<T: Real> {
    fn pressure(&self, rho: T, eint: T) -> Result<T>;

    /// Lowest admissible internal energy at density `rho`.
    fn energy_floor(&self, rho: T) -> Result<T>;
}

/// Tabulated closure; lookups outside the table count as leaving the domain.
impl<T: Real> Closure<T> for EosTable<T> {
    fn pressure(&self, rho: T, eint: T) -> Result<T> {
        Ok(self.lookup(rho, eint)?.0)
    }

    fn energy_floor(&self, rho: T) -> Result<T> {
        let floor = EosModel { dim: self.dim, domain: self.domain, quad: Default::default() }.energy_floor(rho)?;
        Ok(floor.max(self.lowest_energy(rho)?))
    }
}

/// Direct evaluation through the Newton inversion (validation runs).
#[derive(Clone, Debug)]
pub struct DirectClosure<T>(pub EosModel<T>);

impl<T: Real> Closure<T> for DirectClosure<T> {
    fn pressure(&self, rho: T, eint: T) -> Result<T> {
        Ok(self.0.rest_state(rho, eint, None)?.p)
    }

    fn energy_floor(&self, rho: T) -> Result<T> {
        self.0.energy_floor(rho)
    }
}

/// Polytropic law `P = (γ − 1)e_int`; in one dimension the free Fermi gas is
/// exactly the case `γ = 3`.
#[derive(Clone, Copy, Debug)]
pub struct Polytropic<T>(pub T);

impl<T: Real> Closure<T> for Polytropic<T> {
    fn pressure(&self, rho: T, eint: T) -> Result<T> {
        if !(rho > T::zero()) {
            return Err(Error::VacuumCell(rho.to_f64_lossy()));
        }
        Ok((self.0 - T::one()) * eint)
    }

    fn energy_floor(&self, _rho: T) -> Result<T> {
        Ok(T::zero())
    }
}
