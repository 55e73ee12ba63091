use crate::eos::{ConservedVector, EosModel, EosTable, MultiplierVector};
use crate::error::{Error, Result};
use crate::euler::{self, periodic_interpolate, Closure, DirectClosure, MacroGrid};
use crate::micro::{gibbs_gaussian, GaussianState, Lattice};

use super::config::{ExperimentConfig, TableConfig};

type Conserved = ConservedVector<f64>;
type Multipliers = MultiplierVector<f64>;

/// Closure selected by the configuration (`--direct-eos` switches to direct).
#[derive(Clone, Debug)]
pub enum ClosureChoice {
    Table(EosTable<f64>),
    Direct(DirectClosure<f64>),
}

impl Closure<f64> for ClosureChoice {
    fn pressure(&self, rho: f64, eint: f64) -> Result<f64> {
        match self {
            Self::Table(t) => t.pressure(rho, eint),
            Self::Direct(d) => d.pressure(rho, eint),
        }
    }

    fn energy_floor(&self, rho: f64) -> Result<f64> {
        match self {
            Self::Table(t) => t.energy_floor(rho),
            Self::Direct(d) => d.energy_floor(rho),
        }
    }
}

/// Builds the table described by `tc`, fitting ranges around `q` where the
/// configuration leaves them open. Returns the raw file bytes when loaded.
pub fn build_table(model: &EosModel<f64>, tc: &TableConfig, q: &[Conserved]) -> Result<(EosTable<f64>, Option<Vec<u8>>)> {
    if let Some(path) = &tc.path {
        let bytes = std::fs::read(path)?;
        let table = EosTable::read_from(bytes.as_slice())?;
        if table.dim != model.dim || table.domain != model.domain {
            return Err(Error::Config(format!("table {} was built for a different EOS", path.display())));
        }
        return Ok((table, Some(bytes)));
    }
    let rho_fit = || -> Result<(f64, f64)> {
        let lo = q.iter().map(|c| c.rho).fold(f64::INFINITY, f64::min);
        let hi = q.iter().map(|c| c.rho).fold(0.0, f64::max);
        if q.is_empty() {
            return Err(Error::Config("table ranges needed without initial data".into()));
        }
        Ok((0.75 * lo, 1.25 * hi))
    };
    let rho_range = match tc.rho_range {
        Some(r) => r,
        None => rho_fit()?,
    };
    if let Some(er) = tc.eint_range {
        return Ok((model.tabulate(rho_range, er, tc.resolution)?, None));
    }
    let excess = match tc.excess_range {
        Some(r) => r,
        None => {
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for c in q {
                let x = c.internal_energy() - model.energy_floor(c.rho)?;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if q.is_empty() {
                return Err(Error::Config("table ranges needed without initial data".into()));
            }
            (0.5 * lo, 2.0 * hi)
        }
    };
    Ok((model.tabulate_excess(rho_range, excess, tc.resolution)?, None))
}

pub fn build_closure(cfg: &ExperimentConfig, q: &[Conserved]) -> Result<(ClosureChoice, Option<Vec<u8>>)> {
    let model = cfg.eos.model();
    if cfg.euler.direct_eos {
        return Ok((ClosureChoice::Direct(DirectClosure(model)), None));
    }
    let (t, bytes) = build_table(&model, &cfg.euler.table, q)?;
    Ok((ClosureChoice::Table(t), bytes))
}

/// Cell-centre samples resampled onto the lattice sites `X = j/L`.
pub fn to_sites(lat: &Lattice<f64>, values: &[f64]) -> Vec<f64> {
    let xs: Vec<f64> = (0..lat.sites()).map(|j| lat.position(j)).collect();
    periodic_interpolate(values, &xs)
}

pub fn lambda_to_sites(lat: &Lattice<f64>, lam: &[Multipliers]) -> Vec<Multipliers> {
    let l0 = to_sites(lat, &lam.iter().map(|m| m.lam0).collect::<Vec<_>>());
    let l1 = to_sites(lat, &lam.iter().map(|m| m.lam_mom[0]).collect::<Vec<_>>());
    let l4 = to_sites(lat, &lam.iter().map(|m| m.lam4).collect::<Vec<_>>());
    (0..lat.sites()).map(|j| MultiplierVector::new(1, l0[j], &[l1[j]], l4[j])).collect()
}

/// `(ρ, q¹, q⁴)` of a cell field resampled onto the lattice sites.
pub fn conserved_to_sites(lat: &Lattice<f64>, q: &[Conserved]) -> [Vec<f64>; 3] {
    [
        to_sites(lat, &q.iter().map(|c| c.rho).collect::<Vec<_>>()),
        to_sites(lat, &q.iter().map(|c| c.mom[0]).collect::<Vec<_>>()),
        to_sites(lat, &q.iter().map(|c| c.e).collect::<Vec<_>>()),
    ]
}

/// Macroscopic initial data together with the microscopic local Gibbs state
/// built from it.
pub struct Coupling {
    pub lattice: Lattice<f64>,
    pub grid: MacroGrid,
    pub model: EosModel<f64>,
    pub q0: Vec<Conserved>,
    pub gamma0: GaussianState<f64>,
}

impl Coupling {
    pub fn new(cfg: &ExperimentConfig, size: usize) -> Result<Self> {
        let lattice = Lattice::new(size, cfg.spacing)?;
        let grid = MacroGrid::new(cfg.euler.cells.unwrap_or(size))?;
        let model = cfg.eos.model();
        if model.dim != 1 {
            return Err(Error::Config("the microscopic coupling is one-dimensional".into()));
        }
        let q0 = euler::initial_field(&cfg.profile, grid, &model)?;
        let gamma0 = gibbs_gaussian(&lattice, &self::local_gibbs_field(&lattice, &q0, &model)?)?;
        Ok(Self { lattice, grid, model, q0, gamma0 })
    }

    pub fn epsilon(&self) -> f64 {
        self.lattice.epsilon()
    }

    /// Local Gibbs state of a macroscopic cell field.
    pub fn local_gibbs(&self, q: &[Conserved]) -> Result<GaussianState<f64>> {
        gibbs_gaussian(&self.lattice, &local_gibbs_field(&self.lattice, q, &self.model)?)
    }
}

pub fn local_gibbs_field(lat: &Lattice<f64>, q: &[Conserved], model: &EosModel<f64>) -> Result<Vec<Multipliers>> {
    Ok(lambda_to_sites(lat, &euler::lambda_field_of(q, model)?))
}
