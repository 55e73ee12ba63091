use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::euler::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    HydroCompare,
    EntropyTrack,
    Checks,
    EosTable,
    EulerRun,
    MicroRun,
    RateScan,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::HydroCompare => "hydro-compare",
            Self::EntropyTrack => "entropy-track",
            Self::Checks => "checks",
            Self::EosTable => "eos-table",
            Self::EulerRun => "euler-run",
            Self::MicroRun => "micro-run",
            Self::RateScan => "rate-scan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "kebab-case")]
pub enum EosSpec {
    Unbounded { dim: usize },
    Brillouin { dim: usize, nodes: usize, spacing: f64 },
}

impl Default for EosSpec {
    fn default() -> Self {
        EosSpec::Unbounded { dim: 1 }
    }
}

impl EosSpec {
    pub fn model(&self) -> EosModel<f64> {
        match *self {
            EosSpec::Unbounded { dim } => EosModel::unbounded(dim),
            EosSpec::Brillouin { dim, nodes, spacing } => EosModel::brillouin(dim, nodes, spacing),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    /// Explicit ranges; when absent they are fitted around the initial data.
    pub rho_range: Option<(f64, f64)>,
    /// Rectangle in internal energy; otherwise the table uses the excess over
    /// the zero-temperature floor.
    pub eint_range: Option<(f64, f64)>,
    pub excess_range: Option<(f64, f64)>,
    pub resolution: (usize, usize),
    /// Load a previously written table instead of tabulating.
    pub path: Option<PathBuf>,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self { rho_range: None, eint_range: None, excess_range: None, resolution: (64, 64), path: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EulerConfig {
    /// Number of cells; defaults to the microscopic size being compared.
    pub cells: Option<usize>,
    pub cfl: f64,
    pub t_final: f64,
    pub direct_eos: bool,
    pub table: TableConfig,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self { cells: None, cfl: crate::euler::DEFAULT_CFL, t_final: 0.05, direct_eos: false, table: TableConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffConfig {
    pub m: f64,
    pub c: f64,
}

impl Default for CutoffConfig {
    fn default() -> Self {
        Self { m: 2.0, c: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateConfig {
    pub beta: f64,
    pub alpha: f64,
    pub mu: f64,
    pub rho: (f64, f64, usize),
    pub e: (f64, f64, usize),
    pub eta: Option<f64>,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self { beta: 2.0, alpha: 0.0, mu: 0.5, rho: (0.1, 0.6, 11), e: (0.05, 0.6, 12), eta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    /// Microscopic sizes `L` (ε = 1/(L·a)).
    pub sizes: Vec<usize>,
    /// Coarse-graining blocks ℓ; empty means `ℓ = L / ell_ratio` for each `L`.
    pub windows: Vec<usize>,
    pub ell_ratio: usize,
    pub spacing: f64,
    /// Macroscopic times `T`.
    pub times: Vec<f64>,
    pub profile: Profile,
    pub eos: EosSpec,
    pub euler: EulerConfig,
    pub cutoff: CutoffConfig,
    pub rate: RateConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Overrides for named tolerances.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            sizes: vec![256, 512, 1024],
            windows: Vec::new(),
            ell_ratio: 16,
            spacing: 1.0,
            times: vec![0.0, 0.01, 0.02],
            profile: Profile::Wave { beta0: 5.0, beta1: 0.5, mu0: 0.3, mu1: 0.1, alpha0: 0.0, alpha1: 0.2 },
            eos: EosSpec::default(),
            euler: EulerConfig::default(),
            cutoff: CutoffConfig::default(),
            rate: RateConfig::default(),
            seed: 0,
            out_dir: PathBuf::from("out"),
            tolerances: BTreeMap::new(),
        }
    }
}

/// Default tolerances, all overridable under `[tolerances]`.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("virial", 1e-8),
    ("boost", 1e-8),
    ("currents", 1e-6),
    ("fock", 1e-8),
    ("inequality", 1e-10),
    ("equality", 1e-9),
    ("rate_nonneg", 1e-12),
    ("rate_zero", 1e-10),
    ("hessian_min", 0.0),
    ("continuity", 1e-6),
    ("partition", 1e-12),
    ("cutoff", 1e-9),
    ("conservation", 1e-13),
    ("order", 0.8),
    ("constant_state", 1e-8),
    ("production_zero", 1e-6),
    ("production_fd", 1e-4),
];

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        Ok((Self::from_toml_str(&text)?, text))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        if let Some(v) = self.tolerances.get(name) {
            return *v;
        }
        DEFAULT_TOLERANCES
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }

    /// All `(L, ℓ)` pairs in size order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &l in &self.sizes {
            if self.windows.is_empty() {
                out.push((l, l / self.ell_ratio.max(1)));
            } else {
                out.extend(self.windows.iter().map(|&w| (l, w)));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for name in self.tolerances.keys() {
            if !DEFAULT_TOLERANCES.iter().any(|(k, _)| k == name) {
                return bad(format!("unknown tolerance '{name}'"));
            }
        }
        if !(self.spacing > 0.0) {
            return bad(format!("lattice spacing must be positive, got {}", self.spacing));
        }
        if self.sizes.is_empty() {
            return bad("at least one microscopic size is required".into());
        }
        for (l, ell) in self.pairs() {
            if ell < 8 || 4 * ell > l || l % ell != 0 {
                return bad(format!("window ℓ = {ell} must divide L = {l} and satisfy 8 ≤ ℓ ≤ L/4"));
            }
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("macroscopic times must be finite and non-negative".into());
        }
        if !(self.euler.cfl > 0.0 && self.euler.cfl <= 1.0) {
            return bad(format!("CFL number {} outside (0, 1]", self.euler.cfl));
        }
        // the profile must stay in the one-phase region: positive β everywhere
        for j in 0..256 {
            let lam = self.profile.lambda_at::<f64>(j as f64 / 256.0);
            if !(lam.lam4 > 0.0) || !lam.lam0.is_finite() {
                return bad(format!("profile leaves the one-phase region near X = {}", j as f64 / 256.0));
            }
        }
        Ok(())
    }
}
