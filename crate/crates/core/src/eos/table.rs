use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::model::{EosModel, MomentumDomain, RestPressure};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"FEOSTBL\0";
const VERSION: u32 = 1;

/// Second table coordinate: the internal energy itself, or its excess over
/// the zero-temperature floor (which keeps degenerate states inside a
/// rectangle, since the floor rises like `ρ^{1+2/d}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyAxis {
    Internal,
    Excess,
}

/// Tabulated rest-frame closure over a rectangle in `(ρ, y)`, with `y` given by
/// [`EnergyAxis`], interpolated with bicubic Hermite patches.
#[derive(Clone, Debug, PartialEq)]
pub struct EosTable<T> {
    pub dim: usize,
    pub domain: MomentumDomain<T>,
    pub axis: EnergyAxis,
    pub rho_range: (T, T),
    /// Range of the energy coordinate `y`.
    pub eint_range: (T, T),
    pub n_rho: usize,
    pub n_e: usize,
    /// Row-major (`i_rho * n_e + i_e`) grids of `P`, `∂P/∂ρ|_y`, `∂P/∂y`,
    /// `∂²P/∂ρ∂y`.
    pub p: Vec<T>,
    pub p_rho: Vec<T>,
    pub p_e: Vec<T>,
    pub p_rho_e: Vec<T>,
}

fn hermite<T: Real>(t: T) -> ([T; 4], [T; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let two = T::of(2.0);
    let three = T::of(3.0);
    let six = T::of(6.0);
    let four = T::of(4.0);
    (
        [two * t3 - three * t2 + T::one(), t3 - two * t2 + t, -two * t3 + three * t2, t3 - t2],
        [six * t2 - six * t, three * t2 - four * t + T::one(), -six * t2 + six * t, three * t2 - two * t],
    )
}

impl<T: Real> EosTable<T> {
    pub fn rho_node(&self, i: usize) -> T {
        let (a, b) = self.rho_range;
        a + (b - a) * T::of_usize(i) / T::of_usize(self.n_rho - 1)
    }

    pub fn eint_node(&self, j: usize) -> T {
        let (a, b) = self.eint_range;
        a + (b - a) * T::of_usize(j) / T::of_usize(self.n_e - 1)
    }

    fn model(&self) -> EosModel<T> {
        EosModel { dim: self.dim, domain: self.domain, quad: Default::default() }
    }

    /// Zero-temperature floor and its slope `(1 + 2/d)·floor/ρ`.
    pub fn floor_and_slope(&self, rho: T) -> Result<(T, T)> {
        let f = self.model().energy_floor(rho)?;
        Ok((f, (T::one() + T::of(2.0) / T::of_usize(self.dim)) * f / rho))
    }

    /// Internal energy of node `(i, j)`.
    pub fn node_energy(&self, i: usize, j: usize) -> Result<T> {
        let y = self.eint_node(j);
        Ok(match self.axis {
            EnergyAxis::Internal => y,
            EnergyAxis::Excess => self.floor_and_slope(self.rho_node(i))?.0 + y,
        })
    }

    fn coordinate(&self, rho: T, eint: T) -> Option<(T, T)> {
        match self.axis {
            EnergyAxis::Internal => Some((eint, T::zero())),
            EnergyAxis::Excess => self.floor_and_slope(rho).ok().map(|(f, s)| (eint - f, s)),
        }
    }

    pub fn contains(&self, rho: T, eint: T) -> bool {
        let in_rho = rho >= self.rho_range.0 && rho <= self.rho_range.1;
        in_rho && self.coordinate(rho, eint).is_some_and(|(y, _)| y >= self.eint_range.0 && y <= self.eint_range.1)
    }

    /// Lowest internal energy covered by the table at density `rho`.
    pub fn lowest_energy(&self, rho: T) -> Result<T> {
        Ok(match self.axis {
            EnergyAxis::Internal => self.eint_range.0,
            EnergyAxis::Excess => self.floor_and_slope(rho)?.0 + self.eint_range.0,
        })
    }

    /// Interpolated `(P, ∂P/∂ρ, ∂P/∂e_int)`.
    pub fn lookup(&self, rho: T, eint: T) -> Result<(T, T, T)> {
        if !self.contains(rho, eint) {
            return Err(Error::OutOfDomain(format!(
                "(ρ = {rho}, e_int = {eint}) outside table range ρ ∈ [{}, {}], {:?} energy ∈ [{}, {}]",
                self.rho_range.0, self.rho_range.1, self.axis, self.eint_range.0, self.eint_range.1
            )));
        }
        let (eint, slope) = self.coordinate(rho, eint).expect("checked by contains");
        let hx = (self.rho_range.1 - self.rho_range.0) / T::of_usize(self.n_rho - 1);
        let hy = (self.eint_range.1 - self.eint_range.0) / T::of_usize(self.n_e - 1);
        let fx = (rho - self.rho_range.0) / hx;
        let fy = (eint - self.eint_range.0) / hy;
        let i = fx.floor().to_f64_lossy().max(0.0).min((self.n_rho - 2) as f64) as usize;
        let j = fy.floor().to_f64_lossy().max(0.0).min((self.n_e - 2) as f64) as usize;
        let tx = fx - T::of_usize(i);
        let ty = fy - T::of_usize(j);
        let (bx, dbx) = hermite(tx);
        let (by, dby) = hermite(ty);
        let mut val = T::zero();
        let mut dx = T::zero();
        let mut dy = T::zero();
        for (ci, di) in [(0usize, 0usize), (1, 1)] {
            for (cj, dj) in [(0usize, 0usize), (1, 1)] {
                let k = (i + di) * self.n_e + (j + dj);
                // Hermite basis index: value at corner → 0/2, slope → 1/3
                let (xv, xs) = (2 * ci, 2 * ci + 1);
                let (yv, ys) = (2 * cj, 2 * cj + 1);
                let coeffs = [
                    (xv, yv, self.p[k]),
                    (xs, yv, self.p_rho[k] * hx),
                    (xv, ys, self.p_e[k] * hy),
                    (xs, ys, self.p_rho_e[k] * hx * hy),
                ];
                for (a, b, c) in coeffs {
                    val += c * bx[a] * by[b];
                    dx += c * dbx[a] * by[b];
                    dy += c * bx[a] * dby[b];
                }
            }
        }
        let (p_y, p_rho_y) = (dy / hy, dx / hx);
        Ok((val, p_rho_y - p_y * slope, p_y))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(self.dim as u32)?;
        match self.domain {
            MomentumDomain::Unbounded => {
                w.write_u32::<LittleEndian>(0)?;
                w.write_u64::<LittleEndian>(0)?;
                w.write_f64::<LittleEndian>(0.0)?;
            }
            MomentumDomain::Brillouin { nodes, spacing } => {
                w.write_u32::<LittleEndian>(1)?;
                w.write_u64::<LittleEndian>(nodes as u64)?;
                w.write_f64::<LittleEndian>(spacing.to_f64_lossy())?;
            }
        }
        w.write_u32::<LittleEndian>(match self.axis {
            EnergyAxis::Internal => 0,
            EnergyAxis::Excess => 1,
        })?;
        for x in [self.rho_range.0, self.rho_range.1, self.eint_range.0, self.eint_range.1] {
            w.write_f64::<LittleEndian>(x.to_f64_lossy())?;
        }
        w.write_u64::<LittleEndian>(self.n_rho as u64)?;
        w.write_u64::<LittleEndian>(self.n_e as u64)?;
        for grid in [&self.p, &self.p_rho, &self.p_e, &self.p_rho_e] {
            for &x in grid.iter() {
                w.write_f64::<LittleEndian>(x.to_f64_lossy())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Invalid("not an EOS table file".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != VERSION {
            return Err(Error::Invalid(format!("unsupported EOS table version {version}")));
        }
        let dim = r.read_u32::<LittleEndian>()? as usize;
        if !(1..=3).contains(&dim) {
            return Err(Error::Invalid(format!("bad dimension {dim} in EOS table")));
        }
        let tag = r.read_u32::<LittleEndian>()?;
        let nodes = r.read_u64::<LittleEndian>()? as usize;
        let spacing = r.read_f64::<LittleEndian>()?;
        let domain = match tag {
            0 => MomentumDomain::Unbounded,
            1 => MomentumDomain::Brillouin { nodes, spacing: T::of(spacing) },
            t => return Err(Error::Invalid(format!("unknown momentum domain tag {t}"))),
        };
        let axis = match r.read_u32::<LittleEndian>()? {
            0 => EnergyAxis::Internal,
            1 => EnergyAxis::Excess,
            a => return Err(Error::Invalid(format!("unknown energy axis tag {a}"))),
        };
        let mut rg = [T::zero(); 4];
        for x in rg.iter_mut() {
            *x = T::of(r.read_f64::<LittleEndian>()?);
        }
        let n_rho = r.read_u64::<LittleEndian>()? as usize;
        let n_e = r.read_u64::<LittleEndian>()? as usize;
        if n_rho < 2 || n_e < 2 || n_rho.saturating_mul(n_e) > 1 << 28 {
            return Err(Error::Invalid(format!("bad table resolution {n_rho}×{n_e}")));
        }
        let mut grids: [Vec<T>; 4] = Default::default();
        for g in grids.iter_mut() {
            *g = (0..n_rho * n_e).map(|_| r.read_f64::<LittleEndian>().map(T::of)).collect::<std::io::Result<_>>()?;
        }
        let [p, p_rho, p_e, p_rho_e] = grids;
        Ok(Self { dim, domain, axis, rho_range: (rg[0], rg[1]), eint_range: (rg[2], rg[3]), n_rho, n_e, p, p_rho, p_e, p_rho_e })
    }

    /// Node values as `rho,eint,p,p_rho,p_e` rows.
    pub fn write_csv_preview<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["rho", "eint", "p", "p_rho", "p_e"])?;
        for i in 0..self.n_rho {
            for j in 0..self.n_e {
                let k = i * self.n_e + j;
                wr.write_record(
                    [self.rho_node(i), self.node_energy(i, j)?, self.p[k], self.p_rho[k], self.p_e[k]]
                        .map(|x| format!("{:.15e}", x.to_f64_lossy())),
                )?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

impl<T: Real> EosModel<T> {
    /// Tabulates the rest-frame closure on an `n_rho × n_e` node grid over a
    /// rectangle in `(ρ, e_int)`.
    pub fn tabulate(&self, rho_range: (T, T), eint_range: (T, T), resolution: (usize, usize)) -> Result<EosTable<T>> {
        self.check_table_request(rho_range, eint_range, resolution)?;
        let floor = self.energy_floor(rho_range.1)?;
        if !(eint_range.0 > floor) {
            return Err(Error::OutOfDomain(format!(
                "e_int lower bound {} is not above the zero-temperature floor {floor} at ρ = {}",
                eint_range.0, rho_range.1
            )));
        }
        self.build_table(EnergyAxis::Internal, rho_range, eint_range, resolution)
    }

    /// Like [`tabulate`](Self::tabulate) but over `(ρ, e_int − floor(ρ))`.
    pub fn tabulate_excess(
        &self,
        rho_range: (T, T),
        excess_range: (T, T),
        resolution: (usize, usize),
    ) -> Result<EosTable<T>> {
        self.check_table_request(rho_range, excess_range, resolution)?;
        self.energy_floor(rho_range.1)?;
        if !(excess_range.0 > T::zero()) {
            return Err(Error::OutOfDomain(format!("excess energy lower bound {} is not positive", excess_range.0)));
        }
        self.build_table(EnergyAxis::Excess, rho_range, excess_range, resolution)
    }

    fn check_table_request(&self, rho_range: (T, T), y_range: (T, T), resolution: (usize, usize)) -> Result<()> {
        if resolution.0 < 2 || resolution.1 < 2 {
            return Err(Error::Invalid("table resolution must be at least 2×2".into()));
        }
        if !(rho_range.0 > T::zero() && rho_range.1 > rho_range.0 && y_range.1 > y_range.0) {
            return Err(Error::OutOfDomain(format!("degenerate table ranges {rho_range:?}, {y_range:?}")));
        }
        Ok(())
    }

    fn build_table(
        &self,
        axis: EnergyAxis,
        rho_range: (T, T),
        eint_range: (T, T),
        (n_rho, n_e): (usize, usize),
    ) -> Result<EosTable<T>> {
        let mut t = EosTable {
            dim: self.dim,
            domain: self.domain,
            axis,
            rho_range,
            eint_range,
            n_rho,
            n_e,
            p: vec![T::zero(); n_rho * n_e],
            p_rho: vec![T::zero(); n_rho * n_e],
            p_e: vec![T::zero(); n_rho * n_e],
            p_rho_e: vec![T::zero(); n_rho * n_e],
        };
        let mut row_guess = None;
        for i in 0..n_rho {
            let mut guess: Option<crate::eos::MultiplierVector<T>> = row_guess;
            for j in 0..n_e {
                let rho = t.rho_node(i);
                let RestPressure { p, p_rho, p_e, lam } = self.rest_state(rho, t.node_energy(i, j)?, guess.as_ref())?;
                let slope = match axis {
                    EnergyAxis::Internal => T::zero(),
                    EnergyAxis::Excess => t.floor_and_slope(rho)?.1,
                };
                let k = i * n_e + j;
                t.p[k] = p;
                t.p_rho[k] = p_rho + p_e * slope;
                t.p_e[k] = p_e;
                guess = Some(lam);
                if j == 0 {
                    row_guess = Some(lam);
                }
            }
        }
        // mixed derivative from differences of ∂P/∂y along ρ
        let h = (rho_range.1 - rho_range.0) / T::of_usize(n_rho - 1);
        for i in 0..n_rho {
            for j in 0..n_e {
                let at = |ii: usize| t.p_e[ii * n_e + j];
                let v = if n_rho == 2 {
                    (at(1) - at(0)) / h
                } else if i == 0 {
                    (-T::of(3.0) * at(0) + T::of(4.0) * at(1) - at(2)) / (T::of(2.0) * h)
                } else if i == n_rho - 1 {
                    (T::of(3.0) * at(i) - T::of(4.0) * at(i - 1) + at(i - 2)) / (T::of(2.0) * h)
                } else {
                    (at(i + 1) - at(i - 1)) / (T::of(2.0) * h)
                };
                t.p_rho_e[i * n_e + j] = v;
            }
        }
        Ok(t)
    }
}
