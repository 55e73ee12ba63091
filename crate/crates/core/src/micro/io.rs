use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::lattice::Lattice;
use super::state::{CurrentTensor, DensityFields, GaussianState};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cplx, Real};

const MAGIC: &[u8; 8] = b"FEGSNAP\0";
const VERSION: u32 = 1;
/// Tag for the convention `C(x, y) = ⟨a⁺_y a_x⟩`.
const CONVENTION: u32 = 1;

impl<T: Real> GaussianState<T> {
    /// Binary snapshot: header (L, spacing, t, convention) followed by the
    /// upper triangle of the position-space matrix, row by row, as
    /// little-endian `(re, im)` pairs.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        let c = self.position_matrix();
        let l = self.lattice.sites();
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(CONVENTION)?;
        w.write_u64::<LittleEndian>(l as u64)?;
        w.write_f64::<LittleEndian>(self.lattice.spacing().to_f64_lossy())?;
        w.write_f64::<LittleEndian>(self.time.to_f64_lossy())?;
        for i in 0..l {
            for j in i..l {
                w.write_f64::<LittleEndian>(c[(i, j)].re.to_f64_lossy())?;
                w.write_f64::<LittleEndian>(c[(i, j)].im.to_f64_lossy())?;
            }
        }
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Invalid("not a state snapshot".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != VERSION {
            return Err(Error::Invalid(format!("unsupported snapshot version {version}")));
        }
        let conv = r.read_u32::<LittleEndian>()?;
        if conv != CONVENTION {
            return Err(Error::Invalid(format!("unknown correlation convention tag {conv}")));
        }
        let l = r.read_u64::<LittleEndian>()? as usize;
        if !(2..=1 << 14).contains(&l) {
            return Err(Error::Invalid(format!("implausible lattice size {l}")));
        }
        let spacing = T::of(r.read_f64::<LittleEndian>()?);
        let time = T::of(r.read_f64::<LittleEndian>()?);
        let lattice = Lattice::new(l, spacing)?;
        let mut c = CMatrix::<T>::zeros(l, l);
        for i in 0..l {
            for j in i..l {
                let re = T::of(r.read_f64::<LittleEndian>()?);
                let im = T::of(r.read_f64::<LittleEndian>()?);
                c[(i, j)] = cplx(re, im);
                c[(j, i)] = cplx(re, -im);
            }
        }
        GaussianState::from_position(&lattice, &c, time)
    }
}

/// Writes `x,n,p,h,w0,w1,w4` rows, `x` being the macroscopic coordinate.
pub fn write_fields_csv<T: Real, W: Write>(
    lattice: &Lattice<T>,
    dens: &DensityFields<T>,
    cur: &CurrentTensor<T>,
    w: W,
) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "n", "p", "h", "w0", "w1", "w4"])?;
    for j in 0..lattice.sites() {
        let row = [lattice.position(j), dens.n[j], dens.p[j], dens.h[j], cur.w0[j], cur.w1[j], cur.w4[j]];
        wr.write_record(row.map(|v| format!("{:.17e}", v.to_f64_lossy())))?;
    }
    wr.flush()?;
    Ok(())
}
