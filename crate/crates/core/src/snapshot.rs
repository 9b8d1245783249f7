//! Binary field snapshots.
//!
//! Layout (all integers and floats little-endian):
//!   magic   4 bytes  "BFED"
//!   version u32      currently 1
//!   n       u32      modes per dimension
//!   l       f64      box side length
//!   dealias f64      dealias fraction
//!   time    f64      simulation time of the snapshot
//!   coeffs  3 * n^3 * (re: f64, im: f64)
//!
//! Coefficients are stored component-major (all of component 0, then 1, then
//! 2); within a component the mode order is the flat index order
//! `(ix*n + iy)*n + iz` with z fastest, i.e. FFT index order where axis index
//! `j` carries integer mode `j` for `j <= n/2` and `j - n` above.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use num_complex::Complex64;
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"BFED";
const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(w: &mut W, field: &SpectralField, time: f64) -> Result<()> {
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.l().to_le_bytes())?;
    w.write_all(&grid.dealias_fraction().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    for c in 0..3 {
        for v in field.component(c) {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(r: &mut R) -> Result<(SpectralField, f64)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = read_u32(r)? as usize;
    let l = read_f64(r)?;
    let frac = read_f64(r)?;
    let time = read_f64(r)?;
    let grid = Grid::new(n, l, frac).map_err(|e| Error::Snapshot(e.to_string()))?;
    let mut field = SpectralField::zeros(grid);
    for c in 0..3 {
        for v in field.component_mut(c) {
            let re = read_f64(r)?;
            let im = read_f64(r)?;
            *v = Complex64::new(re, im);
        }
    }
    Ok((field, time))
}

pub fn write_snapshot_file(path: &std::path::Path, field: &SpectralField, time: f64) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut f, field, time)
}

pub fn read_snapshot_file(path: &std::path::Path) -> Result<(SpectralField, f64)> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_snapshot(&mut f)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
