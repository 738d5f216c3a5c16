//! Raw binary grid files.
//!
//! Layout (all little-endian): `k: u64`, `k` point counts as `u64`, `k`
//! `(lo, hi)` pairs as `f64`, then the values as `f64` in row-major order.

use std::io::{Read, Write};

use super::grid::{Axis, Grid};
use super::sampled::SampledFunction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_DIM: u64 = 16;

pub fn write_grid_values<T: Scalar, W: Write>(mut w: W, f: &SampledFunction<T>) -> Result<()> {
    let g = f.grid();
    w.write_all(&(g.dim() as u64).to_le_bytes())?;
    for a in g.axes() {
        w.write_all(&(a.points as u64).to_le_bytes())?;
    }
    for a in g.axes() {
        w.write_all(&a.lo.to_f64_lossy().to_le_bytes())?;
        w.write_all(&a.hi.to_f64_lossy().to_le_bytes())?;
    }
    for v in f.values() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_values<T: Scalar, R: Read>(mut r: R) -> Result<SampledFunction<T>> {
    let k = read_u64(&mut r)?;
    if k == 0 || k > MAX_DIM {
        return Err(Error::Format(format!(
            "grid dimension {k} out of range 1..={MAX_DIM}"
        )));
    }
    let counts = (0..k)
        .map(|_| read_u64(&mut r))
        .collect::<Result<Vec<_>>>()?;
    let mut axes = Vec::with_capacity(k as usize);
    for &n in &counts {
        let lo = read_f64(&mut r)?;
        let hi = read_f64(&mut r)?;
        let points =
            usize::try_from(n).map_err(|_| Error::Format("point count overflows".into()))?;
        axes.push(Axis {
            lo: T::lit(lo),
            hi: T::lit(hi),
            points,
        });
    }
    let total = counts
        .iter()
        .try_fold(1u64, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::Format("point count overflows".into()))?;
    let grid = Grid::new(axes)?;
    let mut values = Vec::with_capacity(total as usize);
    for _ in 0..total {
        values.push(T::lit(read_f64(&mut r)?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after grid values".into()));
    }
    SampledFunction::from_values(grid, values)
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("truncated grid file".into())
    } else {
        Error::Io(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Grid::new(vec![
            Axis {
                lo: -1.0_f64,
                hi: 2.0,
                points: 4,
            },
            Axis {
                lo: 0.0,
                hi: 1.0,
                points: 3,
            },
        ])
        .unwrap();
        let f = SampledFunction::from_fn(g, |x| x[0] * 10.0 + x[1]).unwrap();
        let mut buf = Vec::new();
        write_grid_values(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 8 + 16 + 32 + 12 * 8);
        let back: SampledFunction<f64> = read_grid_values(buf.as_slice()).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn rejects_bad_files() {
        let g = Grid::line(0.0_f64, 1.0, 3).unwrap();
        let f = SampledFunction::from_fn(g, |x| x[0]).unwrap();
        let mut buf = Vec::new();
        write_grid_values(&mut buf, &f).unwrap();
        assert!(read_grid_values::<f64, _>(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_grid_values::<f64, _>(extra.as_slice()).is_err());
        let mut zero_dim = buf.clone();
        zero_dim[..8].copy_from_slice(&0u64.to_le_bytes());
        assert!(read_grid_values::<f64, _>(zero_dim.as_slice()).is_err());
    }
}
