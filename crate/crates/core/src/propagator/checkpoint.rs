use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tracker::{Grid3, SampledField};

const MAGIC: &[u8; 4] = b"QVCK";
const VERSION: u32 = 1;

/// Binary snapshot: magic, version, dims (u64), spacing, origin, time,
/// then interleaved re/im values in x-fastest order. All little-endian.
pub fn write_checkpoint<W: Write>(f: &SampledField, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in f.grid.dims {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for v in f.grid.spacing.iter().chain(&f.grid.origin).chain(std::iter::once(&f.time)) {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * f.values.len());
    for z in &f.values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn bytes<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated checkpoint: {e}")))?;
    Ok(b)
}

fn f64s<const N: usize, R: Read>(r: &mut R) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for v in &mut out {
        *v = f64::from_le_bytes(bytes(r)?);
    }
    Ok(out)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<SampledField> {
    if &bytes::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Format("not a checkpoint file".into()));
    }
    let version = u32::from_le_bytes(bytes(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = usize::try_from(u64::from_le_bytes(bytes(&mut r)?))
            .map_err(|_| Error::Format("dimension overflow".into()))?;
    }
    let spacing = f64s::<3, _>(&mut r)?;
    let origin = f64s::<3, _>(&mut r)?;
    let [time] = f64s::<1, _>(&mut r)?;
    let grid = Grid3::new(origin, spacing, dims)?;
    let n = grid.len();
    let mut raw = vec![0u8; 16 * n];
    r.read_exact(&mut raw).map_err(|e| Error::Format(format!("truncated checkpoint: {e}")))?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after checkpoint".into()));
    }
    SampledField::new(grid, values, time)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> SampledField {
        let g = Grid3::new([-1.0, -2.0, 0.5], [0.5, 0.25, 0.125], [4, 5, 6]).unwrap();
        let v = (0..g.len()).map(|i| C64::new(i as f64 * 0.5, -(i as f64).sqrt())).collect();
        SampledField::new(g, v, 1.25).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = field();
        let mut buf = Vec::new();
        write_checkpoint(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 24 + 56 + 16 * 120);
        assert_eq!(&buf[..4], b"QVCK");
        let g = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let mut buf = Vec::new();
        write_checkpoint(&field(), &mut buf).unwrap();
        assert!(matches!(read_checkpoint(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(read_checkpoint(&extra[..]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_checkpoint(&bad[..]), Err(Error::Format(_))));
        let mut ver = buf;
        ver[4] = 9;
        assert!(matches!(read_checkpoint(&ver[..]), Err(Error::Format(_))));
    }
}
