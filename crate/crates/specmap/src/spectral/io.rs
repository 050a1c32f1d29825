//! Eigenbasis serialization: a little-endian binary container and a CSV
//! debug dump.
//!
//! Container layout: magic `SPEB`, format version (u32), `n` (u64), `k`
//! (u64), Laplacian kind (u8), then `lambda` as k float64 values, then `Phi`
//! column-major as n*k float64 values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::LaplacianKind;
use crate::spectral::Eigenbasis;

pub(crate) const EIGENBASIS_MAGIC: &[u8; 4] = b"SPEB";
pub(crate) const CONTAINER_VERSION: u32 = 1;

pub(crate) fn kind_to_u8(kind: LaplacianKind) -> u8 {
    match kind {
        LaplacianKind::Normalized => 0,
        LaplacianKind::Combinatorial => 1,
    }
}

pub(crate) fn kind_from_u8(v: u8) -> Result<LaplacianKind> {
    match v {
        0 => Ok(LaplacianKind::Normalized),
        1 => Ok(LaplacianKind::Combinatorial),
        other => Err(Error::UnsupportedFormat(format!(
            "unknown laplacian kind tag {other}"
        ))),
    }
}

pub(crate) fn write_f64s<W: Write>(w: &mut W, values: impl Iterator<Item = f64>) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

pub(crate) fn read_f64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn write_eigenbasis<P: AsRef<Path>>(basis: &Eigenbasis, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(EIGENBASIS_MAGIC)?;
    w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
    w.write_all(&(basis.n() as u64).to_le_bytes())?;
    w.write_all(&(basis.k() as u64).to_le_bytes())?;
    w.write_all(&[kind_to_u8(basis.kind())])?;
    write_f64s(&mut w, basis.lambda().iter().copied())?;
    for col in basis.phi().columns() {
        write_f64s(&mut w, col.iter().copied())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_eigenbasis<P: AsRef<Path>>(path: P) -> Result<Eigenbasis> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != EIGENBASIS_MAGIC {
        return Err(Error::UnsupportedFormat("bad eigenbasis magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != CONTAINER_VERSION {
        return Err(Error::UnsupportedFormat(format!(
            "eigenbasis container version {version}"
        )));
    }
    let n = read_u64(&mut r)? as usize;
    let k = read_u64(&mut r)? as usize;
    let kind = kind_from_u8(read_u8(&mut r)?)?;
    let lambda = read_f64s(&mut r, k)?;
    let mut phi = Array2::zeros((n, k));
    for c in 0..k {
        let col = read_f64s(&mut r, n)?;
        for (i, v) in col.into_iter().enumerate() {
            phi[[i, c]] = v;
        }
    }
    Ok(Eigenbasis::from_parts(phi, lambda, kind))
}

/// Human-readable dump: `n,k,kind` header, one line of eigenvalues, then the
/// n rows of `Phi`.
pub fn write_eigenbasis_csv<P: AsRef<Path>>(basis: &Eigenbasis, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{},{},{}", basis.n(), basis.k(), basis.kind().as_str())?;
    let lams: Vec<String> = basis.lambda().iter().map(|v| v.to_string()).collect();
    writeln!(w, "{}", lams.join(","))?;
    for row in basis.phi().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}
