//! Spectral-map serialization: row-major CSV with a provenance header, and
//! the same binary container family used for eigenbases.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fmap::{BasisMeta, MapSource, SpectralMap};
use crate::spectral::io::{
    kind_from_u8, kind_to_u8, read_f64s, read_u32, read_u64, read_u8, write_f64s,
    CONTAINER_VERSION,
};

const MAP_MAGIC: &[u8; 4] = b"SPMC";

/// CSV layout: `k2,k1,source` header line, a second line with the values,
/// then `k2` rows of `k1` coefficients (row-major).
pub fn write_spectral_map_csv<P: AsRef<Path>>(map: &SpectralMap, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k2,k1,source")?;
    writeln!(w, "{},{},{}", map.k2(), map.k1(), map.source().as_str())?;
    for row in map.coefficients().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a map written by [`write_spectral_map_csv`]. Basis provenance is not
/// stored in the CSV; the caller supplies it.
pub fn read_spectral_map_csv<P: AsRef<Path>>(
    path: P,
    basis1: BasisMeta,
    basis2: BasisMeta,
) -> Result<SpectralMap> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::UnsupportedFormat("empty map csv".into()))?;
    if header.trim() != "k2,k1,source" {
        return Err(Error::UnsupportedFormat(format!("bad map header {header:?}")));
    }
    let meta = lines.next().ok_or(Error::UnsupportedFormat("missing map meta".into()))?;
    let mut parts = meta.split(',');
    let k2: usize = parse_cell(parts.next(), 2)?;
    let k1: usize = parse_cell(parts.next(), 2)?;
    let source: MapSource = parts
        .next()
        .ok_or(Error::UnsupportedFormat("missing source".into()))?
        .trim()
        .parse()?;
    let mut c = Array2::zeros((k2, k1));
    for (i, line) in lines.enumerate() {
        if i >= k2 {
            return Err(Error::UnsupportedFormat("too many map rows".into()));
        }
        for (j, cell) in line.split(',').enumerate() {
            if j >= k1 {
                return Err(Error::UnsupportedFormat("too many map columns".into()));
            }
            c[[i, j]] = cell.trim().parse().map_err(|_| Error::Parse {
                line: i + 3,
                msg: format!("bad float {cell:?}"),
            })?;
        }
    }
    SpectralMap::from_parts(c, basis1, basis2, source)
}

fn parse_cell(cell: Option<&str>, line: usize) -> Result<usize> {
    cell.ok_or(Error::UnsupportedFormat("short map meta line".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse {
            line,
            msg: "bad integer".into(),
        })
}

/// Binary container: magic `SPMC`, version, `k2`, `k1`, source tag, both
/// basis provenance triples, then the coefficients column-major.
pub fn write_spectral_map<P: AsRef<Path>>(map: &SpectralMap, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAP_MAGIC)?;
    w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
    w.write_all(&(map.k2() as u64).to_le_bytes())?;
    w.write_all(&(map.k1() as u64).to_le_bytes())?;
    w.write_all(&[source_to_u8(map.source())])?;
    for meta in [map.basis1_meta(), map.basis2_meta()] {
        w.write_all(&(meta.n as u64).to_le_bytes())?;
        w.write_all(&(meta.k as u64).to_le_bytes())?;
        w.write_all(&[kind_to_u8(meta.kind)])?;
    }
    for col in map.coefficients().columns() {
        write_f64s(&mut w, col.iter().copied())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectral_map<P: AsRef<Path>>(path: P) -> Result<SpectralMap> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAP_MAGIC {
        return Err(Error::UnsupportedFormat("bad spectral map magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != CONTAINER_VERSION {
        return Err(Error::UnsupportedFormat(format!(
            "spectral map container version {version}"
        )));
    }
    let k2 = read_u64(&mut r)? as usize;
    let k1 = read_u64(&mut r)? as usize;
    let source = source_from_u8(read_u8(&mut r)?)?;
    let mut metas = [BasisMeta {
        n: 0,
        k: 0,
        kind: crate::graph::LaplacianKind::Normalized,
    }; 2];
    for meta in metas.iter_mut() {
        meta.n = read_u64(&mut r)? as usize;
        meta.k = read_u64(&mut r)? as usize;
        meta.kind = kind_from_u8(read_u8(&mut r)?)?;
    }
    let mut c = Array2::zeros((k2, k1));
    for j in 0..k1 {
        let col = read_f64s(&mut r, k2)?;
        for (i, v) in col.into_iter().enumerate() {
            c[[i, j]] = v;
        }
    }
    SpectralMap::from_parts(c, metas[0], metas[1], source)
}

fn source_to_u8(s: MapSource) -> u8 {
    match s {
        MapSource::GroundTruth => 0,
        MapSource::Estimated => 1,
        MapSource::Refined => 2,
    }
}

fn source_from_u8(v: u8) -> Result<MapSource> {
    match v {
        0 => Ok(MapSource::GroundTruth),
        1 => Ok(MapSource::Estimated),
        2 => Ok(MapSource::Refined),
        other => Err(Error::UnsupportedFormat(format!("map source tag {other}"))),
    }
}
