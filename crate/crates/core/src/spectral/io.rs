//! The DMAX binary container and small-grid CSV import.
//!
//! Layout (all little-endian): magic `DMAX`, `u32` version = 1, `u32` level,
//! `f64` side, then the payload in row-major sample order. A grid function
//! stores `2^{2L}` `(re, im)` pairs of `f64`; a maximal output stores `2^{2L}`
//! `f64` values followed by `2^{2L}` `u32` argmax indices.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::grid::GridFunction;
use crate::error::{DmaxError, Result};

pub const MAGIC: &[u8; 4] = b"DMAX";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub level: u32,
    pub side: f64,
}

fn write_header(w: &mut impl Write, header: Header) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&header.level.to_le_bytes())?;
    w.write_all(&header.side.to_le_bytes())?;
    Ok(())
}

/// Parses the header and returns it with the remaining payload bytes.
pub fn split_header(bytes: &[u8]) -> Result<(Header, &[u8])> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(DmaxError::Format("missing DMAX magic".into()));
    }
    let u32_at = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(DmaxError::Format(format!("unsupported DMAX version {version}")));
    }
    let level = u32_at(8);
    let side = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    if level > 15 {
        return Err(DmaxError::Format(format!("implausible level {level}")));
    }
    Ok((Header { level, side }, &bytes[HEADER_LEN..]))
}

pub fn write_grid(w: &mut impl Write, f: &GridFunction) -> Result<()> {
    write_header(w, Header { level: f.level(), side: f.side() })?;
    let mut buf = Vec::with_capacity(f.values().len() * 16);
    for z in f.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid(r: &mut impl Read) -> Result<GridFunction> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let (header, payload) = split_header(&bytes)?;
    let count = 1usize << (2 * header.level);
    if payload.len() != count * 16 {
        return Err(DmaxError::Format(format!(
            "expected {} payload bytes for a grid function, found {}",
            count * 16,
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    GridFunction::new(header.level, header.side, values)
}

pub fn write_real_with_index(
    w: &mut impl Write,
    header: Header,
    values: &[f64],
    index: &[u32],
) -> Result<()> {
    write_header(w, header)?;
    let mut buf = Vec::with_capacity(values.len() * 12);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for a in index {
        buf.extend_from_slice(&a.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_real_with_index(r: &mut impl Read) -> Result<(Header, Vec<f64>, Vec<u32>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let (header, payload) = split_header(&bytes)?;
    let count = 1usize << (2 * header.level);
    if payload.len() != count * 12 {
        return Err(DmaxError::Format(format!(
            "expected {} payload bytes for a maximal output, found {}",
            count * 12,
            payload.len()
        )));
    }
    let (vals, idx) = payload.split_at(count * 8);
    let values = vals.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let index = idx.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((header, values, index))
}

/// Reads `x_index, y_index, re, im` rows (an optional header row is skipped).
/// Every lattice site must appear exactly once.
pub fn read_grid_csv(r: impl Read, side: f64) -> Result<GridFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows: Vec<(usize, usize, Complex64)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DmaxError::Format(e.to_string()))?;
        if record.len() != 4 {
            return Err(DmaxError::Format(format!("row {line}: expected 4 fields")));
        }
        let parsed = (
            record[0].parse::<usize>(),
            record[1].parse::<usize>(),
            record[2].parse::<f64>(),
            record[3].parse::<f64>(),
        );
        match parsed {
            (Ok(i), Ok(j), Ok(re), Ok(im)) => rows.push((i, j, Complex64::new(re, im))),
            _ if line == 0 => continue,
            _ => return Err(DmaxError::Format(format!("row {line}: unparsable fields"))),
        }
    }
    let count = rows.len();
    let level = count.trailing_zeros() / 2;
    if count == 0 || 1usize << (2 * level) != count {
        return Err(DmaxError::Format(format!("{count} rows is not a 2^L × 2^L grid")));
    }
    let n = 1usize << level;
    let mut values = vec![None; count];
    for (i, j, z) in rows {
        if i >= n || j >= n {
            return Err(DmaxError::Format(format!("index ({i}, {j}) outside {n}×{n}")));
        }
        if values[i * n + j].replace(z).is_some() {
            return Err(DmaxError::Format(format!("duplicate index ({i}, {j})")));
        }
    }
    GridFunction::new(level, side, values.into_iter().map(|z| z.unwrap()).collect())
}
