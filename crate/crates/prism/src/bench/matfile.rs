//! Matrix file I/O. The canonical format is MTXB: a 4-byte magic, a u32
//! little-endian version, u64 LE row and column counts, and a row-major
//! payload of IEEE-754 binary64 little-endian values. Whitespace-separated
//! text with a leading "rows cols" line is also accepted on read for
//! hand-made fixtures.

use crate::error::{Error, Result};
use crate::matcore::Mat;
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"MTXB";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

pub fn write_matrix(path: &Path, m: &Mat) -> Result<()> {
    std::fs::write(path, encode_matrix(m))?;
    Ok(())
}

pub fn encode_matrix(m: &Mat) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + m.data().len() * 8);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    let bytes = std::fs::read(path)?;
    if bytes.len() >= 4 && bytes[..4] == MAGIC {
        parse_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| {
            Error::Format("input is neither MTXB binary nor UTF-8 text".into())
        })?;
        parse_text(text)
    }
}

pub fn parse_binary(bytes: &[u8]) -> Result<Mat> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated MTXB header".into()));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected MTXB".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported MTXB version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if rows == 0 || cols == 0 {
        return Err(Error::Format("matrix dimensions must be positive".into()));
    }
    let count = rows
        .checked_mul(cols)
        .filter(|c| *c <= (usize::MAX / 8) as u64)
        .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
    let expected = HEADER_LEN + count as usize * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload length mismatch: expected {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Format("payload contains non-finite values".into()));
    }
    Mat::from_vec(rows as usize, cols as usize, data)
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_text(text: &str) -> Result<Mat> {
    let mut tokens = text.split_whitespace();
    let rows: usize = tokens
        .next()
        .ok_or_else(|| Error::Format("empty text matrix".into()))?
        .parse()
        .map_err(|_| Error::Format("bad row count".into()))?;
    let cols: usize = tokens
        .next()
        .ok_or_else(|| Error::Format("missing column count".into()))?
        .parse()
        .map_err(|_| Error::Format("bad column count".into()))?;
    if rows == 0 || cols == 0 {
        return Err(Error::Format("matrix dimensions must be positive".into()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for token in tokens {
        let v: f64 = token
            .parse()
            .map_err(|_| Error::Format(format!("bad matrix entry {token:?}")))?;
        data.push(v);
    }
    if data.len() != rows * cols {
        return Err(Error::Format(format!(
            "expected {} entries, got {}",
            rows * cols,
            data.len()
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Format("matrix entries must be finite".into()));
    }
    Mat::from_vec(rows, cols, data).map_err(|e| Error::Format(e.to_string()))
}
