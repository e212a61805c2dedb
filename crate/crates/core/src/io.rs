//! Matrix file formats.
//!
//! * CSV: one matrix row per line, comma separated, `.` as decimal
//!   separator, no header.
//! * Binary: the 8-byte magic [`MAGIC`], then `rows` and `cols` as
//!   little-endian `u64`, then the entries in row-major order as
//!   little-endian IEEE-754 doubles.
//!
//! [`read_matrix`] and [`write_matrix`] pick the format from the file
//! extension: `.csv` means CSV, anything else is binary.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 8] = b"GRSM\x00\x00\x001";

const HEADER_LEN: usize = 8 + 8 + 8;

pub fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if is_csv(path) {
        let text = String::from_utf8(bytes).map_err(|_| Error::format(path, "not UTF-8"))?;
        decode_csv(&text).map_err(|m| Error::format(path, m))
    } else {
        decode_binary(&bytes).map_err(|m| Error::format(path, m))
    }
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_csv(path) { encode_csv(m).into_bytes() } else { encode_binary(m) };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_binary(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> std::result::Result<Matrix, String> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err("bad magic".into());
    }
    if bytes.len() < HEADER_LEN {
        return Err("truncated header".into());
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (rows, cols) = (word(8), word(16));
    let count = rows.checked_mul(cols).and_then(|c| c.checked_mul(8)).ok_or("shape overflows")?;
    let payload = &bytes[HEADER_LEN..];
    if (payload.len() as u64) != count {
        return Err(format!("payload holds {} bytes, {rows}x{cols} needs {count}", payload.len()));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Matrix::from_row_major(rows as usize, cols as usize, data).map_err(|e| e.to_string())
}

pub fn encode_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str) -> std::result::Result<Matrix, String> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("line {}: cannot parse {t:?}", n + 1)))
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    Matrix::from_rows(&rows).map_err(|e| e.to_string())
}
