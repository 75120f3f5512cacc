//! Binary matrix file: magic, little-endian header length, JSON header, then the
//! row-major bit-packed payload as little-endian `u64` words.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{BoolMatrix, SynthConfig};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TAGMAT01";

#[derive(Serialize, Deserialize)]
struct Header {
    rows: usize,
    cols: usize,
    config: SynthConfig,
    correlated: Vec<Vec<usize>>,
}

pub fn write_matrix<W: Write>(matrix: &BoolMatrix, mut w: W) -> Result<()> {
    let header = Header {
        rows: matrix.rows(),
        cols: matrix.cols(),
        config: matrix.config.clone(),
        correlated: matrix.correlated.clone(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::with_capacity(matrix.data().len() * 8);
    for word in matrix.data() {
        buf.extend_from_slice(&word.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<BoolMatrix> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a tag matrix file".into()));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u64::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| Error::Format(e.to_string()))?;
    if header.cols != header.config.num_attrs + header.config.num_tags() {
        return Err(Error::Format("column count disagrees with config".into()));
    }
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() % 8 != 0 {
        return Err(Error::Format("truncated payload".into()));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    BoolMatrix::from_parts(header.config, header.correlated, header.rows, data)
}

/// CSV with header `a0..,<tag labels>` and one `0`/`1` row per item.
pub fn write_matrix_csv<W: Write>(matrix: &BoolMatrix, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<String> = (0..matrix.num_attrs())
        .map(|a| format!("a{a}"))
        .chain((0..matrix.num_tags()).map(|t| super::tag_label(matrix, t)))
        .collect();
    out.write_record(&header)?;
    for row in 0..matrix.rows() {
        out.write_record((0..matrix.cols()).map(|c| if matrix.get(row, c) { "1" } else { "0" }))?;
    }
    out.flush()?;
    Ok(())
}
