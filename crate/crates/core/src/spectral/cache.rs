use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::error::{Error, Result};

use super::modes::ModeSet;
use super::table::{PartitionTable, Row};

const MAGIC: &[u8; 8] = b"SPTABLE1";

/// Identity of a cached table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub model_hash: String,
    pub l: f64,
    pub n: usize,
    pub alpha: Alpha,
    pub tail_bound: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    key: CacheKey,
    mode_fingerprint: String,
    levels: usize,
    row_len: usize,
    h: Vec<f64>,
}

impl PartitionTable {
    /// Writes magic, a length-prefixed JSON header, then little-endian rows
    /// (`log_scale` followed by `N + 1` values), suffix rows before level rows.
    pub fn save_cache(&self, path: &Path, key: &CacheKey) -> Result<()> {
        let header = Header {
            key: key.clone(),
            mode_fingerprint: self.modes.fingerprint(),
            levels: self.level_gf.len(),
            row_len: self.n + 1,
            h: self.h.clone(),
        };
        let json = serde_json::to_vec(&header)?;
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(json.len() as u64).to_le_bytes())?;
        w.write_all(&json)?;
        for row in self.suffix.iter().chain(&self.level_gf) {
            w.write_all(&row.log_scale.to_le_bytes())?;
            for v in &row.v {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a table written by [`save_cache`](Self::save_cache); the key and the
    /// mode set must match exactly.
    pub fn load_cache(path: &Path, modes: Arc<ModeSet>, key: &CacheKey) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::CacheMismatch("not a table cache file".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut json = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut json)?;
        let header: Header = serde_json::from_slice(&json)?;
        if &header.key != key {
            return Err(Error::CacheMismatch(format!(
                "key {:?} differs from requested {:?}",
                header.key, key
            )));
        }
        if header.mode_fingerprint != modes.fingerprint() || header.levels != modes.levels().len() {
            return Err(Error::CacheMismatch("mode set differs".into()));
        }
        let mut read_row = || -> Result<Row> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            let log_scale = f64::from_le_bytes(buf);
            let mut v = Vec::with_capacity(header.row_len);
            for _ in 0..header.row_len {
                r.read_exact(&mut buf)?;
                v.push(f64::from_le_bytes(buf));
            }
            Ok(Row { v, log_scale })
        };
        let suffix = (0..=header.levels)
            .map(|_| read_row())
            .collect::<Result<Vec<_>>>()?;
        let level_gf = (0..header.levels)
            .map(|_| read_row())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            modes,
            n: header.row_len - 1,
            alpha: key.alpha,
            h: header.h,
            suffix,
            level_gf,
        })
    }
}
