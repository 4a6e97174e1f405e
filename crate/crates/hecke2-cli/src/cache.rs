//! Series cache files: magic "FPS2", version u32 = 1, precision u64, word
//! count u64, then little-endian 64-bit words (bit i of word w = coefficient
//! of x^{64w+i}). Writes are atomic via temp file + rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hecke2_core::series::BitSeries;

pub const MAGIC: &[u8; 4] = b"FPS2";
pub const VERSION: u32 = 1;

pub fn series_path(dir: &Path, name: &str, prec: usize) -> PathBuf {
    dir.join(format!("{name}_n{prec}.fps2"))
}

pub fn write_series(path: &Path, s: &BitSeries) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + 8 * s.words().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(s.prec() as u64).to_le_bytes());
    buf.extend_from_slice(&(s.words().len() as u64).to_le_bytes());
    for w in s.words() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    let dir = path.parent().context("cache path has no parent")?;
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&buf)?;
    tmp.persist(path)
        .with_context(|| format!("persisting cache file {}", path.display()))?;
    Ok(())
}

pub fn read_series(path: &Path) -> Result<BitSeries> {
    let data = fs::read(path)
        .with_context(|| format!("reading cache file {}", path.display()))?;
    let corrupt = |why: &str| format!("corrupt cache file {}: {}", path.display(), why);
    if data.len() < 24 {
        bail!(corrupt("shorter than header"));
    }
    if &data[0..4] != MAGIC {
        bail!(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
    if version != VERSION {
        bail!(corrupt("unsupported version"));
    }
    let prec = u64::from_le_bytes(data[8..16].try_into().unwrap()) as usize;
    let nwords = u64::from_le_bytes(data[16..24].try_into().unwrap()) as usize;
    if prec < 1 || nwords != prec.div_ceil(64) {
        bail!(corrupt("word count inconsistent with precision"));
    }
    if data.len() != 24 + 8 * nwords {
        bail!(corrupt("payload length mismatch"));
    }
    let mut words = Vec::with_capacity(nwords);
    for i in 0..nwords {
        words.push(u64::from_le_bytes(
            data[24 + 8 * i..32 + 8 * i].try_into().unwrap(),
        ));
    }
    // Rebuild through the public constructor to enforce the trim invariant.
    let mut exps = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut v = word;
        while v != 0 {
            let b = v.trailing_zeros() as usize;
            let e = 64 * w + b;
            if e >= prec {
                bail!(corrupt("set bit beyond declared precision"));
            }
            exps.push(e);
            v &= v - 1;
        }
    }
    Ok(BitSeries::from_exponents(exps, prec))
}

/// Load the theta series F from the cache if present and valid, otherwise
/// compute and (best-effort) store it. Returns (series, cache_hit).
pub fn theta_f_cached(dir: Option<&Path>, prec: usize) -> Result<(BitSeries, bool)> {
    if let Some(dir) = dir {
        let path = series_path(dir, "theta_f", prec);
        if path.exists() {
            let s = read_series(&path)?;
            if s.prec() != prec {
                bail!("corrupt cache file {}: wrong precision", path.display());
            }
            return Ok((s, true));
        }
        let s = BitSeries::theta_f(prec);
        write_series(&path, &s)?;
        return Ok((s, false));
    }
    Ok((BitSeries::theta_f(prec), false))
}
