//! Content-addressed cache for factorizations over Q.
//!
//! Disabled unless a directory is configured (ARBORLAB_CACHE or --cache-dir).
//! Entries are keyed by sha256 of the canonical polynomial string; a stale or
//! corrupt entry is ignored and rewritten, never trusted.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::exactcore::poly::IntPoly;

const MAGIC: &[u8; 4] = b"ARBF";
const VERSION: u8 = 1;

fn state() -> &'static RwLock<Option<PathBuf>> {
    static STATE: OnceLock<RwLock<Option<PathBuf>>> = OnceLock::new();
    STATE.get_or_init(|| RwLock::new(std::env::var_os("ARBORLAB_CACHE").map(PathBuf::from)))
}

/// Overrides the cache directory; None disables caching.
pub fn set_cache_dir(dir: Option<PathBuf>) {
    *state().write().unwrap() = dir;
}

pub fn cache_dir() -> Option<PathBuf> {
    state().read().unwrap().clone()
}

fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{}.fct", key))
}

pub fn poly_key(f: &IntPoly) -> String {
    let mut h = Sha256::new();
    h.update(b"factor-q/v1:");
    h.update(f.to_string().as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{:02x}", b)).collect()
}

fn encode_bigint(buf: &mut Vec<u8>, n: &BigInt) {
    let s = n.to_string();
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

fn decode_bigint(buf: &[u8], at: &mut usize) -> Option<BigInt> {
    if buf.len() < *at + 4 {
        return None;
    }
    let len = u32::from_le_bytes(buf[*at..*at + 4].try_into().unwrap()) as usize;
    *at += 4;
    if len == 0 || len > 1 << 20 || buf.len() < *at + len {
        return None;
    }
    let s = std::str::from_utf8(&buf[*at..*at + len]).ok()?;
    *at += len;
    s.parse().ok()
}

/// Serialized form of the factor list of a primitive polynomial.
pub fn store_factors(f: &IntPoly, factors: &[(IntPoly, u32)]) {
    let Some(dir) = cache_dir() else { return };
    if fs::create_dir_all(&dir).is_err() {
        return;
    }
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.extend_from_slice(&(factors.len() as u32).to_le_bytes());
    for (g, e) in factors {
        buf.extend_from_slice(&e.to_le_bytes());
        buf.extend_from_slice(&(g.coeffs().len() as u32).to_le_bytes());
        for c in g.coeffs() {
            encode_bigint(&mut buf, c);
        }
    }
    let path = entry_path(&dir, &poly_key(f));
    // Atomic publish: write sideways, then rename.
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    let ok = fs::File::create(&tmp)
        .and_then(|mut fh| fh.write_all(&buf))
        .is_ok();
    if ok {
        let _ = fs::rename(&tmp, &path);
    } else {
        let _ = fs::remove_file(&tmp);
    }
}

/// Loads a cached factor list; the caller re-verifies the product.
pub fn load_factors(f: &IntPoly) -> Option<Vec<(IntPoly, u32)>> {
    let dir = cache_dir()?;
    let buf = fs::read(entry_path(&dir, &poly_key(f))).ok()?;
    if buf.len() < 9 || &buf[0..4] != MAGIC || buf[4] != VERSION {
        return None;
    }
    let mut at = 5usize;
    let count = u32::from_le_bytes(buf[at..at + 4].try_into().unwrap()) as usize;
    at += 4;
    if count > 1 << 16 {
        return None;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if buf.len() < at + 8 {
            return None;
        }
        let e = u32::from_le_bytes(buf[at..at + 4].try_into().unwrap());
        at += 4;
        let n = u32::from_le_bytes(buf[at..at + 4].try_into().unwrap()) as usize;
        at += 4;
        if e == 0 || n == 0 || n > 1 << 16 {
            return None;
        }
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            coeffs.push(decode_bigint(&buf, &mut at)?);
        }
        let g = IntPoly::from_coeffs(coeffs);
        if g.is_zero() || g.coeffs().len() != n {
            return None;
        }
        out.push((g, e));
    }
    if at != buf.len() {
        return None;
    }
    Some(out)
}
