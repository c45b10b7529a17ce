//! Output plumbing shared by all commands: one numeric format for every
//! CSV cell, atomic file writes, and the PGM raster encoding.

use std::fs;
use std::path::{Path, PathBuf};

use crate::failure::{CmdResult, Failure};

/// Twelve significant digits. Everything numeric in the output files goes
/// through here, so reruns compare byte-for-byte.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

/// Free-text CSV cell: no commas, no line breaks.
pub fn sanitize(s: &str) -> String {
    s.replace(['\n', '\r'], " ").replace(',', ";")
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Write via a temp file and rename, so a crash never leaves a truncated
/// artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CmdResult<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)
        .map_err(|e| Failure::numerical(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Failure::numerical(format!("cannot finish {}: {e}", path.display())))
}

/// Binary 8-bit PGM, min-max scaled over the given data. A constant field
/// maps to all zeros.
pub fn pgm_bytes(nx: usize, ny: usize, data: &[f64]) -> Vec<u8> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in data {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let span = hi - lo;
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(data.len());
    for &x in data {
        let byte = if span > 0.0 {
            ((x - lo) / span * 255.0).round() as u8
        } else {
            0
        };
        out.push(byte);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_is_twelve_digits_and_stable() {
        assert_eq!(sig(0.3768694679039897), "3.76869467904e-1");
        assert_eq!(sig(1.0), "1.00000000000e0");
        assert_eq!(sig(-2e-7), "-2.00000000000e-7");
        assert_eq!(sig(f64::NAN), "nan");
    }

    #[test]
    fn sanitize_strips_separators() {
        assert_eq!(sanitize("a,b\nc"), "a;b c");
    }

    #[test]
    fn pgm_scales_min_max() {
        let bytes = pgm_bytes(2, 1, &[0.25, 0.75]);
        assert_eq!(&bytes[..9], b"P5\n2 1\n25");
        assert_eq!(&bytes[bytes.len() - 2..], &[0u8, 255u8]);
        let flat = pgm_bytes(2, 1, &[0.5, 0.5]);
        assert_eq!(&flat[flat.len() - 2..], &[0u8, 0u8]);
    }
}
