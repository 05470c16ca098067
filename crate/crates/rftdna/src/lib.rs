//! Alignment-free DNA sequence comparison via the Ramanujan-Fourier transform.
//!
//! A DNA sequence is decomposed into four binary indicator signals (one per
//! nucleotide), each signal is projected onto a Ramanujan-sum basis, and the
//! summed absolute coefficients form a per-sequence power-spectrum signature.
//! Euclidean distances between signatures feed UPGMA clustering.

pub mod fixtures;
pub mod labkit;
pub mod metric;
pub mod numtheory;
pub mod phylo;
pub mod seqmodel;
pub mod transform;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("matrix is singular or ill-conditioned: {0}")]
    Singular(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("sequences unavailable (cold cache, fetch failed): {}", missing.join(", "))]
    Unavailable { missing: Vec<String> },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Format a float with 12 significant digits, the fixed precision used by
/// every data file this crate writes.
pub fn fmt_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.11e}", v);
    // Normalize "1.20000000000e2" style output back to plain decimal where
    // the exponent is small, keeping files human-readable.
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().unwrap_or(0);
            if (-4..12).contains(&exp) {
                let decimals = (11 - exp).max(0) as usize;
                let plain = format!("{:.*}", decimals, v);
                let trimmed = plain.trim_end_matches('0').trim_end_matches('.');
                trimmed.to_string()
            } else {
                let m = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{}e{}", m, exp)
            }
        }
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig12;

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(14.3), "14.3");
        assert_eq!(fmt_sig12(-0.55), "-0.55");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(1e-20), "1e-20");
    }
}
