//! Exact integer arithmetic kernels: gcd, Euler totient, Moebius function,
//! and Ramanujan sums, plus a precomputed one-period-per-row table.
//!
//! Production code uses the closed form
//! `c_q(n) = mu(q/(q,n)) * phi(q) / phi(q/(q,n))`; the defining exponential
//! sum over primitive roots of unity is kept only as a cross-check oracle.

use std::io::Read;
use std::path::Path;

use crate::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    debug_assert!(a >= 1 && b >= 1);
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient, by trial-division factorization.
pub fn euler_totient(q: u64) -> u64 {
    debug_assert!(q >= 1);
    let mut n = q;
    let mut phi = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Moebius function: 0 on squareful integers, else (-1)^(distinct primes).
pub fn moebius(n: u64) -> i64 {
    debug_assert!(n >= 1);
    let mut n = n;
    let mut k = 0u32;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ramanujan sum `c_q(n)` via the totient/Moebius closed form.
///
/// Always an exact integer: phi(q) is divisible by phi(q/(q,n)).
pub fn ramanujan_sum(q: u64, n: u64) -> i64 {
    debug_assert!(q >= 1 && n >= 1);
    let d = q / gcd(q, n);
    let mu = moebius(d);
    if mu == 0 {
        return 0;
    }
    mu * (euler_totient(q) / euler_totient(d)) as i64
}

/// Ramanujan sum evaluated from its definition, the sum of n-th powers of
/// the primitive q-th roots of unity. Oracle only; O(q) complex exponentials.
pub fn ramanujan_sum_direct(q: u64, n: u64) -> Result<f64> {
    debug_assert!(q >= 1 && n >= 1);
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    for p in 1..=q {
        if gcd(p, q) == 1 {
            let theta = 2.0 * std::f64::consts::PI * (p as f64) * (n as f64) / (q as f64);
            re += theta.cos();
            im += theta.sin();
        }
    }
    if im.abs() > 1e-9 {
        return Err(Error::Inconsistent(format!(
            "c_{q}({n}) has imaginary part {im:e}"
        )));
    }
    Ok(re)
}

fn euler_totient_or_zero(q: u64) -> u64 {
    if q == 0 {
        0
    } else {
        euler_totient(q)
    }
}

fn moebius_or_zero(n: u64) -> i64 {
    if n == 0 {
        0
    } else {
        moebius(n)
    }
}

/// Dense table of Ramanujan sums, one full period per row: row `q` holds
/// `c_q(1) ..= c_q(q)`. Any `n` is recovered by periodic indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanTable {
    max_q: usize,
    rows: Vec<Vec<i64>>,
}

/// Default memory budget for table construction, in stored i64 values.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 28;

impl RamanujanTable {
    pub fn build(max_q: usize) -> Result<Self> {
        Self::build_with_budget(max_q, DEFAULT_TABLE_BUDGET)
    }

    /// Build with an explicit budget counting total stored values (sum of q).
    pub fn build_with_budget(max_q: usize, budget: usize) -> Result<Self> {
        if max_q == 0 {
            return Err(Error::InvalidArgument("max_q must be >= 1".into()));
        }
        let cells = max_q * (max_q + 1) / 2;
        if cells > budget {
            return Err(Error::Resource(format!(
                "table for max_q={max_q} needs {cells} cells, budget is {budget}"
            )));
        }
        // Precompute phi and mu once; each cell then costs one gcd.
        let phi: Vec<u64> = (0..=max_q as u64).map(euler_totient_or_zero).collect();
        let mu: Vec<i64> = (0..=max_q as u64).map(moebius_or_zero).collect();
        let rows = (1..=max_q as u64)
            .map(|q| {
                (1..=q)
                    .map(|n| {
                        let d = (q / gcd(q, n)) as usize;
                        if mu[d] == 0 {
                            0
                        } else {
                            mu[d] * (phi[q as usize] / phi[d]) as i64
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(RamanujanTable { max_q, rows })
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    /// `c_q(n)` with periodic extension in `n`. 1-based in both arguments.
    pub fn get(&self, q: usize, n: usize) -> i64 {
        debug_assert!(q >= 1 && q <= self.max_q && n >= 1);
        self.rows[q - 1][(n - 1) % q]
    }

    /// One full period `c_q(1) ..= c_q(q)`.
    pub fn row(&self, q: usize) -> &[i64] {
        &self.rows[q - 1]
    }

    const MAGIC: &'static [u8; 8] = b"RSTABLE1";

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + 8 * self.max_q * (self.max_q + 1) / 2);
        buf.extend_from_slice(Self::MAGIC);
        buf.extend_from_slice(&(self.max_q as u64).to_le_bytes());
        for row in &self.rows {
            for &v in row {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Decode a serialized table. Untrusted input: every length is checked,
    /// and the period-sum identity is validated on three rows before the
    /// table is trusted.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let fail = |msg: &str| Error::Validation(format!("table cache: {msg}"));
        if bytes.len() < 16 || &bytes[..8] != Self::MAGIC {
            return Err(fail("bad magic or truncated header"));
        }
        let max_q = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        if max_q == 0 || max_q > (1 << 24) {
            return Err(fail("max_q out of range"));
        }
        let max_q = max_q as usize;
        let cells = max_q * (max_q + 1) / 2;
        if bytes.len() != 16 + 8 * cells {
            return Err(fail("payload length does not match max_q"));
        }
        let mut rows = Vec::with_capacity(max_q);
        let mut off = 16;
        for q in 1..=max_q {
            let row: Vec<i64> = (0..q)
                .map(|i| {
                    let s = off + 8 * i;
                    i64::from_le_bytes(bytes[s..s + 8].try_into().unwrap())
                })
                .collect();
            off += 8 * q;
            rows.push(row);
        }
        let table = RamanujanTable { max_q, rows };
        // Spot-check the period-sum identity on three rows spread across the
        // table; a corrupt cache must not be trusted.
        for q in [max_q, max_q / 2 + 1, 2] {
            if q >= 2 && q <= max_q {
                let sum: i64 = table.row(q).iter().sum();
                if sum != 0 {
                    return Err(fail(&format!("row {q} period sum is {sum}, want 0")));
                }
            }
        }
        if table.get(1, 1) != 1 {
            return Err(fail("c_1(1) != 1"));
        }
        Ok(table)
    }
}
