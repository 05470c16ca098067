//! Dense Ramanujan-sum basis construction, forward/inverse RFT, per-nucleotide
//! spectra, power spectra, and a reference DFT.
//!
//! The basis is the N-by-N matrix `R(q,j) = c_q((j-1 mod q) + 1) / (phi(q) N)`.
//! Building it is O(N^2) time and space, so basis construction is capped and
//! built matrices are cached per length and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::numtheory::{euler_totient, RamanujanTable};
use crate::seqmodel::IndicatorSet;
use crate::{fmt_sig12, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Rft,
    Dft,
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumKind::Rft => write!(f, "rft"),
            SpectrumKind::Dft => write!(f, "dft"),
        }
    }
}

/// Default hard cap on basis dimension; an N-by-N dense matrix beyond this
/// would silently eat memory on whole-genome input.
pub const DEFAULT_MAX_BASIS_N: usize = 16384;

/// The N-by-N Ramanujan-sum basis matrix, with a lazily computed inverse.
pub struct RftBasis {
    n: usize,
    matrix: DMatrix<f64>,
    inverse: OnceLock<std::result::Result<DMatrix<f64>, String>>,
}

impl RftBasis {
    /// Populate the basis from a precomputed Ramanujan table.
    pub fn build(n: usize, table: &RamanujanTable) -> Result<Self> {
        Self::build_capped(n, table, DEFAULT_MAX_BASIS_N)
    }

    pub fn build_capped(n: usize, table: &RamanujanTable, max_n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("basis dimension must be >= 1".into()));
        }
        if n > max_n {
            return Err(Error::Resource(format!(
                "basis dimension {n} exceeds the cap of {max_n}; dense transforms are \
                 O(N^2) and are not intended for whole-genome input"
            )));
        }
        if table.max_q() < n {
            return Err(Error::InvalidArgument(format!(
                "table covers q <= {}, need q <= {n}",
                table.max_q()
            )));
        }
        let nf = n as f64;
        let matrix = DMatrix::from_fn(n, n, |row, col| {
            let q = row + 1;
            let j = col + 1;
            table.get(q, j) as f64 / (euler_totient(q as u64) as f64 * nf)
        });
        Ok(RftBasis {
            n,
            matrix,
            inverse: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn inverse(&self) -> Result<&DMatrix<f64>> {
        let cell = self.inverse.get_or_init(|| {
            let inv = self
                .matrix
                .clone()
                .lu()
                .try_inverse()
                .ok_or_else(|| format!("LU inversion failed for N={}", self.n))?;
            // Round-trip residual guards against ill-conditioning.
            let residual = (&self.matrix * &inv - DMatrix::<f64>::identity(self.n, self.n))
                .abs()
                .max();
            if residual > 1e-8 {
                return Err(format!(
                    "inverse residual {residual:e} exceeds 1e-8 for N={}",
                    self.n
                ));
            }
            Ok(inv)
        });
        cell.as_ref().map_err(|msg| Error::Singular(msg.clone()))
    }
}

/// Transform output: real coefficients for RFT, complex for DFT.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Rft(Vec<f64>),
    Dft(Vec<Complex64>),
}

impl Spectrum {
    pub fn kind(&self) -> SpectrumKind {
        match self {
            Spectrum::Rft(_) => SpectrumKind::Rft,
            Spectrum::Dft(_) => SpectrumKind::Dft,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Spectrum::Rft(v) => v.len(),
            Spectrum::Dft(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rft_coeffs(&self) -> Option<&[f64]> {
        match self {
            Spectrum::Rft(v) => Some(v),
            Spectrum::Dft(_) => None,
        }
    }
}

pub fn rft_forward(x: &[f64], basis: &RftBasis) -> Result<Spectrum> {
    if x.len() != basis.n {
        return Err(Error::Dimension {
            expected: basis.n,
            got: x.len(),
        });
    }
    let xv = nalgebra::DVector::from_column_slice(x);
    let y = &basis.matrix * xv;
    Ok(Spectrum::Rft(y.as_slice().to_vec()))
}

pub fn rft_inverse(y: &Spectrum, basis: &RftBasis) -> Result<Vec<f64>> {
    let coeffs = y
        .rft_coeffs()
        .ok_or_else(|| Error::InvalidArgument("rft_inverse needs an RFT spectrum".into()))?;
    if coeffs.len() != basis.n {
        return Err(Error::Dimension {
            expected: basis.n,
            got: coeffs.len(),
        });
    }
    let inv = basis.inverse()?;
    let yv = nalgebra::DVector::from_column_slice(coeffs);
    let x = inv * yv;
    Ok(x.as_slice().to_vec())
}

/// RFT of each of the four indicator signals, in A, T, C, G order.
pub fn rft_spectra(ind: &IndicatorSet, basis: &RftBasis) -> Result<[Spectrum; 4]> {
    let [a, t, c, g] = ind.signals();
    Ok([
        rft_forward(a, basis)?,
        rft_forward(t, basis)?,
        rft_forward(c, basis)?,
        rft_forward(g, basis)?,
    ])
}

/// Per-sequence signature vector: nonnegative, one value per index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSpectrum {
    pub kind: SpectrumKind,
    pub n: usize,
    /// Index 1 (RFT q=1 / DFT k=0) is always stored; plotting may skip it.
    pub includes_first_term: bool,
    pub values: Vec<f64>,
}

/// RFT power spectrum: PS(q) is the sum of *absolute values* (not squares)
/// of the four per-nucleotide coefficients at q.
pub fn rft_power_spectrum(spectra: &[Spectrum; 4]) -> Result<PowerSpectrum> {
    let n = spectra[0].len();
    let mut values = vec![0.0; n];
    for s in spectra {
        let coeffs = s.rft_coeffs().ok_or_else(|| {
            Error::InvalidArgument("rft_power_spectrum given a DFT spectrum".into())
        })?;
        if coeffs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: coeffs.len(),
            });
        }
        for (acc, &v) in values.iter_mut().zip(coeffs) {
            *acc += v.abs();
        }
    }
    Ok(PowerSpectrum {
        kind: SpectrumKind::Rft,
        n,
        includes_first_term: true,
        values,
    })
}

/// DFT with the 1-based time index convention: U(k) = sum_{n=1..N} x(n) w^{kn}.
///
/// Computed by FFT over the 0-based layout and then twisted by the
/// unit-modulus factor exp(-2 pi i k / N); magnitudes are unaffected.
pub fn dft_forward(x: &[f64]) -> Spectrum {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let theta = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
        *v *= Complex64::from_polar(1.0, theta);
    }
    Spectrum::Dft(buf)
}

/// DFT power spectrum: PS(k) is the sum of *squared magnitudes* of the four
/// per-nucleotide coefficients at k.
pub fn dft_power_spectrum(spectra: &[Spectrum; 4]) -> Result<PowerSpectrum> {
    let n = spectra[0].len();
    let mut values = vec![0.0; n];
    for s in spectra {
        let coeffs = match s {
            Spectrum::Dft(v) => v,
            Spectrum::Rft(_) => {
                return Err(Error::InvalidArgument(
                    "dft_power_spectrum given an RFT spectrum".into(),
                ))
            }
        };
        if coeffs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: coeffs.len(),
            });
        }
        for (acc, v) in values.iter_mut().zip(coeffs) {
            *acc += v.norm_sqr();
        }
    }
    Ok(PowerSpectrum {
        kind: SpectrumKind::Dft,
        n,
        includes_first_term: true,
        values,
    })
}

impl PowerSpectrum {
    /// Value at a paper-convention index: RFT q is 1-based, DFT k is 0-based.
    pub fn at(&self, index: usize) -> f64 {
        match self.kind {
            SpectrumKind::Rft => self.values[index - 1],
            SpectrumKind::Dft => self.values[index],
        }
    }

    /// Indices eligible for peak search: RFT q in [1 or 2, N]; DFT k in
    /// [1, floor(N/2)] (real input, symmetric spectrum, k=0 is the mean).
    fn eligible_indices(&self, skip_first: bool) -> Vec<usize> {
        match self.kind {
            SpectrumKind::Rft => {
                let start = if skip_first { 2 } else { 1 };
                (start..=self.n).collect()
            }
            SpectrumKind::Dft => (1..=self.n / 2).collect(),
        }
    }
}

/// Indices of the `top` largest power-spectrum values, descending; ties
/// break toward the smaller index. Returns fewer than `top` if the eligible
/// range is shorter.
pub fn peak_indices(ps: &PowerSpectrum, top: usize, skip_first: bool) -> Vec<usize> {
    let mut idx = ps.eligible_indices(skip_first);
    idx.sort_by(|&a, &b| {
        ps.at(b)
            .partial_cmp(&ps.at(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(top);
    idx
}

/// Shared per-length basis cache. One build wins; concurrent requests for
/// the same N wait on the lock and reuse the finished matrix.
pub struct BasisCache {
    max_n: usize,
    inner: Mutex<CacheInner>,
}

struct CacheInner {
    table: Option<Arc<RamanujanTable>>,
    bases: HashMap<usize, Arc<RftBasis>>,
}

impl Default for BasisCache {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_BASIS_N)
    }
}

impl BasisCache {
    pub fn new(max_n: usize) -> Self {
        BasisCache {
            max_n,
            inner: Mutex::new(CacheInner {
                table: None,
                bases: HashMap::new(),
            }),
        }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn get(&self, n: usize) -> Result<Arc<RftBasis>> {
        let mut inner = self.inner.lock().unwrap();
        if let Some(basis) = inner.bases.get(&n) {
            return Ok(Arc::clone(basis));
        }
        let need_table = match &inner.table {
            Some(t) => t.max_q() < n,
            None => true,
        };
        if need_table {
            if n > self.max_n {
                return Err(Error::Resource(format!(
                    "basis dimension {n} exceeds the cap of {}",
                    self.max_n
                )));
            }
            inner.table = Some(Arc::new(RamanujanTable::build(n)?));
        }
        let table = Arc::clone(inner.table.as_ref().unwrap());
        let basis = Arc::new(RftBasis::build_capped(n, &table, self.max_n)?);
        inner.bases.insert(n, Arc::clone(&basis));
        Ok(basis)
    }
}

/// `index,value` CSV for one power spectrum, 12 significant digits.
pub fn power_spectrum_to_csv(ps: &PowerSpectrum, skip_first: bool, first_half: bool) -> String {
    let mut out = String::from("index,value\n");
    let indices: Vec<usize> = match ps.kind {
        SpectrumKind::Rft => {
            let start = if skip_first { 2 } else { 1 };
            (start..=ps.n).collect()
        }
        SpectrumKind::Dft => {
            let start = if skip_first { 1 } else { 0 };
            let end = if first_half { ps.n / 2 } else { ps.n - 1 };
            (start..=end).collect()
        }
    };
    for i in indices {
        out.push_str(&format!("{},{}\n", i, fmt_sig12(ps.at(i))));
    }
    out
}

/// `index,value_A,value_T,value_C,value_G` CSV for four per-nucleotide
/// RFT spectra.
pub fn spectra_to_csv(spectra: &[Spectrum; 4]) -> Result<String> {
    let n = spectra[0].len();
    let mut cols = Vec::new();
    for s in spectra {
        cols.push(s.rft_coeffs().ok_or_else(|| {
            Error::InvalidArgument("spectra_to_csv expects RFT spectra".into())
        })?);
    }
    let mut out = String::from("index,value_A,value_T,value_C,value_G\n");
    for i in 0..n {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            fmt_sig12(cols[0][i]),
            fmt_sig12(cols[1][i]),
            fmt_sig12(cols[2][i]),
            fmt_sig12(cols[3][i]),
        ));
    }
    Ok(out)
}
