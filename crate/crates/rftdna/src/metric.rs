//! Pairwise RFT distances: pad each sequence's indicators to the set maximum
//! length M, transform, reduce to the summed-absolute power spectrum, and take
//! Euclidean distances in the shared M-dimensional space.

use rayon::prelude::*;

use crate::seqmodel::{pad_to, to_indicators, DnaRecord};
use crate::transform::{
    dft_forward, dft_power_spectrum, rft_power_spectrum, rft_spectra, BasisCache, PowerSpectrum,
    Spectrum,
};
use crate::{fmt_sig12, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMethod {
    Rft,
    Dft,
}

impl std::str::FromStr for DistanceMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rft" => Ok(DistanceMethod::Rft),
            "dft" => Ok(DistanceMethod::Dft),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// The comparison signature of one record at comparison length `m`:
/// indicators, zero-padded to m, transformed, summed-absolute power spectrum.
/// The first term is included; it is needed to recover the original signal.
pub fn rft_signature(rec: &DnaRecord, m: usize, cache: &BasisCache) -> Result<PowerSpectrum> {
    if rec.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "record '{}' has length 0",
            rec.id
        )));
    }
    if m < rec.len() {
        return Err(Error::InvalidArgument(format!(
            "comparison length {m} is shorter than record '{}' ({})",
            rec.id,
            rec.len()
        )));
    }
    let ind = pad_to(&to_indicators(rec), m)?;
    let basis = cache.get(m)?;
    let spectra = rft_spectra(&ind, &basis)?;
    rft_power_spectrum(&spectra)
}

/// DFT variant of the signature, kept for comparison runs.
pub fn dft_signature(rec: &DnaRecord, m: usize) -> Result<PowerSpectrum> {
    if rec.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "record '{}' has length 0",
            rec.id
        )));
    }
    let ind = pad_to(&to_indicators(rec), m)?;
    let spectra: [Spectrum; 4] = [
        dft_forward(&ind.u_a),
        dft_forward(&ind.u_t),
        dft_forward(&ind.u_c),
        dft_forward(&ind.u_g),
    ];
    dft_power_spectrum(&spectra)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    /// Row-major n*n symmetric values, zero diagonal.
    pub values: Vec<f64>,
    pub method: DistanceMethod,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    /// Symmetry, zero diagonal, non-negativity. Cheap; run on every
    /// produced or ingested matrix.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.values.len() != n * n {
            return Err(Error::Validation(format!(
                "matrix has {} values for {} labels",
                self.values.len(),
                n
            )));
        }
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Validation(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::Validation(format!("bad entry at ({i},{j}): {a}")));
                }
                if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                    return Err(Error::Validation(format!(
                        "asymmetry at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Square CSV with a label header row and leading label column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for i in 0..self.n() {
            out.push_str(&self.labels[i]);
            for j in 0..self.n() {
                out.push(',');
                out.push_str(&fmt_sig12(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    /// PHYLIP square distance format.
    pub fn to_phylip(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for i in 0..self.n() {
            out.push_str(&self.labels[i]);
            for j in 0..self.n() {
                out.push(' ');
                out.push_str(&fmt_sig12(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: "header has no labels".into(),
            });
        }
        let mut values = vec![0.0; n * n];
        let mut rows = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let label = fields.next().unwrap_or("");
            if rows >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "more rows than labels".into(),
                });
            }
            if label != labels[rows] {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("row label '{label}' does not match header '{}'", labels[rows]),
                });
            }
            let mut count = 0usize;
            for (j, field) in fields.enumerate() {
                if j >= n {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "too many columns".into(),
                    });
                }
                values[rows * n + j] = field.trim().parse().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad number '{field}': {e}"),
                })?;
                count += 1;
            }
            if count != n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {n} columns, got {count}"),
                });
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {n} rows, got {rows}"),
            });
        }
        let m = DistanceMatrix {
            labels,
            values,
            method: DistanceMethod::Rft,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_phylip(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let n: usize = first.trim().parse().map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad taxon count '{first}': {e}"),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: "taxon count must be >= 1".into(),
            });
        }
        if n > 1_000_000 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("taxon count {n} is implausibly large"),
            });
        }
        let mut labels = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * n);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if labels.len() == n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "more rows than the declared taxon count".into(),
                });
            }
            let mut fields = line.split_whitespace();
            let label = fields.next().ok_or(Error::Parse {
                line: lineno,
                msg: "missing label".into(),
            })?;
            labels.push(label.to_string());
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad number '{f}': {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {n} values, got {}", row.len()),
                });
            }
            values.extend(row);
        }
        if labels.len() != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {n} rows, got {}", labels.len()),
            });
        }
        let m = DistanceMatrix {
            labels,
            values,
            method: DistanceMethod::Rft,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Full pairwise matrix. The comparison length M is the maximum record
/// length in the set, so every signature lives in the same space; signatures
/// are computed once per record and distances fanned out over pairs.
pub fn pairwise_distances(
    records: &[DnaRecord],
    method: DistanceMethod,
    cache: &BasisCache,
) -> Result<DistanceMatrix> {
    if records.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 records for a distance matrix".into(),
        ));
    }
    if let Some(empty) = records.iter().find(|r| r.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "record '{}' has length 0",
            empty.id
        )));
    }
    let m = records.iter().map(DnaRecord::len).max().unwrap();
    // Build (or fetch) the shared basis up front so workers only read.
    if method == DistanceMethod::Rft {
        cache.get(m)?;
    }
    let signatures: Vec<PowerSpectrum> = records
        .par_iter()
        .map(|rec| match method {
            DistanceMethod::Rft => rft_signature(rec, m, cache),
            DistanceMethod::Dft => dft_signature(rec, m),
        })
        .collect::<Result<_>>()?;
    let n = records.len();
    let mut values = vec![0.0; n * n];
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| euclidean(&signatures[i].values, &signatures[j].values))
        .collect::<Result<_>>()?;
    for (&(i, j), d) in pairs.iter().zip(dists) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    let matrix = DistanceMatrix {
        labels: records.iter().map(|r| r.id.clone()).collect(),
        values,
        method,
    };
    matrix.validate()?;
    Ok(matrix)
}

/// Triangle-inequality audit: for every triple, slack is
/// `(d1 + d2) - d3` with d3 the largest of the three distances. A metric
/// gives slack >= 0; callers assert slack >= -1e-9 to absorb rounding.
pub fn audit_triangle(matrix: &DistanceMatrix) -> Vec<((usize, usize, usize), f64)> {
    let n = matrix.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push(((i, j, k), triangle_slack(matrix, i, j, k)));
            }
        }
    }
    out
}

pub fn triangle_slack(matrix: &DistanceMatrix, i: usize, j: usize, k: usize) -> f64 {
    let mut d = [matrix.get(i, j), matrix.get(i, k), matrix.get(j, k)];
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (d[0] + d[1]) - d[2]
}
