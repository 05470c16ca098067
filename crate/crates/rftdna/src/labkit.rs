//! Experiment harness: synthetic periodic signals, seeded mutation
//! simulators, correlation statistics, and the RFT-vs-DFT benchmark.
//!
//! Every simulator is a pure function of (input, seed). The PRNG is
//! ChaCha8 (rand_chacha::ChaCha8Rng), fixed as part of the external
//! contract: golden experiment outputs depend on the exact stream.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::metric::{euclidean, rft_signature};
use crate::seqmodel::DnaRecord;
use crate::transform::{dft_forward, rft_forward, BasisCache};
use crate::{fmt_sig12, Error, Result};

pub const PRNG_NAME: &str = "ChaCha8";

/// The two-periodicity test signal: sin(2 pi t/10 + pi/4) + cos(2 pi t/20 + pi/4)
/// over t = 1..=n, plus seeded Gaussian noise of the given standard deviation.
pub fn synth_periodic(n: usize, noise_seed: u64, noise_amplitude: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let noise = Normal::new(0.0, noise_amplitude.max(0.0)).unwrap();
    (1..=n)
        .map(|t| {
            let t = t as f64;
            let clean = (2.0 * PI * t / 10.0 + PI / 4.0).sin()
                + (2.0 * PI * t / 20.0 + PI / 4.0).cos();
            if noise_amplitude > 0.0 {
                clean + noise.sample(&mut rng)
            } else {
                clean
            }
        })
        .collect()
}

const BASES: [u8; 4] = [b'A', b'C', b'G', b'T'];

/// Substitute exactly `count` distinct positions, each with a uniformly
/// chosen *different* base. Hamming distance to the input is exactly `count`.
pub fn mutate_point(rec: &DnaRecord, count: usize, seed: u64) -> Result<DnaRecord> {
    if count > rec.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot mutate {count} positions in a {}-bp sequence",
            rec.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<usize> = (0..rec.len()).collect();
    positions.shuffle(&mut rng);
    positions.truncate(count);
    positions.sort_unstable();
    let mut bases = rec.bases.clone().into_bytes();
    for &p in &positions {
        let old = bases[p];
        let choices: Vec<u8> = BASES.iter().copied().filter(|&b| b != old).collect();
        bases[p] = choices[rng.gen_range(0..choices.len())];
    }
    Ok(DnaRecord {
        id: format!("{}_m{}", rec.id, count),
        description: rec.description.clone(),
        bases: String::from_utf8(bases).unwrap(),
    })
}

/// Delete a contiguous suffix of `del_len` bases from the 3' end.
pub fn mutate_delete(rec: &DnaRecord, del_len: usize) -> Result<DnaRecord> {
    if del_len >= rec.len() {
        return Err(Error::InvalidArgument(format!(
            "deletion of {del_len} bp would not leave a nonempty {}-bp sequence",
            rec.len()
        )));
    }
    Ok(DnaRecord {
        id: format!("{}_d{}", rec.id, del_len),
        description: rec.description.clone(),
        bases: rec.bases[..rec.len() - del_len].to_string(),
    })
}

/// Sample Pearson correlation; `None` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Ok(None);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some(sxy / (sxx * syy).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Point,
    Deletion,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: MutationKind,
    pub seed: u64,
    pub prng: &'static str,
    pub base_id: String,
    pub base_length: usize,
    /// Mutation counts or deletion lengths.
    pub x_values: Vec<f64>,
    /// RFT distances to the original sequence.
    pub y_values: Vec<f64>,
    pub pearson_r: Option<f64>,
    pub pearson_defined: bool,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,distance\n");
        for (x, y) in self.x_values.iter().zip(&self.y_values) {
            out.push_str(&format!("{},{}\n", fmt_sig12(*x), fmt_sig12(*y)));
        }
        out
    }
}

/// One mutation series: for each step build a mutant (per-step seed derived
/// from the base seed) and record its RFT distance to the original. All
/// distances are taken in the original sequence's dimension M, which is the
/// pair maximum for both substitutions and 3'-deletions.
pub fn run_mutation_series(
    rec: &DnaRecord,
    kind: MutationKind,
    steps: &[usize],
    seed: u64,
    cache: &BasisCache,
) -> Result<ExperimentReport> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("steps must be nonempty".into()));
    }
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("steps must be increasing".into()));
    }
    let m = rec.len();
    let base_sig = rft_signature(rec, m, cache)?;
    let mut x_values = Vec::with_capacity(steps.len());
    let mut y_values = Vec::with_capacity(steps.len());
    for (idx, &step) in steps.iter().enumerate() {
        let mutant = match kind {
            MutationKind::Point => mutate_point(rec, step, seed.wrapping_add(idx as u64))?,
            MutationKind::Deletion => {
                if step == 0 {
                    rec.clone()
                } else {
                    mutate_delete(rec, step)?
                }
            }
        };
        let sig = rft_signature(&mutant, m, cache)?;
        let d = euclidean(&base_sig.values, &sig.values)?;
        x_values.push(step as f64);
        y_values.push(d);
    }
    let r = pearson(&x_values, &y_values)?;
    Ok(ExperimentReport {
        kind,
        seed,
        prng: PRNG_NAME,
        base_id: rec.id.clone(),
        base_length: rec.len(),
        pearson_defined: r.is_some(),
        pearson_r: r,
        x_values,
        y_values,
    })
}

/// Two-generation clade simulation: A and B are independent mutants of the
/// base at `rate` of its positions, then A1/A2 evolve from A and B1/B2 from
/// B at the same rate. All six keep the base length.
pub fn simulate_clades(base: &DnaRecord, rate: f64, seed: u64) -> Result<[DnaRecord; 6]> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mutation rate {rate} must be in (0, 1)"
        )));
    }
    let count = (rate * base.len() as f64).floor() as usize;
    let relabel = |mut rec: DnaRecord, id: &str| {
        rec.id = id.to_string();
        rec
    };
    let a = relabel(mutate_point(base, count, seed)?, "A");
    let b = relabel(mutate_point(base, count, seed.wrapping_add(1))?, "B");
    let a1 = relabel(mutate_point(&a, count, seed.wrapping_add(2))?, "A1");
    let a2 = relabel(mutate_point(&a, count, seed.wrapping_add(3))?, "A2");
    let b1 = relabel(mutate_point(&b, count, seed.wrapping_add(4))?, "B1");
    let b2 = relabel(mutate_point(&b, count, seed.wrapping_add(5))?, "B2");
    Ok([a, a1, a2, b, b1, b2])
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub rounds: usize,
    pub rft_build_seconds: f64,
    pub rft_apply_seconds: f64,
    pub dft_seconds: f64,
    /// rft_apply_seconds / dft_seconds
    pub ratio: f64,
    pub host: String,
}

/// Wall-clock timing of `rounds` forward transforms on a fixed random
/// binary input. Basis build time is reported separately from apply time.
pub fn benchmark_transforms(n: usize, rounds: usize, cache: &BasisCache) -> Result<BenchReport> {
    if n < 16 || rounds < 1 {
        return Err(Error::InvalidArgument(
            "benchmark needs n >= 16 and rounds >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE11C4);
    let x: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 }).collect();

    let t0 = Instant::now();
    let basis = cache.get(n)?;
    let rft_build_seconds = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    for _ in 0..rounds {
        std::hint::black_box(rft_forward(std::hint::black_box(&x), &basis)?);
    }
    let rft_apply_seconds = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    for _ in 0..rounds {
        std::hint::black_box(dft_forward(std::hint::black_box(&x)));
    }
    let dft_seconds = t0.elapsed().as_secs_f64();

    Ok(BenchReport {
        n,
        rounds,
        rft_build_seconds,
        rft_apply_seconds,
        dft_seconds,
        ratio: rft_apply_seconds / dft_seconds,
        host: host_description(),
    })
}

fn host_description() -> String {
    format!(
        "{} {} ({} logical cpus)",
        std::env::consts::OS,
        std::env::consts::ARCH,
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    )
}

/// Per-apply RFT seconds at length `n`, repeated until the measurement
/// window is at least `min_seconds` long.
pub fn measured_apply_seconds(n: usize, min_seconds: f64, cache: &BasisCache) -> Result<f64> {
    let basis = cache.get(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CA1E);
    let x: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 }).collect();
    // warmup
    std::hint::black_box(rft_forward(&x, &basis)?);
    let mut rounds = 1usize;
    loop {
        let t0 = Instant::now();
        for _ in 0..rounds {
            std::hint::black_box(rft_forward(std::hint::black_box(&x), &basis)?);
        }
        let elapsed = t0.elapsed().as_secs_f64();
        if elapsed >= min_seconds {
            return Ok(elapsed / rounds as f64);
        }
        rounds = (rounds * 4).min(1 << 24);
    }
}

/// Least-squares slope of log(time) against log(n): the empirical
/// complexity exponent of the dense transform.
pub fn scaling_exponent(sizes: &[usize], seconds: &[f64]) -> Result<f64> {
    if sizes.len() != seconds.len() || sizes.len() < 2 {
        return Err(Error::InvalidArgument(
            "scaling fit needs matching series of length >= 2".into(),
        ));
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = seconds.iter().map(|&t| t.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Seeded exon-like sequence: strong period-3 base composition bias with
/// uniform noise, the generator behind the triangle-property study.
pub fn random_exonlike(len: usize, bias: f64, rng: &mut ChaCha8Rng) -> String {
    // codon-position-specific preferred bases
    let preferred = [b'G', b'C', b'T'];
    (0..len)
        .map(|i| {
            if rng.gen::<f64>() < bias {
                preferred[i % 3] as char
            } else {
                BASES[rng.gen_range(0..4)] as char
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{
        dft_power_spectrum, peak_indices, rft_power_spectrum, Spectrum,
    };

    #[test]
    fn synth_signal_deterministic_and_clean() {
        let clean = synth_periodic(100, 0, 0.0);
        let again = synth_periodic(100, 42, 0.0);
        assert_eq!(clean, again); // zero amplitude ignores the stream
        let expected_t1 = (2.0 * std::f64::consts::PI / 10.0 + std::f64::consts::PI / 4.0).sin()
            + (2.0 * std::f64::consts::PI / 20.0 + std::f64::consts::PI / 4.0).cos();
        assert!((clean[0] - expected_t1).abs() < 1e-12);

        let noisy1 = synth_periodic(100, 7, 0.3);
        let noisy2 = synth_periodic(100, 7, 0.3);
        assert_eq!(noisy1, noisy2);
        assert_ne!(noisy1, clean);
    }

    #[test]
    fn synth_signal_peaks() {
        let cache = BasisCache::new(256);
        let x = synth_periodic(100, 0, 0.0);
        let basis = cache.get(100).unwrap();
        let y = rft_forward(&x, &basis).unwrap();
        let four = [y.clone(), Spectrum::Rft(vec![0.0; 100]), Spectrum::Rft(vec![0.0; 100]), Spectrum::Rft(vec![0.0; 100])];
        let ps = rft_power_spectrum(&four).unwrap();
        let mut peaks = peak_indices(&ps, 2, true);
        peaks.sort_unstable();
        assert_eq!(peaks, vec![10, 20]);

        let d = dft_forward(&x);
        let four = [d, dft_forward(&vec![0.0; 100]), dft_forward(&vec![0.0; 100]), dft_forward(&vec![0.0; 100])];
        let ps = dft_power_spectrum(&four).unwrap();
        let mut peaks = peak_indices(&ps, 2, true);
        peaks.sort_unstable();
        assert_eq!(peaks, vec![5, 10]);
    }

    fn hamming(a: &str, b: &str) -> usize {
        a.bytes().zip(b.bytes()).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn point_mutation_contract() {
        let rec = DnaRecord::new("base", "ACGT".repeat(50));
        let same = mutate_point(&rec, 0, 1).unwrap();
        assert_eq!(same.bases, rec.bases);

        for count in [1usize, 17, 100, 200] {
            let m = mutate_point(&rec, count, 9).unwrap();
            assert_eq!(m.len(), rec.len());
            assert_eq!(hamming(&rec.bases, &m.bases), count, "count {count}");
        }
        let a = mutate_point(&rec, 13, 4).unwrap();
        let b = mutate_point(&rec, 13, 4).unwrap();
        assert_eq!(a.bases, b.bases);
        assert!(mutate_point(&rec, 201, 0).is_err());
    }

    #[test]
    fn deletion_contract() {
        let rec = DnaRecord::new("x", "ACGT");
        assert_eq!(mutate_delete(&rec, 1).unwrap().bases, "ACG");
        assert_eq!(mutate_delete(&rec, 3).unwrap().bases, "A");
        assert!(mutate_delete(&rec, 4).is_err());
    }

    #[test]
    fn pearson_basics() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap().unwrap() + 1.0).abs() < 1e-12);
        let flat = vec![1.0; 10];
        assert!(pearson(&x, &flat).unwrap().is_none());
        assert!(pearson(&[1.0], &[1.0]).unwrap().is_none());
    }

    #[test]
    fn pearson_independent_streams_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let x: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let y: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let r = pearson(&x, &y).unwrap().unwrap();
        assert!(r.abs() < 0.1, "r = {r}");
    }

    #[test]
    fn series_step_zero_flags_undefined_r() {
        let cache = BasisCache::new(128);
        let rec = DnaRecord::new("b", "ACGT".repeat(8));
        let report =
            run_mutation_series(&rec, MutationKind::Point, &[0], 5, &cache).unwrap();
        assert_eq!(report.y_values, vec![0.0]);
        assert!(!report.pearson_defined);
        assert!(report.pearson_r.is_none());
    }

    #[test]
    fn series_distances_positive_and_deterministic() {
        let cache = BasisCache::new(256);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bases: String = (0..200).map(|_| BASES[rng.gen_range(0..4)] as char).collect();
        let rec = DnaRecord::new("b", bases);
        let steps = [1usize, 5, 10, 20];
        let r1 = run_mutation_series(&rec, MutationKind::Point, &steps, 7, &cache).unwrap();
        let r2 = run_mutation_series(&rec, MutationKind::Point, &steps, 7, &cache).unwrap();
        assert_eq!(r1.y_values, r2.y_values);
        assert!(r1.y_values.iter().all(|&d| d > 0.0));

        let rd = run_mutation_series(&rec, MutationKind::Deletion, &steps, 7, &cache).unwrap();
        assert!(rd.y_values.iter().all(|&d| d > 0.0));
        assert!(run_mutation_series(&rec, MutationKind::Point, &[], 7, &cache).is_err());
        assert!(run_mutation_series(&rec, MutationKind::Point, &[3, 1], 7, &cache).is_err());
    }

    #[test]
    fn clade_simulation_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bases: String = (0..300).map(|_| BASES[rng.gen_range(0..4)] as char).collect();
        let base = DnaRecord::new("base", bases);
        let six = simulate_clades(&base, 0.1, 11).unwrap();
        let ids: Vec<&str> = six.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["A", "A1", "A2", "B", "B1", "B2"]);
        assert!(six.iter().all(|r| r.len() == base.len()));
        let again = simulate_clades(&base, 0.1, 11).unwrap();
        for (x, y) in six.iter().zip(&again) {
            assert_eq!(x.bases, y.bases);
        }
        // degenerate: rate small enough that count = 0
        let six = simulate_clades(&base, 0.001, 11).unwrap();
        assert!(six.iter().all(|r| r.bases == base.bases));
        assert!(simulate_clades(&base, 1.5, 0).is_err());
    }

    #[test]
    fn benchmark_produces_finite_timings() {
        let cache = BasisCache::new(128);
        let report = benchmark_transforms(64, 1, &cache).unwrap();
        assert!(report.rft_apply_seconds.is_finite() && report.rft_apply_seconds > 0.0);
        assert!(report.dft_seconds.is_finite() && report.dft_seconds > 0.0);
        assert!(benchmark_transforms(8, 1, &cache).is_err());
    }

    #[test]
    fn scaling_exponent_of_exact_quadratic() {
        let sizes = [256usize, 512, 1024, 2048];
        let times: Vec<f64> = sizes.iter().map(|&n| 3e-9 * (n * n) as f64).collect();
        let e = scaling_exponent(&sizes, &times).unwrap();
        assert!((e - 2.0).abs() < 1e-9);
    }
}
