//! End-to-end acceptance suite. Each test prints one pass line after its
//! assertions hold at the stated tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rftdna::fixtures;
use rftdna::labkit::{
    measured_apply_seconds, random_exonlike, run_mutation_series, scaling_exponent,
    simulate_clades, synth_periodic, MutationKind,
};
use rftdna::metric::{pairwise_distances, triangle_slack, DistanceMethod};
use rftdna::numtheory::{euler_totient, moebius, ramanujan_sum, ramanujan_sum_direct};
use rftdna::phylo::upgma;
use rftdna::seqmodel::{to_indicators, DnaRecord};
use rftdna::transform::{
    dft_forward, dft_power_spectrum, peak_indices, rft_forward, rft_inverse, rft_power_spectrum,
    rft_spectra, BasisCache, Spectrum,
};

const SEED: u64 = 1;

fn cache() -> BasisCache {
    BasisCache::default()
}

/// Direct evaluation of the basis definition, independent of the matrix path.
fn direct_rft(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (1..=n)
        .map(|q| {
            let scale = 1.0 / (euler_totient(q as u64) as f64 * n as f64);
            (1..=n)
                .map(|j| scale * ramanujan_sum(q as u64, ((j - 1) % q + 1) as u64) as f64 * x[j - 1])
                .sum()
        })
        .collect()
}

#[test]
fn criterion_01_fibonacci_golden_vector() {
    let fib = [1.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0];
    let printed = [
        14.3, 3.3, -0.55, -4.0, 3.925, -5.85, -0.8667, 1.8, 2.9, 5.425,
    ];
    let cache = cache();
    let basis = cache.get(10).unwrap();
    let y = rft_forward(&fib, &basis).unwrap();
    let coeffs = y.rft_coeffs().unwrap();
    let direct = direct_rft(&fib);
    for i in 0..10 {
        assert!(
            (coeffs[i] - printed[i]).abs() < 1e-3,
            "printed value mismatch at {i}: {} vs {}",
            coeffs[i],
            printed[i]
        );
        assert!(
            (coeffs[i] - direct[i]).abs() < 1e-12,
            "direct-evaluation mismatch at {i}"
        );
    }
    println!("ACCEPTANCE 1 fibonacci golden vector: pass");
}

#[test]
fn criterion_02_ramanujan_sum_identities() {
    for q in 1..=200u64 {
        for n in 1..=200u64 {
            let exact = ramanujan_sum(q, n) as f64;
            let direct = ramanujan_sum_direct(q, n).unwrap();
            assert!(
                (exact - direct).abs() < 1e-6,
                "closed form vs exponential sum at q={q}, n={n}"
            );
        }
    }
    for q in 1..=500u64 {
        assert_eq!(ramanujan_sum(q, 1), moebius(q), "c_q(1) = mu(q) at q={q}");
        assert_eq!(
            ramanujan_sum(q, q),
            euler_totient(q) as i64,
            "c_q(q) = phi(q) at q={q}"
        );
        for n in 1..=q {
            assert_eq!(
                ramanujan_sum(q, n),
                ramanujan_sum(q, n + q),
                "periodicity at q={q}, n={n}"
            );
        }
        if q > 1 {
            let period_sum: i64 = (1..=q).map(|n| ramanujan_sum(q, n)).sum();
            assert_eq!(period_sum, 0, "period sum at q={q}");
        }
    }
    println!("ACCEPTANCE 2 ramanujan sum oracle equivalence and identities: pass");
}

#[test]
fn criterion_03_inverse_round_trip() {
    let cache = cache();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for &n in &[10usize, 64, 101, 654] {
        let basis = cache.get(n).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..n)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                .collect();
            let y = rft_forward(&x, &basis).unwrap();
            let back = rft_inverse(&y, &basis).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).abs() < 1e-8, "round trip at N={n}");
            }
        }
    }
    println!("ACCEPTANCE 3 inverse round trip at N in {{10, 64, 101, 654}}: pass");
}

fn top2_peaks(x: &[f64], cache: &BasisCache) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let basis = cache.get(n).unwrap();
    let y = rft_forward(x, basis.as_ref()).unwrap();
    let zero = || Spectrum::Rft(vec![0.0; n]);
    let rft_ps = rft_power_spectrum(&[y, zero(), zero(), zero()]).unwrap();
    let mut rft = peak_indices(&rft_ps, 2, true);
    rft.sort_unstable();

    let dzero = || dft_forward(&vec![0.0; n]);
    let dft_ps = dft_power_spectrum(&[dft_forward(x), dzero(), dzero(), dzero()]).unwrap();
    let mut dft = peak_indices(&dft_ps, 2, true);
    dft.sort_unstable();
    (rft, dft)
}

#[test]
fn criterion_04_hidden_periodicity() {
    let cache = cache();
    let clean = synth_periodic(100, SEED, 0.0);
    let (rft, dft) = top2_peaks(&clean, &cache);
    assert_eq!(rft, vec![10, 20], "noiseless RFT peaks");
    assert_eq!(dft, vec![5, 10], "noiseless DFT peaks");

    let noisy = synth_periodic(100, SEED, 0.5);
    let (rft, dft) = top2_peaks(&noisy, &cache);
    assert_eq!(rft, vec![10, 20], "sigma=0.5 RFT peaks");
    assert_eq!(dft, vec![5, 10], "sigma=0.5 DFT peaks");
    println!("ACCEPTANCE 4 hidden periodicity (noiseless and sigma=0.5): pass");
}

fn power_spectra(rec: &DnaRecord, cache: &BasisCache) -> (Vec<f64>, Vec<f64>) {
    let ind = to_indicators(rec);
    let basis = cache.get(rec.len()).unwrap();
    let rft_ps = rft_power_spectrum(&rft_spectra(&ind, &basis).unwrap()).unwrap();
    let spectra: [Spectrum; 4] = [
        dft_forward(&ind.u_a),
        dft_forward(&ind.u_t),
        dft_forward(&ind.u_c),
        dft_forward(&ind.u_g),
    ];
    let dft_ps = dft_power_spectrum(&spectra).unwrap();
    (rft_ps.values, dft_ps.values)
}

#[test]
fn criterion_05_exon_intron_periodicity() {
    let cache = cache();
    let exon = fixtures::exon_record().unwrap();
    assert_eq!(exon.len(), 386);
    let (rft, dft) = power_spectra(&exon, &cache);
    // RFT arg-max over q in [2, N] is exactly 3
    let argmax_q = (2..=386)
        .max_by(|&a, &b| rft[a - 1].partial_cmp(&rft[b - 1]).unwrap())
        .unwrap();
    assert_eq!(argmax_q, 3, "exon RFT peak");
    // DFT arg-max over the first half is round(N/3)
    let argmax_k = (1..=193)
        .max_by(|&a, &b| dft[a].partial_cmp(&dft[b]).unwrap())
        .unwrap();
    assert_eq!(argmax_k, (386.0f64 / 3.0).round() as usize, "exon DFT peak");

    let intron = fixtures::intron_record().unwrap();
    assert_eq!(intron.len(), 654);
    let (rft, _) = power_spectra(&intron, &cache);
    let max_rest = (2..=654)
        .filter(|&q| q != 3)
        .map(|q| rft[q - 1])
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(rft[2] < max_rest, "intron must not peak at q=3");
    println!("ACCEPTANCE 5 exon 3-base periodicity present, intron absent: pass");
}

#[test]
fn criterion_06_mutation_linearity() {
    let cache = cache();
    let base = fixtures::intron_record().unwrap();
    let point_steps: Vec<usize> = (1..=100).step_by(5).collect();
    let point = run_mutation_series(&base, MutationKind::Point, &point_steps, SEED, &cache).unwrap();
    let r = point.pearson_r.expect("pearson defined");
    assert!(r > 0.9, "point-mutation pearson r = {r}");

    let del_steps: Vec<usize> = (1..=100).collect();
    let del = run_mutation_series(&base, MutationKind::Deletion, &del_steps, SEED, &cache).unwrap();
    let rd = del.pearson_r.expect("pearson defined");
    assert!(rd > 0.9, "deletion pearson r = {rd}");
    println!("ACCEPTANCE 6 mutation linearity (point r={r:.4}, deletion r={rd:.4}): pass");
}

#[test]
fn criterion_07_metric_axioms() {
    let cache = cache();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let records: Vec<DnaRecord> = (0..200)
        .map(|i| {
            let len = rng.gen_range(200..500);
            DnaRecord::new(format!("exon{i:03}"), random_exonlike(len, 0.5, &mut rng))
        })
        .collect();
    let matrix = pairwise_distances(&records, DistanceMethod::Rft, &cache).unwrap();
    // symmetry, zero diagonal, non-negativity
    matrix.validate().unwrap();
    // triangle inequality over 1e5 sampled triples
    let n = matrix.n();
    let mut checked = 0usize;
    let mut min_slack = f64::INFINITY;
    while checked < 100_000 {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || j == k || i == k {
            continue;
        }
        min_slack = min_slack.min(triangle_slack(&matrix, i, j, k));
        checked += 1;
    }
    assert!(min_slack >= -1e-9, "min triangle slack {min_slack}");
    println!("ACCEPTANCE 7 metric axioms over 200 sequences (min slack {min_slack:.3e}): pass");
}

#[test]
fn criterion_08_simulated_clade_recovery() {
    let cache = cache();
    let base = fixtures::intron_record().unwrap();
    let six = simulate_clades(&base, 0.1, SEED).unwrap();
    let matrix = pairwise_distances(&six, DistanceMethod::Rft, &cache).unwrap();
    let tree = upgma(&matrix).unwrap();
    assert!(tree.has_clade(&["A", "A1", "A2"]), "A clade");
    assert!(tree.has_clade(&["B", "B1", "B2"]), "B clade");
    println!("ACCEPTANCE 8 simulated clade recovery: pass");
}

#[test]
fn criterion_09_influenza_subtype_grouping() {
    let cache = cache();
    let records = fixtures::influenza_records().unwrap();
    assert_eq!(records.len(), 31);
    let matrix = pairwise_distances(&records, DistanceMethod::Rft, &cache).unwrap();
    let tree = upgma(&matrix).unwrap();
    for subtype in ["H1N1", "H3N2", "H7N9", "H11N9"] {
        let members = fixtures::subtype_members(subtype);
        assert!(tree.has_clade(&members), "{subtype} must form a clade");
    }
    println!("ACCEPTANCE 9 influenza subtype grouping (31 records, 4 clades): pass");
}

#[test]
fn criterion_10_complexity_scaling() {
    let cache = cache();
    let sizes = [256usize, 512, 1024, 2048];
    let times: Vec<f64> = sizes
        .iter()
        .map(|&n| measured_apply_seconds(n, 0.05, &cache).unwrap())
        .collect();
    let exponent = scaling_exponent(&sizes, &times).unwrap();
    assert!(
        (1.6..=2.4).contains(&exponent),
        "scaling exponent {exponent} outside [1.6, 2.4]; times {times:?}"
    );

    let report = rftdna::labkit::benchmark_transforms(654, 500, &cache).unwrap();
    assert!(
        report.rft_apply_seconds > report.dft_seconds,
        "RFT ({}) should cost more than DFT ({}) at n=654 over 500 rounds",
        report.rft_apply_seconds,
        report.dft_seconds
    );
    println!(
        "ACCEPTANCE 10 complexity scaling (exponent {exponent:.2}, rft/dft ratio {:.1}): pass",
        report.ratio
    );
}
