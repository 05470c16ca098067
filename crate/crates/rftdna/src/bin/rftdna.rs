//! Command-line front end: spectra, distance matrices, UPGMA trees,
//! reproducible experiments, benchmarks, and accession fetching.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 embedded acceptance predicate failed.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rftdna::fixtures;
use rftdna::labkit::{
    self, benchmark_transforms, measured_apply_seconds, random_exonlike, run_mutation_series,
    scaling_exponent, simulate_clades, synth_periodic, MutationKind,
};
use rftdna::metric::{
    pairwise_distances, triangle_slack, DistanceMatrix, DistanceMethod as Method,
};
use rftdna::phylo::{to_newick, upgma};
use rftdna::seqmodel::{parse_fasta, serialize_fasta, to_indicators, DnaRecord, Fetcher};
use rftdna::transform::{
    dft_forward, dft_power_spectrum, peak_indices, power_spectrum_to_csv, rft_power_spectrum,
    rft_spectra, BasisCache, PowerSpectrum, Spectrum,
};

#[derive(Parser)]
#[command(name = "rftdna", version, about = "Alignment-free DNA comparison via the Ramanujan-Fourier transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rft,
    Dft,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Rft => Method::Rft,
            MethodArg::Dft => Method::Dft,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    Csv,
    Phylip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeInputFormat {
    Fasta,
    Csv,
    Phylip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Point,
    Deletion,
    Clades,
    Triangle,
    Synth,
}

#[derive(Args)]
struct CommonLimits {
    /// Hard cap on the dense transform dimension. Sequences longer than this
    /// are rejected; the dense transforms are O(N^2) and are not meant for
    /// whole genomes.
    #[arg(long, default_value_t = 16384)]
    max_n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Power spectrum of each sequence in a FASTA file, one CSV per record.
    Spectrum {
        /// FASTA path, or '-' for stdin.
        input: String,
        #[arg(long, value_enum, default_value = "rft")]
        method: MethodArg,
        /// Output directory for the per-record CSV files.
        #[arg(long)]
        out: PathBuf,
        /// Plot-data mode: omit the first term, and for DFT emit only the
        /// first half of the spectrum.
        #[arg(long)]
        skip_first_term: bool,
        #[command(flatten)]
        limits: CommonLimits,
    },
    /// Pairwise distance matrix over all sequences in a FASTA file.
    Distmat {
        input: String,
        #[arg(long, value_enum, default_value = "rft")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: MatrixFormat,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: CommonLimits,
    },
    /// UPGMA tree in Newick format, from sequences or a precomputed matrix.
    Tree {
        input: String,
        #[arg(long, value_enum, default_value = "fasta")]
        input_format: TreeInputFormat,
        #[arg(long, value_enum, default_value = "rft")]
        method: MethodArg,
        /// Decimal places for branch lengths.
        #[arg(long, default_value_t = 6)]
        decimals: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: CommonLimits,
    },
    /// Run a bundled experiment; exits 3 if its acceptance predicate fails.
    Experiment {
        #[arg(long, value_enum)]
        kind: ExperimentKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for report files.
        #[arg(long)]
        out: PathBuf,
        /// Gaussian noise sigma for the synth experiment.
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[command(flatten)]
        limits: CommonLimits,
    },
    /// Time repeated forward transforms and fit the scaling exponent.
    Bench {
        /// Comma-separated signal lengths.
        #[arg(long, value_delimiter = ',', default_values_t = vec![256usize, 512, 1024, 2048])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: CommonLimits,
    },
    /// Fetch accessions into the local cache and write them as FASTA.
    Fetch {
        ids: Vec<String>,
        #[arg(long, default_value = "cache")]
        cache_dir: PathBuf,
        /// Write combined FASTA here ('-' for stdout).
        #[arg(long, default_value = "-")]
        out: String,
        /// Never touch the network; fail on cold cache.
        #[arg(long)]
        offline: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version are success paths
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_fasta_input(input: &str) -> anyhow::Result<Vec<DnaRecord>> {
    let records = if input == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        parse_fasta(&buf[..])?
    } else {
        let f = std::fs::File::open(input)?;
        parse_fasta(f)?
    };
    Ok(records)
}

fn read_text(input: &str) -> anyhow::Result<String> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(input)?)
    }
}

/// Write a whole file atomically: temp file in the target directory, then
/// rename. No partial output survives an error.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::fs::write(tmp.path(), contents)?;
    tmp.persist(path)?;
    Ok(())
}

fn check_lengths(records: &[DnaRecord], max_n: usize) -> anyhow::Result<()> {
    for rec in records {
        if rec.len() > max_n {
            anyhow::bail!(
                "sequence '{}' is {} bp, above the --max-n cap of {max_n}; the dense \
                 transforms need an N-by-N matrix and cannot handle very long sequences",
                rec.id,
                rec.len()
            );
        }
    }
    Ok(())
}

fn sequence_power_spectrum(
    rec: &DnaRecord,
    method: Method,
    cache: &BasisCache,
) -> anyhow::Result<PowerSpectrum> {
    let ind = to_indicators(rec);
    let ps = match method {
        Method::Rft => {
            let basis = cache.get(rec.len())?;
            rft_power_spectrum(&rft_spectra(&ind, &basis)?)?
        }
        Method::Dft => {
            let spectra: [Spectrum; 4] = [
                dft_forward(&ind.u_a),
                dft_forward(&ind.u_t),
                dft_forward(&ind.u_c),
                dft_forward(&ind.u_g),
            ];
            dft_power_spectrum(&spectra)?
        }
    };
    Ok(ps)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Spectrum {
            input,
            method,
            out,
            skip_first_term,
            limits,
        } => {
            let records = read_fasta_input(&input)?;
            if records.is_empty() {
                anyhow::bail!("no records in input");
            }
            check_lengths(&records, limits.max_n)?;
            let cache = BasisCache::new(limits.max_n);
            let method: Method = method.into();
            // render everything before writing anything: no partial output
            let mut files = Vec::new();
            for rec in &records {
                let ps = sequence_power_spectrum(rec, method, &cache)?;
                let csv = power_spectrum_to_csv(&ps, skip_first_term, skip_first_term);
                let name = format!("{}_{}.csv", rec.id, method_name(method));
                files.push((out.join(name), csv));
            }
            for (path, csv) in files {
                write_atomic(&path, &csv)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Distmat {
            input,
            method,
            format,
            out,
            limits,
        } => {
            let records = read_fasta_input(&input)?;
            check_lengths(&records, limits.max_n)?;
            let cache = BasisCache::new(limits.max_n);
            let matrix = pairwise_distances(&records, method.into(), &cache)?;
            let text = match format {
                MatrixFormat::Csv => matrix.to_csv(),
                MatrixFormat::Phylip => matrix.to_phylip(),
            };
            write_atomic(&out, &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Tree {
            input,
            input_format,
            method,
            decimals,
            out,
            limits,
        } => {
            let matrix = match input_format {
                TreeInputFormat::Fasta => {
                    let records = read_fasta_input(&input)?;
                    check_lengths(&records, limits.max_n)?;
                    let cache = BasisCache::new(limits.max_n);
                    pairwise_distances(&records, method.into(), &cache)?
                }
                TreeInputFormat::Csv => DistanceMatrix::from_csv(&read_text(&input)?)?,
                TreeInputFormat::Phylip => DistanceMatrix::from_phylip(&read_text(&input)?)?,
            };
            let tree = upgma(&matrix)?;
            write_atomic(&out, &format!("{}\n", to_newick(&tree, decimals)))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Experiment {
            kind,
            seed,
            out,
            noise,
            limits,
        } => run_experiment(kind, seed, &out, noise, limits.max_n),

        Command::Bench { n, rounds, out, limits } => {
            let cache = BasisCache::new(limits.max_n);
            let mut reports = Vec::new();
            let mut per_apply = Vec::new();
            for &size in &n {
                let report = benchmark_transforms(size, rounds, &cache)?;
                per_apply.push(measured_apply_seconds(size, 0.05, &cache)?);
                reports.push(report);
            }
            let exponent = if n.len() >= 2 {
                Some(scaling_exponent(&n, &per_apply)?)
            } else {
                None
            };
            let doc = json!({
                "rounds": rounds,
                "per_n": reports,
                "per_apply_seconds": per_apply,
                "scaling_exponent": exponent,
            });
            write_atomic(&out, &serde_json::to_string_pretty(&doc)?)?;
            if let Some(e) = exponent {
                println!("scaling exponent: {e:.3}");
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Fetch {
            ids,
            cache_dir,
            out,
            offline,
        } => {
            let mut fetcher = Fetcher::new(cache_dir);
            fetcher.offline = offline;
            let records = fetcher.fetch(&ids)?;
            let mut buf = Vec::new();
            serialize_fasta(&records, &mut buf)?;
            if out == "-" {
                use std::io::Write;
                std::io::stdout().write_all(&buf)?;
            } else {
                write_atomic(Path::new(&out), &String::from_utf8_lossy(&buf))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Rft => "rft",
        Method::Dft => "dft",
    }
}

fn run_experiment(
    kind: ExperimentKind,
    seed: u64,
    out: &Path,
    noise: f64,
    max_n: usize,
) -> anyhow::Result<ExitCode> {
    let cache = BasisCache::new(max_n);
    std::fs::create_dir_all(out)?;
    match kind {
        ExperimentKind::Point | ExperimentKind::Deletion => {
            let base = fixtures::intron_record()?;
            let (mutation_kind, steps, name) = match kind {
                ExperimentKind::Point => (
                    MutationKind::Point,
                    (1..=100).step_by(5).collect::<Vec<_>>(),
                    "point",
                ),
                _ => (MutationKind::Deletion, (1..=100).collect(), "deletion"),
            };
            let report = run_mutation_series(&base, mutation_kind, &steps, seed, &cache)?;
            write_atomic(&out.join(format!("{name}.csv")), &report.to_csv())?;
            write_atomic(
                &out.join(format!("{name}.json")),
                &serde_json::to_string_pretty(&report)?,
            )?;
            let pass = report.pearson_r.map(|r| r > 0.9).unwrap_or(false);
            println!(
                "{name}: pearson r = {}, acceptance (> 0.9): {}",
                report
                    .pearson_r
                    .map(|r| format!("{r:.4}"))
                    .unwrap_or_else(|| "undefined".into()),
                if pass { "pass" } else { "FAIL" }
            );
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }

        ExperimentKind::Clades => {
            let base = fixtures::intron_record()?;
            let six = simulate_clades(&base, 0.1, seed)?;
            let matrix = pairwise_distances(&six, Method::Rft, &cache)?;
            let tree = upgma(&matrix)?;
            let newick = to_newick(&tree, 6);
            write_atomic(&out.join("clades.nwk"), &format!("{newick}\n"))?;
            let a_clade = tree.has_clade(&["A", "A1", "A2"]);
            let b_clade = tree.has_clade(&["B", "B1", "B2"]);
            let doc = json!({
                "seed": seed,
                "prng": labkit::PRNG_NAME,
                "rate": 0.1,
                "newick": newick,
                "a_clade": a_clade,
                "b_clade": b_clade,
            });
            write_atomic(&out.join("clades.json"), &serde_json::to_string_pretty(&doc)?)?;
            println!(
                "clades: {newick} | A-clade: {a_clade}, B-clade: {b_clade}"
            );
            Ok(if a_clade && b_clade {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }

        ExperimentKind::Triangle => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let records: Vec<DnaRecord> = (0..200)
                .map(|i| {
                    let len = rng.gen_range(200..500);
                    DnaRecord::new(format!("exon{i:03}"), random_exonlike(len, 0.5, &mut rng))
                })
                .collect();
            let matrix = pairwise_distances(&records, Method::Rft, &cache)?;
            // sample 1e5 random triples rather than all C(200,3)
            let n = matrix.n();
            let mut min_slack = f64::INFINITY;
            let mut checked = 0usize;
            while checked < 100_000 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                let k = rng.gen_range(0..n);
                if i == j || j == k || i == k {
                    continue;
                }
                min_slack = min_slack.min(triangle_slack(&matrix, i, j, k));
                checked += 1;
            }
            let pass = min_slack >= -1e-9;
            let doc = json!({
                "seed": seed,
                "prng": labkit::PRNG_NAME,
                "sequences": n,
                "triples_checked": checked,
                "min_slack": min_slack,
                "pass": pass,
            });
            write_atomic(&out.join("triangle.json"), &serde_json::to_string_pretty(&doc)?)?;
            println!("triangle: min slack {min_slack:.3e} over {checked} triples: {}",
                if pass { "pass" } else { "FAIL" });
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }

        ExperimentKind::Synth => {
            let x = synth_periodic(100, seed, noise);
            let basis = cache.get(100)?;
            let zeros = || Spectrum::Rft(vec![0.0; 100]);
            let y = rftdna::transform::rft_forward(&x, &basis)?;
            let rft_ps = rft_power_spectrum(&[y, zeros(), zeros(), zeros()])?;
            let dzeros = || dft_forward(&vec![0.0; 100]);
            let d = dft_forward(&x);
            let dft_ps = dft_power_spectrum(&[d, dzeros(), dzeros(), dzeros()])?;
            let mut rft_peaks = peak_indices(&rft_ps, 2, true);
            rft_peaks.sort_unstable();
            let mut dft_peaks = peak_indices(&dft_ps, 2, true);
            dft_peaks.sort_unstable();
            write_atomic(&out.join("synth_rft.csv"), &power_spectrum_to_csv(&rft_ps, true, false))?;
            write_atomic(&out.join("synth_dft.csv"), &power_spectrum_to_csv(&dft_ps, true, true))?;
            let pass = rft_peaks == vec![10, 20] && dft_peaks == vec![5, 10];
            let doc = json!({
                "seed": seed,
                "prng": labkit::PRNG_NAME,
                "noise_sigma": noise,
                "rft_peaks": rft_peaks,
                "dft_peaks": dft_peaks,
                "pass": pass,
            });
            write_atomic(&out.join("synth.json"), &serde_json::to_string_pretty(&doc)?)?;
            println!(
                "synth: rft peaks {rft_peaks:?} (want [10, 20]), dft peaks {dft_peaks:?} \
                 (want [5, 10]): {}",
                if pass { "pass" } else { "FAIL" }
            );
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
    }
}
