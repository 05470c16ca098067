//! DNA sequence ingestion and indicator encoding.
//!
//! FASTA files are the only ingestion format. Each sequence is decomposed
//! into four aligned binary indicator signals, one per nucleotide; non-ACGT
//! symbols (N, IUPAC ambiguity codes, gaps) leave all four signals at zero
//! so positions stay aligned. Zero-padding extends indicator sets to a
//! common comparison length.

use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnaRecord {
    pub id: String,
    pub description: String,
    pub bases: String,
}

impl DnaRecord {
    pub fn new(id: impl Into<String>, bases: impl Into<String>) -> Self {
        DnaRecord {
            id: id.into(),
            description: String::new(),
            bases: normalize(&bases.into()),
        }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

/// Uppercase, and fold RNA 'U' to 'T'.
fn normalize(bases: &str) -> String {
    bases
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'U' => 'T',
            c => c,
        })
        .collect()
}

pub fn parse_fasta(source: impl std::io::Read) -> Result<Vec<DnaRecord>> {
    let reader = std::io::BufReader::new(source);
    let mut records: Vec<DnaRecord> = Vec::new();
    let mut current: Option<DnaRecord> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: format!("read failed: {e}"),
        })?;
        let line = line.trim_end();
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                if rec.bases.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("record '{}' has an empty sequence", rec.id),
                    });
                }
                records.push(rec);
            }
            let header = header.trim();
            let (id, description) = match header.split_once(char::is_whitespace) {
                Some((id, rest)) => (id.to_string(), rest.trim().to_string()),
                None => (header.to_string(), String::new()),
            };
            if id.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "header with empty identifier".into(),
                });
            }
            current = Some(DnaRecord {
                id,
                description,
                bases: String::new(),
            });
        } else {
            let data: String = line.split_whitespace().collect();
            if data.is_empty() {
                continue;
            }
            match current.as_mut() {
                Some(rec) => rec.bases.push_str(&normalize(&data)),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "sequence data before first '>' header".into(),
                    })
                }
            }
        }
    }
    if let Some(rec) = current.take() {
        if rec.bases.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("record '{}' has an empty sequence", rec.id),
            });
        }
        records.push(rec);
    }
    Ok(records)
}

pub fn parse_fasta_file(path: &Path) -> Result<Vec<DnaRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_fasta(f)
}

/// Write FASTA with sequence lines wrapped at 70 columns.
pub fn serialize_fasta(records: &[DnaRecord], out: &mut impl std::io::Write) -> std::io::Result<()> {
    for rec in records {
        if rec.description.is_empty() {
            writeln!(out, ">{}", rec.id)?;
        } else {
            writeln!(out, ">{} {}", rec.id, rec.description)?;
        }
        let bytes = rec.bases.as_bytes();
        for chunk in bytes.chunks(70) {
            out.write_all(chunk)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Four aligned binary indicator signals for one DNA sequence.
///
/// Values are stored as f64 (0.0 or 1.0) so they feed transforms directly.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSet {
    pub u_a: Vec<f64>,
    pub u_t: Vec<f64>,
    pub u_c: Vec<f64>,
    pub u_g: Vec<f64>,
    pub original_length: usize,
    /// Count of positions holding a symbol outside {A,C,G,T}.
    pub other_count: usize,
}

impl IndicatorSet {
    pub fn padded_length(&self) -> usize {
        self.u_a.len()
    }

    pub fn signals(&self) -> [&[f64]; 4] {
        [&self.u_a, &self.u_t, &self.u_c, &self.u_g]
    }
}

pub fn to_indicators(rec: &DnaRecord) -> IndicatorSet {
    let n = rec.len();
    let mut set = IndicatorSet {
        u_a: vec![0.0; n],
        u_t: vec![0.0; n],
        u_c: vec![0.0; n],
        u_g: vec![0.0; n],
        original_length: n,
        other_count: 0,
    };
    for (i, b) in rec.bases.bytes().enumerate() {
        match b {
            b'A' => set.u_a[i] = 1.0,
            b'T' => set.u_t[i] = 1.0,
            b'C' => set.u_c[i] = 1.0,
            b'G' => set.u_g[i] = 1.0,
            _ => set.other_count += 1,
        }
    }
    set
}

/// Extend all four signals with zeros to length `m`. Truncation is never
/// implicit: `m` below the current length is an error.
pub fn pad_to(ind: &IndicatorSet, m: usize) -> Result<IndicatorSet> {
    if m < ind.padded_length() {
        return Err(Error::InvalidArgument(format!(
            "pad_to target {m} is below current length {}",
            ind.padded_length()
        )));
    }
    let mut out = ind.clone();
    for v in [&mut out.u_a, &mut out.u_t, &mut out.u_c, &mut out.u_g] {
        v.resize(m, 0.0);
    }
    Ok(out)
}

/// Configuration for remote sequence retrieval with a local FASTA cache.
pub struct Fetcher {
    pub cache_dir: PathBuf,
    pub endpoint: String,
    pub timeout: Duration,
    pub offline: bool,
}

pub const CACHE_DIR_ENV: &str = "RFTDNA_CACHE_DIR";
pub const FETCH_URL_ENV: &str = "RFTDNA_FETCH_URL";

/// NCBI efetch, nucleotide database, FASTA output. `{id}` is substituted.
pub const DEFAULT_ENDPOINT: &str =
    "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi?db=nuccore&rettype=fasta&retmode=text&id={id}";

impl Fetcher {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        let cache_dir = std::env::var(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|_| cache_dir.into());
        let endpoint =
            std::env::var(FETCH_URL_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string());
        Fetcher {
            cache_dir,
            endpoint,
            timeout: Duration::from_secs(30),
            offline: false,
        }
    }

    fn cache_path(&self, id: &str) -> PathBuf {
        self.cache_dir.join(format!("{id}.fasta"))
    }

    /// Cache-first retrieval. Every miss is fetched over HTTP and written to
    /// the cache; if any accession stays unresolved the whole call fails
    /// listing the missing ids, never silently substituting.
    pub fn fetch(&self, ids: &[String]) -> Result<Vec<DnaRecord>> {
        let mut out = Vec::with_capacity(ids.len());
        let mut missing = Vec::new();
        for id in ids {
            match self.fetch_one(id) {
                Ok(rec) => out.push(rec),
                Err(_) => missing.push(id.clone()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(Error::Unavailable { missing })
        }
    }

    fn fetch_one(&self, id: &str) -> Result<DnaRecord> {
        let path = self.cache_path(id);
        if path.exists() {
            let records = parse_fasta_file(&path)?;
            return records
                .into_iter()
                .next()
                .ok_or_else(|| Error::Validation(format!("cached file for {id} is empty")));
        }
        if self.offline {
            return Err(Error::Unavailable {
                missing: vec![id.to_string()],
            });
        }
        let url = self.endpoint.replace("{id}", id);
        let body = ureq::get(&url)
            .timeout(self.timeout)
            .call()
            .map_err(|e| Error::Validation(format!("fetch {id}: {e}")))?
            .into_string()
            .map_err(|e| Error::Validation(format!("fetch {id}: {e}")))?;
        let records = parse_fasta(body.as_bytes())?;
        let rec = records
            .into_iter()
            .next()
            .ok_or_else(|| Error::Validation(format!("fetch {id}: empty FASTA response")))?;
        self.write_cache(id, &body)?;
        Ok(rec)
    }

    /// First completed write is kept: the temp file is hard-linked into
    /// place, which fails (harmlessly) if another writer got there first.
    fn write_cache(&self, id: &str, body: &str) -> Result<()> {
        std::fs::create_dir_all(&self.cache_dir).map_err(|e| Error::io(&self.cache_dir, e))?;
        let final_path = self.cache_path(id);
        let tmp = self.cache_dir.join(format!(".{id}.tmp.{}", std::process::id()));
        std::fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        match std::fs::hard_link(&tmp, &final_path) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {}
            Err(e) => {
                let _ = std::fs::remove_file(&tmp);
                return Err(Error::io(&final_path, e));
            }
        }
        let _ = std::fs::remove_file(&tmp);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_record() {
        let recs = parse_fasta(">s1\nACGT\n".as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id, "s1");
        assert_eq!(recs[0].bases, "ACGT");
        assert_eq!(recs[0].len(), 4);
    }

    #[test]
    fn parse_folds_lines_and_case() {
        let recs = parse_fasta(">s1\nac\ngt\n>s2 some description\nTTTT\n".as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].bases, "ACGT");
        assert_eq!(recs[1].bases, "TTTT");
        assert_eq!(recs[1].description, "some description");
    }

    #[test]
    fn parse_rejects_data_before_header() {
        let err = parse_fasta("ACGT\n>s1\nAC\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn parse_rejects_empty_sequence() {
        assert!(parse_fasta(">s1\n>s2\nAC\n".as_bytes()).is_err());
        assert!(parse_fasta(">s1\n".as_bytes()).is_err());
    }

    #[test]
    fn rna_u_folds_to_t() {
        let recs = parse_fasta(">r\nACGU\n".as_bytes()).unwrap();
        assert_eq!(recs[0].bases, "ACGT");
    }

    #[test]
    fn fasta_round_trip() {
        let recs = vec![
            DnaRecord::new("a", "ACGT".repeat(40)),
            DnaRecord {
                id: "b".into(),
                description: "desc here".into(),
                bases: "TTTTT".into(),
            },
        ];
        let mut buf = Vec::new();
        serialize_fasta(&recs, &mut buf).unwrap();
        let back = parse_fasta(&buf[..]).unwrap();
        assert_eq!(recs, back);
        // wrapped at 70 columns
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.len() <= 70 || l.starts_with('>')));
    }

    #[test]
    fn indicators_basic() {
        let set = to_indicators(&DnaRecord::new("x", "ACGT"));
        assert_eq!(set.u_a, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(set.u_c, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(set.u_g, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(set.u_t, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(set.original_length, 4);
        assert_eq!(set.other_count, 0);
    }

    #[test]
    fn indicators_positions_pattern() {
        // u_A = 0001010111 marks A at positions 4, 6, 8, 9, 10
        let set = to_indicators(&DnaRecord::new("x", "CCCACACAAA"));
        let expected = [0., 0., 0., 1., 0., 1., 0., 1., 1., 1.];
        assert_eq!(set.u_a, expected);
    }

    #[test]
    fn indicators_non_acgt_all_zero() {
        let set = to_indicators(&DnaRecord::new("x", "ANGT"));
        for s in set.signals() {
            assert_eq!(s[1], 0.0);
        }
        assert_eq!(set.other_count, 1);
    }

    #[test]
    fn indicator_sums_mask_acgt_positions() {
        let set = to_indicators(&DnaRecord::new("x", "ACGTNN-RYACG"));
        let mask: Vec<f64> = (0..set.original_length)
            .map(|i| set.u_a[i] + set.u_t[i] + set.u_c[i] + set.u_g[i])
            .collect();
        assert!(mask.iter().all(|&v| v == 0.0 || v == 1.0));
        let total: f64 = mask.iter().sum();
        assert_eq!(total, 7.0);
    }

    #[test]
    fn pad_extends_with_zeros() {
        let set = to_indicators(&DnaRecord::new("x", "AC"));
        let padded = pad_to(&set, 4).unwrap();
        assert_eq!(padded.u_a, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(padded.u_c, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(padded.u_g, vec![0.0; 4]);
        assert_eq!(padded.original_length, 2);

        let same = pad_to(&set, set.padded_length()).unwrap();
        assert_eq!(same, set);

        assert!(pad_to(&padded, 2).is_err());
    }

    #[test]
    fn fetch_warm_cache_and_cold_offline() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("KC891137.fasta"), ">KC891137 test\nACGTACGT\n")
            .unwrap();
        let mut fetcher = Fetcher {
            cache_dir: dir.path().to_path_buf(),
            endpoint: "http://127.0.0.1:1/none?id={id}".into(),
            timeout: Duration::from_millis(100),
            offline: true,
        };
        let recs = fetcher.fetch(&["KC891137".to_string()]).unwrap();
        assert_eq!(recs[0].id, "KC891137");
        assert_eq!(recs[0].bases, "ACGTACGT");

        let err = fetcher.fetch(&["MISSING1".to_string()]).unwrap_err();
        match err {
            Error::Unavailable { missing } => assert_eq!(missing, vec!["MISSING1"]),
            other => panic!("unexpected: {other}"),
        }

        fetcher.offline = false;
        assert!(fetcher.fetch(&[]).unwrap().is_empty());
    }

    #[test]
    fn fetch_over_local_http() {
        use std::io::{Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 1024];
            let _ = stream.read(&mut buf);
            let body = ">LOCAL1 served\nACGTAC\n";
            let resp = format!(
                "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            stream.write_all(resp.as_bytes()).unwrap();
        });
        let dir = tempfile::tempdir().unwrap();
        let fetcher = Fetcher {
            cache_dir: dir.path().to_path_buf(),
            endpoint: format!("http://{addr}/efetch?id={{id}}"),
            timeout: Duration::from_secs(5),
            offline: false,
        };
        let recs = fetcher.fetch(&["LOCAL1".to_string()]).unwrap();
        assert_eq!(recs[0].bases, "ACGTAC");
        server.join().unwrap();
        // second call is served from cache, no network
        let fetcher = Fetcher { offline: true, ..fetcher };
        let recs = fetcher.fetch(&["LOCAL1".to_string()]).unwrap();
        assert_eq!(recs[0].bases, "ACGTAC");
    }
}
