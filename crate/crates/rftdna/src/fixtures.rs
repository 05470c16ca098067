//! Bundled sample data, embedded so experiments run offline.
//!
//! The three FASTA files carry GenBank-style identifiers but hold synthetic
//! stand-in sequences generated by the `gen-fixtures` tool with fixed seeds;
//! they reproduce the spectral and clustering properties the experiments
//! probe (3-base periodicity in the exon surrogate, none in the intron
//! surrogate, subtype structure in the influenza set). Real records with the
//! same accessions can be pulled into the local cache with `rftdna fetch`.

use crate::seqmodel::{parse_fasta, DnaRecord};
use crate::Result;

/// Exon surrogate, 386 bp, with pronounced 3-base periodicity.
pub const EXON_FASTA: &str = include_str!("../fixtures/KC750830.fasta");
pub const EXON_ID: &str = "KC750830";

/// Intron surrogate, 654 bp, without 3-base periodicity. Also the base
/// sequence for the mutation and clade experiments.
pub const INTRON_FASTA: &str = include_str!("../fixtures/JQ918751.fasta");
pub const INTRON_ID: &str = "JQ918751";

/// 31 influenza A neuraminidase surrogates across four subtypes plus one
/// H7N3 outlier.
pub const INFLUENZA_FASTA: &str = include_str!("../fixtures/influenza_na.fasta");

/// (accession, strain name, subtype) for the influenza set.
pub const INFLUENZA_ACCESSIONS: [(&str, &str, &str); 31] = [
    ("KC891137", "A/Illinois/05/2012", "H1N1"),
    ("KC891134", "A/Illinois/06/2012", "H1N1"),
    ("KC891128", "A/Illinois/08/2012", "H1N1"),
    ("KC891564", "A/Illinois/01/2012", "H1N1"),
    ("KC891131", "A/Illinois/07/2012", "H1N1"),
    ("KC893127", "A/Illinois/13/2012", "H3N2"),
    ("KC893131", "A/Illinois/12/2012", "H3N2"),
    ("DQ017515", "A/mallard/Alberta/24/01", "H7N3"),
    ("CY060664", "A/Ontario/315015/2009", "H1N1"),
    ("JF789604", "A/mallard/Czech Republic/13438-29K/2010", "H11N9"),
    ("GQ184333", "A/Baikal teal/Hongze/14/2005", "H11N9"),
    ("KF021599", "A/Shanghai/02/2013", "H7N9"),
    ("KC885958", "A/Zhejiang/DTID-ZJU01/2013", "H7N9"),
    ("KC994454", "A/Fujian/1/2013", "H7N9"),
    ("KC853765", "A/Hangzhou/1/2013", "H7N9"),
    ("KF001514", "A/Hangzhou/2/2013", "H7N9"),
    ("KF001517", "A/Hangzhou/3/2013", "H7N9"),
    ("KC896776", "A/Nanjing/1/2013", "H7N9"),
    ("KC853231", "A/Shanghai/4664T/2013", "H7N9"),
    ("KF018055", "A/Taiwan/T02081/2013", "H7N9"),
    ("KF018047", "A/Taiwan/S02076/2013", "H7N9"),
    ("CY147062", "A/duck/Anhui/SC702/2013", "H7N9"),
    ("CY147070", "A/duck/Zhejiang/SC410/2013", "H7N9"),
    ("CY146910", "A/chicken/Guangdong/SD641/2013", "H7N9"),
    ("JN244222", "A/wild bird/Korea/A14/2011", "H7N9"),
    ("CY029883", "A/sharp-tailed sandpiper/Australia/10/2004", "H11N9"),
    ("AB298284", "A/duck/Hokkaido/W245/2004", "H11N9"),
    ("AB472035", "A/duck/Tsukuba/239/2005", "H11N9"),
    ("CY025199", "A/sharp-tailed sandpiper/Australia/6/2004", "H11N9"),
    ("AB472034", "A/duck/Tsukuba/164/2005", "H11N9"),
    ("AB472033", "A/duck/Tsukuba/441/2005", "H11N9"),
];

pub fn exon_record() -> Result<DnaRecord> {
    Ok(parse_fasta(EXON_FASTA.as_bytes())?.remove(0))
}

pub fn intron_record() -> Result<DnaRecord> {
    Ok(parse_fasta(INTRON_FASTA.as_bytes())?.remove(0))
}

pub fn influenza_records() -> Result<Vec<DnaRecord>> {
    parse_fasta(INFLUENZA_FASTA.as_bytes())
}

/// Accessions belonging to one subtype.
pub fn subtype_members(subtype: &str) -> Vec<&'static str> {
    INFLUENZA_ACCESSIONS
        .iter()
        .filter(|(_, _, s)| *s == subtype)
        .map(|(id, _, _)| *id)
        .collect()
}
