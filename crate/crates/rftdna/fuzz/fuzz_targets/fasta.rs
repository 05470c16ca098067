#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = rftdna::seqmodel::parse_fasta(data) {
        // anything that parses must re-serialize and re-parse to the same records
        let mut buf = Vec::new();
        rftdna::seqmodel::serialize_fasta(&records, &mut buf).unwrap();
        let back = rftdna::seqmodel::parse_fasta(&buf[..]).unwrap();
        assert_eq!(records.len(), back.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.bases, b.bases);
        }
    }
});
