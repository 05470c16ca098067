#![no_main]

use libfuzzer_sys::fuzz_target;

use rftdna::metric::DistanceMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = DistanceMatrix::from_phylip(text) {
        let back = DistanceMatrix::from_phylip(&m.to_phylip()).unwrap();
        assert_eq!(m.labels, back.labels);
    }
});
