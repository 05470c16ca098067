#![no_main]

use libfuzzer_sys::fuzz_target;

use rftdna::metric::DistanceMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = DistanceMatrix::from_csv(text) {
        // accepted matrices are already validated; round-trip must hold
        let back = DistanceMatrix::from_csv(&m.to_csv()).unwrap();
        assert_eq!(m.labels, back.labels);
    }
});
