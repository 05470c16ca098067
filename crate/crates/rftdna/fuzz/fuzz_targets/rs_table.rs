#![no_main]

use libfuzzer_sys::fuzz_target;

use rftdna::numtheory::RamanujanTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = RamanujanTable::from_bytes(data) {
        // decoded tables must be internally consistent
        let q = table.max_q().min(8);
        for i in 1..=q {
            let _ = table.get(i, 1);
        }
    }
});
