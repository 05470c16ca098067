#![no_main]

use libfuzzer_sys::fuzz_target;

use rftdna::phylo::{parse_newick, to_newick};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(tree) = parse_newick(text) {
        // accepted trees must serialize and re-parse without panicking
        let out = to_newick(&tree, 6);
        let reparsed = parse_newick(&out).unwrap();
        assert_eq!(tree.leaf_labels().len(), reparsed.leaf_labels().len());
    }
});
