#![no_main]

use libfuzzer_sys::fuzz_target;
use sdtree::tree::Tree;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(tree) = Tree::parse_newick(text) else {
        return;
    };
    // The grammar admits exactly one rendering per tree, so serializing an
    // accepted input must reproduce it byte for byte.
    assert_eq!(tree.to_newick().unwrap(), text);
    let labeling = tree.sd_label();
    assert_eq!(labeling.s_count + labeling.d_count + tree.leaves(), tree.nodes().len() as u64);
    let _ = tree.colless_index();
    if tree.leaves() <= 1024 {
        // Quadratic in depth; keep it off the huge ladders.
        assert_eq!(tree.canonicalize().canonical_form(), tree.canonical_form());
    }
});
