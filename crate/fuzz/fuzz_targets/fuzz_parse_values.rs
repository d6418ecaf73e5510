#![no_main]

use libfuzzer_sys::fuzz_target;
use sdtree::fp::{format_hex, parse_values};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(values) = parse_values(text) else {
        return;
    };
    for v in values {
        // Hex rendering is lossless for everything except the NaN payload.
        let rendered = format_hex(v);
        let reparsed = parse_values(&rendered).unwrap();
        assert_eq!(reparsed.len(), 1);
        if v.is_nan() {
            assert!(reparsed[0].is_nan());
        } else {
            assert_eq!(reparsed[0].to_bits(), v.to_bits());
        }
    }
});
