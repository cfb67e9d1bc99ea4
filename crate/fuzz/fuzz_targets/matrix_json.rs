#![no_main]

use libfuzzer_sys::fuzz_target;
use morseflow::json::{matrix_to_json, parse_matrix_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix_json(text) {
        let back = parse_matrix_json(&matrix_to_json(&m)).expect("rendered matrix parses");
        assert_eq!(matrix_to_json(&back), matrix_to_json(&m));
    }
});
