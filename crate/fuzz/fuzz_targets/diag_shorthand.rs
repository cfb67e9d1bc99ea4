#![no_main]

use libfuzzer_sys::fuzz_target;
use morseflow::json::parse_diag_shorthand;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_diag_shorthand(text) {
        assert!(m.is_square());
        assert!(m.is_finite());
    }
});
