#![no_main]

use libfuzzer_sys::fuzz_target;
use morseflow::schubert::CellId;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = CellId::from_json(text) {
        assert_eq!(CellId::from_json(&c.to_json()).unwrap(), c);
    }
});
