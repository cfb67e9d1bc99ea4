#![no_main]

use libfuzzer_sys::fuzz_target;
use morseflow::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        assert!(cfg.resolved_tolerances().is_ok());
    }
});
