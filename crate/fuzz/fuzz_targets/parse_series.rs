#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::parse_series;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_series(text);
    }
});
