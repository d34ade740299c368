#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::parse_suspension;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = parse_suspension(text) {
            let _ = s.mv_dimensions();
        }
    }
});
