#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::parse_algebra;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(l) = parse_algebra(text) {
            let _ = l.validate();
        }
    }
});
