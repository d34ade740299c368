#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::parse_circle_map;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(f) = parse_circle_map(text) {
            let _ = f.lift(0.5);
        }
    }
});
