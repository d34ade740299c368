#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::parse_action_matrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_action_matrix(text) {
            let m: Vec<i64> = (0..v.n() as i64).map(|i| i - 1).collect();
            let _ = v.small_divisor(&m);
        }
    }
});
