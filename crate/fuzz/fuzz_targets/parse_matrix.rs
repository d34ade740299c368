#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::{matrix_to_value, parse_matrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_matrix(text) {
            let again = parse_matrix(&matrix_to_value(&rows).to_string()).unwrap();
            assert_eq!(again, rows);
        }
    }
});
