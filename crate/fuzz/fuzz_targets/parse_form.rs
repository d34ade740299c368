#![no_main]
use libfuzzer_sys::fuzz_target;
use leafwise_core::io::{parse_action_matrix, parse_form};

// The first line holds the frame, the rest the form.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (frame, form) = text.split_once('\n').unwrap_or((text, ""));
    if let Ok(frame) = parse_action_matrix(frame) {
        let _ = parse_form(form, &frame);
    }
});
