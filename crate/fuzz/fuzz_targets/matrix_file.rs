#![no_main]
use libfuzzer_sys::fuzz_target;
use wegner_flow::io::{matrix_file_json, parse_matrix_file};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(h) = parse_matrix_file(text) else { return };
    // Anything accepted must survive a write/read cycle unchanged.
    let again = parse_matrix_file(&matrix_file_json(&h)).expect("re-parse of emitted file");
    assert_eq!(again, h);
    if h.dim() <= 8 {
        let _ = wegner_flow::spectra::eigh(&h);
    }
});
