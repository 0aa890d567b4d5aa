#![no_main]
use libfuzzer_sys::fuzz_target;
use wegner_flow::io::{parse_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = parse_csv(text) else { return };
    if table.samples.is_empty() {
        return;
    }
    let out = write_csv(&table.samples, table.phases.as_deref()).expect("parsed table is writable");
    let back = parse_csv(&out).expect("re-parse of emitted CSV");
    assert_eq!(back.samples.len(), table.samples.len());
    for ((s1, h1), (s2, h2)) in back.samples.iter().zip(&table.samples) {
        assert_eq!(s1.to_bits(), s2.to_bits());
        assert_eq!(h1, h2);
    }
});
