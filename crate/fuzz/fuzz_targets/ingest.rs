#![no_main]
use evref::ingest::{ingest, parse_column, IngestMode};
use libfuzzer_sys::fuzz_target;

// First byte picks the mode, the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let mode = match sel % 4 {
        0 => IngestMode::Excesses,
        1 => IngestMode::Maxima,
        2 => IngestMode::RawThreshold { threshold: f64::from(sel) / 16.0 - 4.0 },
        _ => IngestMode::RawBlocks { block_size: usize::from(sel / 4) },
    };
    if let Ok(values) = parse_column(text) {
        assert!(values.iter().all(|v| v.is_finite()));
    }
    if let Ok(sample) = ingest(text, mode) {
        assert!(!sample.is_empty());
        assert!(sample.values().iter().all(|v| v.is_finite()));
    }
});
