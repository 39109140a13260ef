#![no_main]
use evref_cli::{RunConfig, Settings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = Settings::from_toml(text) {
        let _ = RunConfig::resolve(Some(file), &Settings::default());
    }
});
