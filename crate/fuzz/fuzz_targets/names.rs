#![no_main]
use evref::ingest::ModeName;
use evref::propriety::FitModel;
use evref::{PriorFamily, PriorSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut words = text.split_whitespace();
    let Some(name) = words.next() else { return };
    let _ = name.parse::<ModeName>();
    let _ = name.parse::<FitModel>();
    let Ok(family) = name.parse::<PriorFamily>() else { return };
    assert_eq!(family.name().parse::<PriorFamily>().ok(), Some(family));
    let mut bound = || words.next().and_then(|w| w.parse::<f64>().ok());
    let (lo, hi) = (bound(), bound());
    if let Ok(spec) = PriorSpec::with_bounds(family, lo, hi) {
        let (a, b) = spec.xi_support();
        assert!(a < b);
        let _ = spec.ln_xi_component(0.5 * (a.max(-1e3) + b.min(1e3)));
    }
});
