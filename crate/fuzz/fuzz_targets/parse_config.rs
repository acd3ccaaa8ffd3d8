#![no_main]

use libfuzzer_sys::fuzz_target;
use zdl_cli::config::{ConfigFile, KNOWN_KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = ConfigFile::parse(text) else {
        return;
    };
    assert!(config.len() <= KNOWN_KEYS.len());
    for key in KNOWN_KEYS {
        if let Some(v) = config.raw(key) {
            assert!(!v.is_empty());
        }
        let _ = config.get::<f64>(key);
        let _ = config.get::<usize>(key);
    }
});
