#![no_main]

use std::path::Path;

use fibernoise::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::parse(text, Path::new(".")) {
        let written = cfg.to_text();
        let again = RunConfig::parse(&written, Path::new(".")).expect("written config parses");
        assert_eq!(again.to_text(), written);
        let _ = cfg.grid();
    }
});
