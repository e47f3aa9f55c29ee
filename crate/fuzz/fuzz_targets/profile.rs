#![no_main]

use fibernoise::model::{parse_profile, write_profile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(profile) = parse_profile(text) {
        let written = write_profile(&profile);
        let again = parse_profile(&written).expect("written profile parses");
        assert_eq!(write_profile(&again), written);
        // Evaluation must stay finite anywhere on the real line.
        for w in [-1e6, -3.5, 0.0, 0.25, 1e6] {
            assert!(again.linear_response_spectrum(w).re.is_finite());
        }
    }
});
