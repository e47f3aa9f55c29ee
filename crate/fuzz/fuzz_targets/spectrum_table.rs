#![no_main]

use fibernoise::ramanfit::{parse_spectrum_table, FrequencyUnit};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let unit = match selector % 3 {
        0 => FrequencyUnit::Terahertz,
        1 => FrequencyUnit::Wavenumber,
        _ => FrequencyUnit::Dimensionless,
    };
    if let Ok(samples) = parse_spectrum_table(text, unit, Some(1e-13)) {
        for s in samples {
            assert!(s.omega.is_finite() && s.gain.is_finite() && s.weight > 0.0);
        }
    }
});
