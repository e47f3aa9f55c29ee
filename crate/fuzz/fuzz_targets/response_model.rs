#![no_main]

use fibernoise::model::{parse_response_model, write_response_model};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = parse_response_model(text) {
        let written = write_response_model(&model, &[]);
        let again = parse_response_model(&written).expect("written model parses");
        assert_eq!(write_response_model(&again, &[]), written);
    }
});
