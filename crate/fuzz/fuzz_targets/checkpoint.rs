#![no_main]

use fibernoise::integrator::{read_checkpoints, write_checkpoints};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = read_checkpoints(data) {
        let bytes = write_checkpoints(&file).expect("parsed file serializes");
        assert_eq!(bytes, data);
    }
});
