//! Mutation tests for every text and binary decoder, seeded from the fuzz
//! corpus. They check the same invariants as the fuzz targets: no panics,
//! and anything accepted re-serializes to a fixed point.

use std::path::Path;

use fibernoise::config::RunConfig;
use fibernoise::integrator::{read_checkpoints, write_checkpoints};
use fibernoise::kv;
use fibernoise::model::{parse_profile, parse_response_model, write_profile, write_response_model};
use fibernoise::ramanfit::{parse_spectrum_table, FrequencyUnit};
use proptest::prelude::*;

const RESPONSE: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/response_model/silica.model"),
    include_bytes!("../../../fuzz/corpus/response_model/two_terms.model"),
    include_bytes!("../../../fuzz/corpus/response_model/electronic_only.model"),
];
const PROFILE: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/profile/table.profile"),
    include_bytes!("../../../fuzz/corpus/profile/transparent.profile"),
];
const SPECTRUM: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/spectrum_table/silica_head.txt"),
    include_bytes!("../../../fuzz/corpus/spectrum_table/dimensionless.txt"),
    include_bytes!("../../../fuzz/corpus/spectrum_table/wavenumber.txt"),
];
const CONFIG: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/run_config/soliton.conf"),
    include_bytes!("../../../fuzz/corpus/run_config/manifest.conf"),
];
const CHECKPOINT: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/checkpoint/wigner.bin"),
    include_bytes!("../../../fuzz/corpus/checkpoint/positive_p.bin"),
];

#[derive(Debug, Clone)]
enum Edit {
    Flip(usize, u8),
    Insert(usize, u8),
    Delete(usize),
    Truncate(usize),
    DuplicateLine(usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    let printable = prop_oneof![
        Just(b'0'),
        Just(b'-'),
        Just(b'.'),
        Just(b'e'),
        Just(b' '),
        Just(b'\n'),
        Just(b'='),
        Just(b'#'),
        Just(b'['),
        any::<u8>(),
    ];
    prop_oneof![
        (any::<usize>(), any::<u8>()).prop_map(|(i, b)| Edit::Flip(i, b)),
        (any::<usize>(), printable).prop_map(|(i, b)| Edit::Insert(i, b)),
        any::<usize>().prop_map(Edit::Delete),
        any::<usize>().prop_map(Edit::Truncate),
        any::<usize>().prop_map(Edit::DuplicateLine),
    ]
}

fn mutate(seed: &[u8], edits: &[Edit]) -> Vec<u8> {
    let mut data = seed.to_vec();
    for e in edits {
        let n = data.len().max(1);
        match *e {
            Edit::Flip(i, b) if !data.is_empty() => data[i % n] ^= b,
            Edit::Insert(i, b) => data.insert(i % (data.len() + 1), b),
            Edit::Delete(i) if !data.is_empty() => {
                data.remove(i % n);
            }
            Edit::Truncate(i) => data.truncate(i % (data.len() + 1)),
            Edit::DuplicateLine(i) => {
                let text = String::from_utf8_lossy(&data).into_owned();
                let lines: Vec<&str> = text.lines().collect();
                if !lines.is_empty() {
                    let k = i % lines.len();
                    let mut out: Vec<&str> = lines.clone();
                    out.insert(k, lines[k]);
                    data = (out.join("\n") + "\n").into_bytes();
                }
            }
            _ => {}
        }
    }
    data
}

fn input(seeds: &'static [&'static [u8]]) -> impl Strategy<Value = Vec<u8>> {
    (0..seeds.len(), prop::collection::vec(edit(), 0..6))
        .prop_map(move |(k, edits)| mutate(seeds[k], &edits))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn response_model_round_trips(data in input(RESPONSE)) {
        if let Ok(model) = parse_response_model(&String::from_utf8_lossy(&data)) {
            let written = write_response_model(&model, &[]);
            let again = parse_response_model(&written).expect("written model parses");
            prop_assert_eq!(write_response_model(&again, &[]), written);
        }
    }

    #[test]
    fn profile_round_trips(data in input(PROFILE)) {
        if let Ok(profile) = parse_profile(&String::from_utf8_lossy(&data)) {
            let written = write_profile(&profile);
            let again = parse_profile(&written).expect("written profile parses");
            prop_assert_eq!(write_profile(&again), written);
            for w in [-1e6, -3.5, 0.0, 0.25, 1e6] {
                prop_assert!(again.linear_response_spectrum(w).re.is_finite());
            }
        }
    }

    #[test]
    fn spectrum_table_yields_finite_samples(data in input(SPECTRUM), unit in 0u8..3) {
        let unit = match unit {
            0 => FrequencyUnit::Terahertz,
            1 => FrequencyUnit::Wavenumber,
            _ => FrequencyUnit::Dimensionless,
        };
        // The first seed byte selects the unit in the fuzz target; skip it here too.
        let text = String::from_utf8_lossy(data.get(1..).unwrap_or_default()).into_owned();
        if let Ok(samples) = parse_spectrum_table(&text, unit, Some(1e-13)) {
            for s in samples {
                prop_assert!(s.omega.is_finite() && s.gain.is_finite() && s.weight > 0.0);
            }
        }
    }

    #[test]
    fn run_config_round_trips(data in input(CONFIG)) {
        let text = String::from_utf8_lossy(&data).into_owned();
        let _ = kv::parse(&text);
        if let Ok(cfg) = RunConfig::parse(&text, Path::new(".")) {
            let written = cfg.to_text();
            let again = RunConfig::parse(&written, Path::new(".")).expect("written config parses");
            prop_assert_eq!(again.to_text(), written);
            let _ = cfg.grid();
        }
    }

    #[test]
    fn checkpoint_reencodes_byte_for_byte(data in input(CHECKPOINT)) {
        if let Ok(file) = read_checkpoints(&data) {
            prop_assert_eq!(write_checkpoints(&file).expect("parsed file serializes"), data);
        }
    }
}

#[test]
fn every_seed_is_accepted() {
    for s in RESPONSE {
        parse_response_model(std::str::from_utf8(s).unwrap()).unwrap();
    }
    for s in PROFILE {
        parse_profile(std::str::from_utf8(s).unwrap()).unwrap();
    }
    for (s, unit) in SPECTRUM.iter().zip([
        FrequencyUnit::Terahertz,
        FrequencyUnit::Dimensionless,
        FrequencyUnit::Wavenumber,
    ]) {
        let text = std::str::from_utf8(s).unwrap();
        // The silica seed has no selector byte; the others start with one.
        let body = if text.starts_with('#') {
            text
        } else {
            &text[1..]
        };
        assert!(!parse_spectrum_table(body, unit, Some(1e-13))
            .unwrap()
            .is_empty());
    }
    for s in CONFIG {
        RunConfig::parse(std::str::from_utf8(s).unwrap(), Path::new(".")).unwrap();
    }
    for s in CHECKPOINT {
        read_checkpoints(s).unwrap();
    }
}
