use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fibernoise"));
    cmd.env_remove("FIBERNOISE_THREADS");
    cmd
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SOLITON: &str = "\
format = fibernoise-run 1

[files]
response = silica_response.model

[fiber]
photon_number = 1e7

[grid]
modes = 128
window = 16
zeta_end = 0.5
dzeta = 0.01
dispersion = anomalous
representation = REP

[input]
shape = sech
amplitude = 1
width = 1

[run]
trajectory_count = 40
master_seed = 3
checkpoints = 0 0.25 0.5
output_dir = out
keep_fields = 1

[noise]
initial = true
additive = true
raman = true

[observables]
ordering = normal
local_oscillator = input
";

fn write_config(dir: &Path, rep: &str, edit: impl Fn(String) -> String) -> PathBuf {
    fs::copy(
        data("silica_response.model"),
        dir.join("silica_response.model"),
    )
    .unwrap();
    let path = dir.join("run.conf");
    fs::write(&path, edit(SOLITON.replace("REP", rep))).unwrap();
    path
}

fn table(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn run_writes_a_soliton_flux_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "positive-p", |s| s);
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let flux = table(&dir.path().join("out/flux_0.txt"));
    assert_eq!(flux.len(), 128);
    for row in &flux {
        let expect = 1e7 / row[0].cosh().powi(2);
        assert!((row[1] - expect).abs() < 1e-6 * 1e7, "{row:?}");
    }
    for name in [
        "manifest.conf",
        "response.model",
        "gain_loss.profile",
        "spectrum_2.txt",
        "mean_frequency.txt",
        "quadrature.txt",
        "summary.txt",
        "fields/trajectory_0.bin",
        "fields/index.txt",
    ] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
}

#[test]
fn invalid_trajectory_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| {
        s.replace("trajectory_count = 40", "trajectory_count = 0")
    });
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("trajectory_count"), "{msg}");
    assert!(msg.starts_with("error[config]"), "{msg}");
}

#[test]
fn missing_config_and_unknown_keys_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(dir.path().join("absent.conf"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(dir.path(), "wigner", |s| {
        s.replace("[grid]", "[grid]\nmodez = 4")
    });
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("modez"));
}

#[test]
fn reruns_are_byte_identical_and_manifests_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| s);
    let run = |config: &Path, out: &str, threads: &str| {
        let o = bin()
            .arg("run")
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(dir.path().join(out))
            .env("FIBERNOISE_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run(&cfg, "a", "1");
    run(&cfg, "b", "4");
    run(&dir.path().join("a/manifest.conf"), "c", "2");
    for name in [
        "flux_1.txt",
        "spectrum_2.txt",
        "mean_frequency.txt",
        "quadrature.txt",
        "summary.txt",
        "manifest.conf",
        "fields/trajectory_0.bin",
    ] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        assert_eq!(
            a,
            fs::read(dir.path().join("b").join(name)).unwrap(),
            "{name}"
        );
        assert_eq!(
            a,
            fs::read(dir.path().join("c").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn seed_override_changes_the_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| s);
    for (seed, out) in [("3", "a"), ("4", "b")] {
        let o = bin()
            .args(["run", "--seed", seed, "--out"])
            .arg(dir.path().join(out))
            .arg("--config")
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(o.status.success());
    }
    let a = fs::read(dir.path().join("a/flux_2.txt")).unwrap();
    let b = fs::read(dir.path().join("b/flux_2.txt")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn fit_recovers_a_synthetic_single_line() {
    let dir = tempfile::tempdir().unwrap();
    // Gain of one Lorentzian with F = 0.2, Ω = 3, Δ = 0.5, sampled in Ω units.
    let (f, w, d) = (0.2_f64, 3.0_f64, 0.5_f64);
    let mut text = String::from("# omega alpha\n");
    for k in 1..=200 {
        let x = k as f64 * 0.04;
        let im =
            f * d * w * 2.0 * x * d / (((w * w + d * d - x * x).powi(2)) + 4.0 * x * x * d * d);
        text.push_str(&format!("{x} {}\n", 2.0 * im));
    }
    let input = dir.path().join("gain.txt");
    fs::write(&input, text).unwrap();
    let out = bin()
        .args(["fit", "--terms", "1", "--unit", "omega", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("fit"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let model = fs::read_to_string(dir.path().join("fit/response.model")).unwrap();
    let term: Vec<f64> = model
        .lines()
        .find_map(|l| l.strip_prefix("term = "))
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(
        (term[0] - f).abs() < 1e-4 && (term[1] - w).abs() < 1e-4 && (term[2] - d).abs() < 1e-4,
        "{term:?}"
    );
    assert!(dir.path().join("fit/fit_report.txt").exists());
    assert!(dir.path().join("fit/fit_curve.txt").exists());
}

#[test]
fn fit_rejects_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    fs::write(&input, "# nothing here\n").unwrap();
    let out = bin()
        .args(["fit", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn fit_of_silica_gives_the_expected_raman_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "fit", "--terms", "10", "--unit", "thz", "--t0", "1e-13", "--input",
        ])
        .arg(data("silica_raman_gain.txt"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let f: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("raman_fraction = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.15..=0.25).contains(&f), "{f}");
}

#[test]
fn verify_passes_and_catches_a_corrupted_generator() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| {
        s.replace(
            "[fiber]",
            "[fiber]\ntemperature_k = 300\nloss_db_per_km = 0.2",
        )
    });
    let ok = bin()
        .args(["verify", "--draws", "3000", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("v"))
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", stderr(&ok));
    let summary = fs::read_to_string(dir.path().join("v/verify_summary.txt")).unwrap();
    assert_eq!(
        summary.lines().filter(|l| l.ends_with("true")).count(),
        4,
        "{summary}"
    );
    let bad = bin()
        .args([
            "verify",
            "--draws",
            "3000",
            "--corrupt-scale",
            "2",
            "--config",
        ])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn verify_with_noise_switched_off_passes_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| {
        s.replace("additive = true", "additive = false")
            .replace("raman = true", "raman = false")
    });
    let out = bin()
        .args(["verify", "--draws", "500", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("v"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn units_reproduce_the_loss_conversion() {
    let out = bin()
        .args(["units", "--loss-db-per-km", "0.2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let v: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("loss_amplitude_coefficient_per_m = "))
        .unwrap()
        .parse()
        .unwrap();
    // 0.2 dB/km of intensity is ln(10)·0.02/km per unit length of intensity,
    // and half that in amplitude.
    let expect = 0.2 * std::f64::consts::LN_10 / 10.0 / 1000.0 / 2.0;
    assert!((v - expect).abs() < 1e-6 * expect);
    assert!((v - 2.3e-5).abs() < 0.05e-5);
}

#[test]
fn threads_flag_rejects_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| s);
    let out = bin()
        .args(["run", "--threads", "0", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_soliton_keeps_its_flux_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wigner", |s| {
        s.replace("response = silica_response.model\n", "")
            .replace("window = 16", "window = 32")
            .replace("modes = 128", "modes = 256")
            .replace("initial = true", "initial = false")
            .replace("additive = true", "additive = false")
            .replace("raman = true", "raman = false")
            .replace("trajectory_count = 40", "trajectory_count = 1")
    });
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    for i in 0..3 {
        for row in table(&dir.path().join(format!("out/flux_{i}.txt"))) {
            // Deterministic Wigner flux still carries the half-photon shift.
            let expect = 1e7 / row[0].cosh().powi(2);
            assert!(
                (row[1] - expect).abs() < 1e-4 * 1e7,
                "checkpoint {i}: {row:?}"
            );
        }
    }
}

fn three_line_table(dir: &Path) -> PathBuf {
    let terms = [
        (0.1_f64, 2.0_f64, 0.6_f64),
        (0.25, 5.0, 0.8),
        (0.05, 9.0, 1.5),
    ];
    let mut text = String::from("# omega alpha\n");
    for k in 1..=400 {
        let x = k as f64 * 0.03;
        let im: f64 = terms
            .iter()
            .map(|&(f, w, d)| {
                f * d * w * 2.0 * x * d / ((w * w + d * d - x * x).powi(2) + 4.0 * x * x * d * d)
            })
            .sum();
        text.push_str(&format!("{x} {}\n", 2.0 * im));
    }
    let path = dir.join("three.txt");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn fit_of_three_lines_reproduces_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let input = three_line_table(dir.path());
    let out = bin()
        .args(["fit", "--terms", "3", "--unit", "omega", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("fit"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let curve = table(&dir.path().join("fit/fit_curve.txt"));
    let peak = curve.iter().map(|r| r[1]).fold(0.0, f64::max);
    let rms =
        (curve.iter().map(|r| (r[2] - r[1]).powi(2)).sum::<f64>() / curve.len() as f64).sqrt();
    assert!(rms < 1e-6 * peak, "rms {rms} peak {peak}");
}

#[test]
fn unconverged_fit_exits_3_with_a_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = three_line_table(dir.path());
    let out = bin()
        .args([
            "fit",
            "--terms",
            "3",
            "--unit",
            "omega",
            "--max-iterations",
            "1",
            "--input",
        ])
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("fit"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let report = fs::read_to_string(dir.path().join("fit/fit_report.txt")).unwrap();
    assert!(report.contains("converged = false"));
}
