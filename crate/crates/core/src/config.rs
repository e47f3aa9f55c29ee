//! Run configuration: sectioned `key = value` text (see [`crate::kv`]).
//!
//! ```text
//! format = fibernoise-run 1
//!
//! [files]
//! response = silica_response.model   # optional; absent means h = δ
//! profile = fiber.profile            # optional; absent means transparent
//!
//! [fiber]                            # SI units, dB/km for loss and gain
//! wavelength_m = 1.55e-6
//! group_velocity_m_per_s = 2.04e8
//! gvd_s2_per_m = -1.27e-27
//! n2_m2_per_w = 2.6e-20
//! mode_area_m2 = 5e-11
//! t0_s = 1e-13
//! temperature_k = 0
//! loss_db_per_km = 0
//! gain_db_per_km = 0
//! photon_number = 1e8                # optional override of n̄
//!
//! [grid]
//! modes = 512
//! window = 20
//! zeta_end = 1
//! dzeta = 1e-3
//! dispersion = anomalous             # optional; default from the sign of k''
//! representation = wigner            # or positive-p
//!
//! [input]
//! shape = sech                       # sech, gaussian or vacuum
//! amplitude = 1
//! width = 1
//! center = 0
//! frequency = 0
//!
//! [run]
//! trajectory_count = 1000
//! master_seed = 1
//! checkpoints = 0 0.5 1
//! output_dir = out
//! threads = 4                        # optional
//! divergence_threshold = 0.01
//! overflow_bound = 1e8
//! noise_substeps = 1
//! keep_fields = 0
//!
//! [noise]
//! initial = true
//! additive = true
//! raman = true
//! verify_draws = 10000
//!
//! [observables]
//! ordering = normal
//! local_oscillator = input           # repeatable: input, sech <w>, gaussian <w>
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! A `[derived]` section (written into run manifests) is ignored on read.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Dispersion, GridError, Representation, SimulationGrid};
use crate::kv::{self, fmt_f64, Entry, ParseError};
use crate::model::{ModelError, PhysicalFiber};
use crate::noise::NoiseSwitches;
use crate::observables::Ordering;

const FORMAT: &str = "fibernoise-run 1";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    Unknown {
        line: usize,
        section: String,
        key: String,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Sech,
    Gaussian,
    Vacuum,
}

impl std::fmt::Display for PulseShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PulseShape::Sech => "sech",
            PulseShape::Gaussian => "gaussian",
            PulseShape::Vacuum => "vacuum",
        })
    }
}

impl std::str::FromStr for PulseShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sech" => Ok(PulseShape::Sech),
            "gaussian" => Ok(PulseShape::Gaussian),
            "vacuum" => Ok(PulseShape::Vacuum),
            other => Err(format!("unknown pulse shape `{other}`")),
        }
    }
}

/// Coherent input `A f((τ-τc)/w) e^{-iΩ₀τ}`; `f` is `sech` or `exp(-x²/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPulse {
    pub shape: PulseShape,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub frequency: f64,
}

impl Default for InputPulse {
    fn default() -> Self {
        InputPulse {
            shape: PulseShape::Sech,
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
            frequency: 0.0,
        }
    }
}

impl InputPulse {
    /// Samples the pulse on the grid. With `φ̃ = ∫e^{iΩτ}φ`, the factor
    /// `e^{-iΩ₀τ}` centers the spectrum at `Ω₀`.
    pub fn sample(&self, grid: &SimulationGrid) -> Vec<Complex64> {
        grid.taus()
            .iter()
            .map(|&t| {
                let x = (t - self.center) / self.width;
                let envelope = match self.shape {
                    PulseShape::Sech => 1.0 / x.cosh(),
                    PulseShape::Gaussian => (-0.5 * x * x).exp(),
                    PulseShape::Vacuum => 0.0,
                };
                Complex64::from_polar(self.amplitude * envelope, -self.frequency * t)
            })
            .collect()
    }
}

/// Local oscillator mode for quadrature measurements.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalOscillatorSpec {
    /// The normalized input mean field.
    Input,
    Sech(f64),
    Gaussian(f64),
}

impl LocalOscillatorSpec {
    fn parse(e: &Entry) -> Result<Self, ConfigError> {
        let mut parts = e.value.split_whitespace();
        let kind = parts.next().unwrap_or("");
        let width = |p: Option<&str>| -> Result<f64, ConfigError> {
            let w: f64 = p.unwrap_or("1").parse().map_err(|_| {
                invalid(
                    "observables.local_oscillator",
                    format!("bad width in `{}`", e.value),
                )
            })?;
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(
                    "observables.local_oscillator",
                    "width must be positive",
                ));
            }
            Ok(w)
        };
        let spec = match kind {
            "input" => LocalOscillatorSpec::Input,
            "sech" => LocalOscillatorSpec::Sech(width(parts.next())?),
            "gaussian" => LocalOscillatorSpec::Gaussian(width(parts.next())?),
            other => {
                return Err(invalid(
                    "observables.local_oscillator",
                    format!("unknown local oscillator `{other}` (line {})", e.line),
                ))
            }
        };
        if parts.next().is_some() {
            return Err(invalid(
                "observables.local_oscillator",
                format!("trailing text in `{}`", e.value),
            ));
        }
        Ok(spec)
    }

    fn to_text(&self) -> String {
        match self {
            LocalOscillatorSpec::Input => "input".into(),
            LocalOscillatorSpec::Sech(w) => format!("sech {}", fmt_f64(*w)),
            LocalOscillatorSpec::Gaussian(w) => format!("gaussian {}", fmt_f64(*w)),
        }
    }

    /// Samples the mode with `Σ|LO|²Δτ = 1`; `None` if it has no energy on
    /// the grid (for example `input` with a vacuum pulse).
    pub fn sample(&self, grid: &SimulationGrid, input: &[Complex64]) -> Option<Vec<Complex64>> {
        let raw: Vec<Complex64> = match self {
            LocalOscillatorSpec::Input => input.to_vec(),
            LocalOscillatorSpec::Sech(w) => grid
                .taus()
                .iter()
                .map(|t| Complex64::new(1.0 / (t / w).cosh(), 0.0))
                .collect(),
            LocalOscillatorSpec::Gaussian(w) => grid
                .taus()
                .iter()
                .map(|t| Complex64::new((-0.5 * (t / w) * (t / w)).exp(), 0.0))
                .collect(),
        };
        let norm = (raw.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dtau()).sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| raw.iter().map(|z| z / norm).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Directory relative paths resolve against.
    pub base_dir: PathBuf,
    pub response_path: Option<PathBuf>,
    pub profile_path: Option<PathBuf>,
    pub fiber: PhysicalFiber,
    pub photon_number: Option<f64>,
    pub modes: usize,
    pub window: f64,
    pub zeta_end: f64,
    pub dzeta: f64,
    pub dispersion: Option<Dispersion>,
    pub representation: Representation,
    pub input: InputPulse,
    pub trajectory_count: usize,
    pub master_seed: u64,
    pub checkpoints: Vec<f64>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    pub divergence_threshold: f64,
    pub overflow_bound: f64,
    pub noise_substeps: usize,
    pub keep_fields: usize,
    pub noise: NoiseSwitches,
    pub verify_draws: usize,
    pub ordering: Ordering,
    pub local_oscillators: Vec<LocalOscillatorSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base_dir: PathBuf::from("."),
            response_path: None,
            profile_path: None,
            fiber: PhysicalFiber::default(),
            photon_number: None,
            modes: 512,
            window: 20.0,
            zeta_end: 1.0,
            dzeta: 1e-3,
            dispersion: None,
            representation: Representation::Wigner,
            input: InputPulse::default(),
            trajectory_count: 100,
            master_seed: 1,
            checkpoints: Vec::new(),
            output_dir: PathBuf::from("out"),
            threads: None,
            divergence_threshold: 0.01,
            overflow_bound: 1e8,
            noise_substeps: 1,
            keep_fields: 0,
            noise: NoiseSwitches::default(),
            verify_draws: 10_000,
            ordering: Ordering::Normal,
            local_oscillators: Vec::new(),
        }
    }
}

fn path_from(e: &Entry) -> Result<PathBuf, ConfigError> {
    if e.value.is_empty() {
        return Err(invalid(&format!("{}.{}", e.section, e.key), "empty path"));
    }
    Ok(PathBuf::from(&e.value))
}

impl RunConfig {
    /// Parses and validates; `base_dir` anchors relative paths.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let entries = kv::parse(text)?;
        let mut c = RunConfig {
            base_dir: base_dir.to_path_buf(),
            ..RunConfig::default()
        };
        let mut format_seen = false;
        for e in &entries {
            match (e.section.as_str(), e.key.as_str()) {
                ("", "format") => {
                    if e.value != FORMAT {
                        return Err(ParseError::new(
                            e.line,
                            format!("expected format `{FORMAT}`, found `{}`", e.value),
                        )
                        .into());
                    }
                    format_seen = true;
                }
                ("derived", _) => {}
                ("files", "response") => c.response_path = Some(path_from(e)?),
                ("files", "profile") => c.profile_path = Some(path_from(e)?),
                ("fiber", "wavelength_m") => c.fiber.wavelength = e.parse()?,
                ("fiber", "group_velocity_m_per_s") => c.fiber.group_velocity = e.parse()?,
                ("fiber", "gvd_s2_per_m") => c.fiber.gvd = e.parse()?,
                ("fiber", "n2_m2_per_w") => c.fiber.n2 = e.parse()?,
                ("fiber", "mode_area_m2") => c.fiber.mode_area = e.parse()?,
                ("fiber", "t0_s") => c.fiber.t0 = e.parse()?,
                ("fiber", "temperature_k") => c.fiber.temperature = e.parse()?,
                ("fiber", "loss_db_per_km") => c.fiber.loss_db_per_km = e.parse()?,
                ("fiber", "gain_db_per_km") => c.fiber.gain_db_per_km = e.parse()?,
                ("fiber", "photon_number") => c.photon_number = Some(e.parse()?),
                ("grid", "modes") => c.modes = e.parse()?,
                ("grid", "window") => c.window = e.parse()?,
                ("grid", "zeta_end") => c.zeta_end = e.parse()?,
                ("grid", "dzeta") => c.dzeta = e.parse()?,
                ("grid", "dispersion") => c.dispersion = Some(e.parse()?),
                ("grid", "representation") => c.representation = e.parse()?,
                ("input", "shape") => c.input.shape = e.parse()?,
                ("input", "amplitude") => c.input.amplitude = e.parse()?,
                ("input", "width") => c.input.width = e.parse()?,
                ("input", "center") => c.input.center = e.parse()?,
                ("input", "frequency") => c.input.frequency = e.parse()?,
                ("run", "trajectory_count") => c.trajectory_count = e.parse()?,
                ("run", "master_seed") => c.master_seed = e.parse()?,
                ("run", "checkpoints") => c.checkpoints = e.floats()?,
                ("run", "output_dir") => c.output_dir = path_from(e)?,
                ("run", "threads") => c.threads = Some(e.parse()?),
                ("run", "divergence_threshold") => c.divergence_threshold = e.parse()?,
                ("run", "overflow_bound") => c.overflow_bound = e.parse()?,
                ("run", "noise_substeps") => c.noise_substeps = e.parse()?,
                ("run", "keep_fields") => c.keep_fields = e.parse()?,
                ("noise", "initial") => c.noise.initial = e.bool()?,
                ("noise", "additive") => c.noise.additive = e.bool()?,
                ("noise", "raman") => c.noise.raman = e.bool()?,
                ("noise", "verify_draws") => c.verify_draws = e.parse()?,
                ("observables", "ordering") => c.ordering = e.parse()?,
                ("observables", "local_oscillator") => {
                    c.local_oscillators.push(LocalOscillatorSpec::parse(e)?)
                }
                (section, key) => {
                    return Err(ConfigError::Unknown {
                        line: e.line,
                        section: section.to_string(),
                        key: key.to_string(),
                    })
                }
            }
        }
        if !format_seen {
            return Err(ParseError::new(0, format!("missing `format = {FORMAT}` line")).into());
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trajectory_count == 0 {
            return Err(invalid("run.trajectory_count", "must be at least 1"));
        }
        let grid = self.grid()?;
        self.fiber.dimensionless_units()?;
        if let Some(n) = self.photon_number {
            if !(n.is_finite() && n > 0.0) {
                return Err(invalid("fiber.photon_number", "must be positive"));
            }
        }
        let end = grid.steps() as f64 * grid.dzeta;
        for &z in &self.checkpoints {
            if !(z.is_finite() && z >= 0.0 && z <= end * (1.0 + 1e-12)) {
                return Err(invalid(
                    "run.checkpoints",
                    format!("{z} lies outside [0, {end}]"),
                ));
            }
        }
        let steps: Vec<i64> = self
            .checkpoints
            .iter()
            .map(|z| (z / grid.dzeta).round() as i64)
            .collect();
        if steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(
                "run.checkpoints",
                "must be strictly increasing and at least one step apart",
            ));
        }
        if !(self.divergence_threshold >= 0.0 && self.divergence_threshold <= 1.0) {
            return Err(invalid("run.divergence_threshold", "must lie in [0, 1]"));
        }
        if !(self.overflow_bound > 0.0) {
            return Err(invalid("run.overflow_bound", "must be positive"));
        }
        if self.noise_substeps == 0 {
            return Err(invalid("run.noise_substeps", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(invalid("run.threads", "must be at least 1"));
        }
        if self.verify_draws < 100 {
            return Err(invalid("noise.verify_draws", "must be at least 100"));
        }
        if !(self.input.width.is_finite() && self.input.width > 0.0) {
            return Err(invalid("input.width", "must be positive"));
        }
        for (name, v) in [
            ("input.amplitude", self.input.amplitude),
            ("input.center", self.input.center),
            ("input.frequency", self.input.frequency),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if self.ordering == Ordering::Antinormal {
            return Err(invalid(
                "observables.ordering",
                "antinormal ordering is not supported",
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<SimulationGrid, ConfigError> {
        let dispersion = self
            .dispersion
            .unwrap_or_else(|| Dispersion::from_gvd(self.fiber.gvd));
        Ok(SimulationGrid::new(
            self.modes,
            self.window,
            self.zeta_end,
            self.dzeta,
            dispersion,
            self.representation,
            self.master_seed,
        )?)
    }

    /// `n̄`: the override if given, else derived from the fiber.
    pub fn photon_number(&self) -> Result<f64, ConfigError> {
        match self.photon_number {
            Some(n) => Ok(n),
            None => Ok(self.fiber.dimensionless_units()?.photon_number),
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = format!("format = {FORMAT}\n\n[files]\n");
        let path = |p: &PathBuf| p.to_string_lossy().into_owned();
        if let Some(p) = &self.response_path {
            let _ = writeln!(s, "response = {}", path(p));
        }
        if let Some(p) = &self.profile_path {
            let _ = writeln!(s, "profile = {}", path(p));
        }
        let f = &self.fiber;
        s.push_str("\n[fiber]\n");
        for (k, v) in [
            ("wavelength_m", f.wavelength),
            ("group_velocity_m_per_s", f.group_velocity),
            ("gvd_s2_per_m", f.gvd),
            ("n2_m2_per_w", f.n2),
            ("mode_area_m2", f.mode_area),
            ("t0_s", f.t0),
            ("temperature_k", f.temperature),
            ("loss_db_per_km", f.loss_db_per_km),
            ("gain_db_per_km", f.gain_db_per_km),
        ] {
            let _ = writeln!(s, "{k} = {}", fmt_f64(v));
        }
        if let Some(n) = self.photon_number {
            let _ = writeln!(s, "photon_number = {}", fmt_f64(n));
        }
        let _ = write!(
            s,
            "\n[grid]\nmodes = {}\nwindow = {}\nzeta_end = {}\ndzeta = {}\n",
            self.modes,
            fmt_f64(self.window),
            fmt_f64(self.zeta_end),
            fmt_f64(self.dzeta)
        );
        if let Some(d) = self.dispersion {
            let _ = writeln!(s, "dispersion = {d}");
        }
        let _ = writeln!(s, "representation = {}", self.representation);
        let p = &self.input;
        let _ = write!(
            s,
            "\n[input]\nshape = {}\namplitude = {}\nwidth = {}\ncenter = {}\nfrequency = {}\n",
            p.shape,
            fmt_f64(p.amplitude),
            fmt_f64(p.width),
            fmt_f64(p.center),
            fmt_f64(p.frequency)
        );
        let _ = write!(
            s,
            "\n[run]\ntrajectory_count = {}\nmaster_seed = {}\n",
            self.trajectory_count, self.master_seed
        );
        if !self.checkpoints.is_empty() {
            let list: Vec<String> = self.checkpoints.iter().map(|z| fmt_f64(*z)).collect();
            let _ = writeln!(s, "checkpoints = {}", list.join(" "));
        }
        let _ = writeln!(s, "output_dir = {}", path(&self.output_dir));
        if let Some(t) = self.threads {
            let _ = writeln!(s, "threads = {t}");
        }
        let _ = write!(
            s,
            "divergence_threshold = {}\noverflow_bound = {}\nnoise_substeps = {}\nkeep_fields = {}\n",
            fmt_f64(self.divergence_threshold),
            fmt_f64(self.overflow_bound),
            self.noise_substeps,
            self.keep_fields
        );
        let _ = write!(
            s,
            "\n[noise]\ninitial = {}\nadditive = {}\nraman = {}\nverify_draws = {}\n",
            self.noise.initial, self.noise.additive, self.noise.raman, self.verify_draws
        );
        let _ = write!(s, "\n[observables]\nordering = {}\n", self.ordering);
        for lo in &self.local_oscillators {
            let _ = writeln!(s, "local_oscillator = {}", lo.to_text());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "format = fibernoise-run 1\n[grid]\nmodes = 64\nwindow = 20\nzeta_end = 1\ndzeta = 0.01\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::parse(MINIMAL, Path::new("/tmp")).unwrap();
        assert_eq!(c.modes, 64);
        assert_eq!(c.representation, Representation::Wigner);
        assert_eq!(c.grid().unwrap().dispersion, Dispersion::Anomalous);
        assert!(c.photon_number().unwrap() > 1e3);
        assert_eq!(
            c.resolve(Path::new("a.model")),
            PathBuf::from("/tmp/a.model")
        );
    }

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::parse(MINIMAL, Path::new(".")).unwrap();
        c.response_path = Some("r.model".into());
        c.checkpoints = vec![0.0, 0.25, 1.0];
        c.threads = Some(3);
        c.photon_number = Some(1e6);
        c.representation = Representation::PositiveP;
        c.local_oscillators = vec![
            LocalOscillatorSpec::Input,
            LocalOscillatorSpec::Gaussian(0.7),
        ];
        c.input.frequency = -0.1;
        c.dispersion = Some(Dispersion::Normal);
        let text = c.to_text();
        let back =
            RunConfig::parse(&format!("{text}\n[derived]\nx0_m = 1000\n"), Path::new(".")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn zero_trajectories_names_the_field() {
        let text = format!("{MINIMAL}[run]\ntrajectory_count = 0\n");
        let err = RunConfig::parse(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("trajectory_count"), "{err}");
    }

    #[test]
    fn checkpoints_must_lie_in_range() {
        for bad in [
            "checkpoints = 0 2",
            "checkpoints = 0.5 0.2",
            "checkpoints = -0.1",
        ] {
            let text = format!("{MINIMAL}[run]\n{bad}\n");
            let err = RunConfig::parse(&text, Path::new(".")).unwrap_err();
            assert!(err.to_string().contains("checkpoints"), "{bad}: {err}");
        }
    }

    #[test]
    fn unknown_keys_and_missing_format() {
        let err =
            RunConfig::parse(&format!("{MINIMAL}[grid]\nmode = 3\n"), Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Unknown { .. }));
        assert!(RunConfig::parse("[grid]\nmodes = 64\n", Path::new(".")).is_err());
        assert!(
            RunConfig::parse(&format!("{MINIMAL}[grid]\nmodes = 100\n"), Path::new(".")).is_err()
        );
    }

    #[test]
    fn pulse_and_local_oscillators() {
        let g = SimulationGrid::new(
            128,
            20.0,
            1.0,
            0.1,
            Dispersion::Anomalous,
            Representation::Wigner,
            0,
        )
        .unwrap();
        let p = InputPulse::default().sample(&g);
        assert!((p[64].re - 1.0).abs() < 1e-15);
        let lo = LocalOscillatorSpec::Input.sample(&g, &p).unwrap();
        let n: f64 = lo.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dtau();
        assert!((n - 1.0).abs() < 1e-12);
        let vac = InputPulse {
            shape: PulseShape::Vacuum,
            ..InputPulse::default()
        };
        assert!(LocalOscillatorSpec::Input
            .sample(&g, &vac.sample(&g))
            .is_none());
    }
}
