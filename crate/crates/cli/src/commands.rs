use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use fibernoise::config::RunConfig;
use fibernoise::integrator::{
    checkpoint_index, run_ensemble, write_checkpoints, CheckpointFile, EnsembleConfig,
    PropagationOptions, Propagator,
};
use fibernoise::model::{
    parse_profile, parse_response_model, write_profile, write_response_model, DimensionlessUnits,
    GainLossProfile, PhysicalFiber, ResponseModel, Thermal,
};
use fibernoise::noise::{verify_generator, Generator, NoiseSpec, NoiseSwitches};
use fibernoise::observables::{
    flux_table, mean_frequency_table, min_quadrature_variance, quadrature_variance, spectrum_table,
    total_photons, EnsembleResult,
};
use fibernoise::ramanfit::{
    fit_lorentzians, normalize_total_response, parse_spectrum_table, FitError, FitOptions,
    FrequencyUnit,
};
use fibernoise::{Representation, SimulationGrid};

use crate::{CliError, Overrides, THREADS_ENV};

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Config(format!("{}: file not found", path.display()))
        } else {
            CliError::Io(format!("{}: {e}", path.display()))
        }
    })
}

fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn load_config(common: &Overrides) -> Result<RunConfig, CliError> {
    let text = read_text(&common.config)?;
    let base = common
        .config
        .parent()
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let mut cfg = RunConfig::parse(&text, &base)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn output_dir(common: &Overrides, cfg: &RunConfig) -> PathBuf {
    match &common.out {
        Some(p) => p.clone(),
        None => cfg.resolve(&cfg.output_dir),
    }
}

/// `--threads`, then the environment, then the config.
fn thread_count(common: &Overrides, cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = common.threads {
        return if n == 0 {
            Err(CliError::Config("--threads must be at least 1".into()))
        } else {
            Ok(Some(n))
        };
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        };
    }
    Ok(cfg.threads)
}

/// Everything a run or verification needs, resolved from the config.
struct Setup {
    grid: SimulationGrid,
    units: DimensionlessUnits,
    photon_number: f64,
    response: ResponseModel,
    /// Profile as read from the file, before the fiber's dB/km offsets.
    base_profile: GainLossProfile,
    profile: GainLossProfile,
    thermal: Thermal,
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let config = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
    let grid = cfg.grid().map_err(|e| config(&e))?;
    let units = cfg.fiber.dimensionless_units().map_err(|e| config(&e))?;
    let photon_number = cfg.photon_number().map_err(|e| config(&e))?;
    let t0 = cfg.fiber.t0;
    let response = match &cfg.response_path {
        Some(p) => {
            let path = cfg.resolve(p);
            let model = parse_response_model(&read_text(&path)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            match model.time_scale {
                Some(ts) if ((ts - t0) / t0).abs() > 1e-12 => {
                    model.rescaled_time(t0).expect("time scale present")
                }
                _ => model,
            }
        }
        None => ResponseModel::electronic_only(),
    };
    let base_profile = match &cfg.profile_path {
        Some(p) => {
            let path = cfg.resolve(p);
            parse_profile(&read_text(&path)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => GainLossProfile::transparent(),
    };
    let profile = base_profile
        .with_flat_offsets(units.alpha_gain, units.alpha_loss)
        .map_err(|e| config(&e))?;
    let thermal = cfg.fiber.thermal().map_err(|e| config(&e))?;
    Ok(Setup {
        grid,
        units,
        photon_number,
        response,
        base_profile,
        profile,
        thermal,
    })
}

fn noise_spec(
    s: &Setup,
    grid: &SimulationGrid,
    switches: NoiseSwitches,
) -> Result<NoiseSpec, CliError> {
    NoiseSpec::new(
        grid,
        &s.response,
        &s.profile,
        s.thermal,
        s.photon_number,
        switches,
    )
    .map_err(|e| CliError::Simulation(e.to_string()))
}

fn derived_section(s: &Setup) -> String {
    let g = &s.grid;
    let mut out = String::from("\n[derived]\n");
    let _ = writeln!(out, "photon_number = {:e}", s.photon_number);
    let _ = writeln!(out, "t0_s = {:e}", s.units.t0);
    let _ = writeln!(out, "x0_m = {:e}", s.units.x0);
    let _ = writeln!(out, "flux_scale_per_s = {:e}", s.photon_number / s.units.t0);
    let _ = writeln!(out, "alpha_loss = {:e}", s.units.alpha_loss);
    let _ = writeln!(out, "alpha_gain = {:e}", s.units.alpha_gain);
    let _ = writeln!(out, "dtau = {:e}", g.dtau());
    let _ = writeln!(out, "domega = {:e}", g.domega());
    let _ = writeln!(out, "steps = {}", g.steps());
    let _ = writeln!(out, "dispersion = {}", g.dispersion);
    let _ = writeln!(out, "raman_fraction = {:e}", s.response.raman_fraction());
    out
}

pub fn run(common: &Overrides, trajectories: Option<usize>) -> Result<(), CliError> {
    let mut cfg = load_config(common)?;
    if let Some(n) = trajectories {
        cfg.trajectory_count = n;
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let threads = thread_count(common, &cfg)?;
    let out = output_dir(common, &cfg);
    let s = setup(&cfg)?;
    let grid = s.grid.clone();
    let mean = cfg.input.sample(&grid);
    let mut los = Vec::new();
    for spec in &cfg.local_oscillators {
        los.push(spec.sample(&grid, &mean).ok_or_else(|| {
            CliError::Config("observables.local_oscillator: mode has no energy on the grid".into())
        })?);
    }
    let spec = noise_spec(&s, &grid, cfg.noise)?;
    let propagator = Propagator::new(&grid, &s.response, &s.profile);
    let mut ensemble = EnsembleConfig::new(propagator, spec, mean);
    ensemble.options = PropagationOptions {
        checkpoints: cfg.checkpoints.clone(),
        overflow_bound: cfg.overflow_bound,
        noise_substeps: cfg.noise_substeps,
        diagnostics_every: 0,
    };
    ensemble.local_oscillators = los;
    ensemble.threads = threads;
    ensemble.divergence_threshold = cfg.divergence_threshold;
    ensemble.keep_fields = cfg.keep_fields;
    let result = run_ensemble(&ensemble, cfg.trajectory_count)
        .map_err(|e| CliError::Simulation(e.to_string()))?;

    create_dir(&out)?;
    let mut manifest = cfg.clone();
    manifest.response_path = Some("response.model".into());
    manifest.profile_path = Some("gain_loss.profile".into());
    manifest.output_dir = ".".into();
    manifest.threads = None;
    write_file(
        &out,
        "manifest.conf",
        manifest.to_text() + &derived_section(&s),
    )?;
    write_file(
        &out,
        "response.model",
        write_response_model(&s.response, &["response model used by this run"]),
    )?;
    write_file(&out, "gain_loss.profile", write_profile(&s.base_profile))?;
    write_tables(&out, &cfg, &result)?;
    if !result.kept.is_empty() {
        let dir = out.join("fields");
        create_dir(&dir)?;
        let mut index = String::new();
        for rec in &result.kept {
            let name = format!("trajectory_{}.bin", rec.trajectory);
            let file = CheckpointFile {
                grid: grid.clone(),
                trajectory: rec.trajectory,
                states: rec.snapshots.clone(),
            };
            let bytes =
                write_checkpoints(&file).map_err(|e| CliError::Simulation(e.to_string()))?;
            write_file(&dir, &name, bytes)?;
            let part = checkpoint_index(&name, &file);
            if index.is_empty() {
                index.push_str(&part);
            } else {
                index.extend(part.lines().skip(1).map(|l| format!("{l}\n")));
            }
        }
        write_file(&dir, "index.txt", index)?;
    }
    println!("{}", out.join("summary.txt").display());
    Ok(())
}

fn write_tables(out: &Path, cfg: &RunConfig, result: &EnsembleResult) -> Result<(), CliError> {
    let obs = |e: fibernoise::observables::ObservableError| CliError::Simulation(e.to_string());
    let mut summary = String::new();
    let _ = writeln!(summary, "representation = {}", result.representation);
    let _ = writeln!(summary, "master_seed = {}", result.grid.master_seed);
    let _ = writeln!(summary, "trajectory_count = {}", result.trajectory_count);
    let _ = writeln!(summary, "diverged_count = {}", result.diverged_count);
    let mut quad =
        String::from("checkpoint zeta oscillator variance se min_variance min_se min_theta\n");
    for (i, c) in result.moments.iter().enumerate() {
        write_file(
            out,
            &format!("flux_{i}.txt"),
            flux_table(result, i).map_err(obs)?,
        )?;
        write_file(
            out,
            &format!("spectrum_{i}.txt"),
            spectrum_table(result, i, cfg.ordering).map_err(obs)?,
        )?;
        let total = total_photons(result, i).map_err(obs)?;
        let _ = writeln!(
            summary,
            "checkpoint.{i} = {:e} {:e} {:e}",
            c.zeta, total.value, total.se
        );
        for (j, lo) in result.local_oscillators.iter().enumerate() {
            let v = quadrature_variance(result, i, lo, cfg.ordering).map_err(obs)?;
            let m = min_quadrature_variance(result, i, lo, cfg.ordering).map_err(obs)?;
            let _ = writeln!(
                quad,
                "{i} {:.12e} {j} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}",
                c.zeta, v.value, v.se, m.value, m.se, m.theta
            );
        }
    }
    let _ = writeln!(summary, "# checkpoint.<i> = zeta total_photons(normal) se");
    for w in &result.warnings {
        let _ = writeln!(summary, "warning = {w}");
    }
    write_file(out, "mean_frequency.txt", mean_frequency_table(result))?;
    if !result.local_oscillators.is_empty() {
        write_file(out, "quadrature.txt", quad)?;
    }
    write_file(out, "summary.txt", summary)
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Gain table: frequency, gain and optional weight columns.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of Lorentzian terms.
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
    /// Frequency column unit: thz, cm-1 or omega.
    #[arg(long, default_value = "thz")]
    pub unit: FrequencyUnit,
    /// Time scale t0 in seconds for converting physical frequencies.
    #[arg(long, default_value_t = 1e-13)]
    pub t0: f64,
    /// Rescale the fitted model to this Raman fraction.
    #[arg(long)]
    pub f_target: Option<f64>,
    /// Upper bound on the center of term 0 (dimensionless).
    #[arg(long)]
    pub brillouin_max: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    /// Output directory.
    #[arg(long, default_value = "fit")]
    pub out: PathBuf,
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    if !(args.t0.is_finite() && args.t0 > 0.0) {
        return Err(CliError::Config("--t0 must be positive".into()));
    }
    let text = read_text(&args.input)?;
    let mut samples = parse_spectrum_table(&text, args.unit, Some(args.t0))
        .map_err(|e| CliError::Config(format!("{}: {e}", args.input.display())))?;
    samples.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let options = FitOptions {
        max_iterations: args.max_iterations,
        brillouin_center_max: args.brillouin_max,
        time_scale: Some(args.t0),
        ..FitOptions::default()
    };
    let (report, converged) = match fit_lorentzians(&samples, args.terms, None, &options) {
        Ok(r) => (r, true),
        Err(FitError::NoConvergence(r)) => (*r, false),
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let mut report = report;
    report.model = normalize_total_response(&report.model, args.f_target)
        .map_err(|e| CliError::Config(e.to_string()))?;
    create_dir(&args.out)?;
    let source = format!(
        "fitted to {}",
        args.input
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
    );
    write_file(
        &args.out,
        "response.model",
        write_response_model(
            &report.model,
            &[&source, &format!("{} Lorentzian terms", args.terms)],
        ),
    )?;
    write_file(&args.out, "fit_report.txt", report.to_text())?;
    write_file(&args.out, "fit_curve.txt", report.curve_table(&samples))?;
    println!("raman_fraction = {:.6}", report.raman_fraction());
    println!("residual_rms = {:.6e}", report.residual_rms);
    if !converged {
        return Err(CliError::Simulation(format!(
            "fit did not converge in {} iterations; partial report written",
            report.iterations
        )));
    }
    Ok(())
}

pub fn verify(common: &Overrides, draws: Option<usize>, scale: f64) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let draws = draws.unwrap_or(cfg.verify_draws);
    if draws < 100 {
        return Err(CliError::Config("--draws must be at least 100".into()));
    }
    let threads = thread_count(common, &cfg)?;
    let out = output_dir(common, &cfg);
    let s = setup(&cfg)?;
    let mut reports = Vec::new();
    for generator in Generator::ALL {
        let mut grid = s.grid.clone();
        grid.representation = generator.representation();
        let spec = noise_spec(&s, &grid, cfg.noise)?.with_amplitude_scale(scale);
        reports.push((generator, spec, grid));
    }
    let run = || {
        use rayon_free::par_map;
        par_map(&reports, |(generator, spec, grid)| {
            verify_generator(spec, *generator, draws, grid.dzeta, grid.master_seed)
        })
    };
    let results = match threads {
        Some(n) => rayon_free::with_threads(n, run),
        None => run(),
    };
    create_dir(&out)?;
    let mut summary = String::from("generator draws fraction_within_3se max_z passed\n");
    let mut all_passed = true;
    for ((generator, _, _), report) in reports.iter().zip(results) {
        let report = report.map_err(|e| CliError::Simulation(e.to_string()))?;
        for m in &report.moments {
            write_file(
                &out,
                &format!("verify_{}_{}.txt", generator.name(), m.name),
                m.table(),
            )?;
        }
        let _ = writeln!(
            summary,
            "{} {} {:.6} {:.3} {}",
            generator.name(),
            report.draws,
            report.fraction_within(3.0),
            report.max_z(),
            report.passed()
        );
        println!("{}", report.summary_line());
        all_passed &= report.passed();
    }
    write_file(&out, "verify_summary.txt", summary)?;
    if !all_passed {
        return Err(CliError::Simulation("noise verification failed".into()));
    }
    Ok(())
}

/// Small parallel map over the four generators without pulling rayon into
/// the CLI: one scoped thread each, capped by the thread setting.
mod rayon_free {
    use std::cell::Cell;

    thread_local! {
        static CAP: Cell<usize> = const { Cell::new(usize::MAX) };
    }

    pub fn with_threads<R>(n: usize, f: impl FnOnce() -> R) -> R {
        let old = CAP.with(|c| c.replace(n.max(1)));
        let r = f();
        CAP.with(|c| c.set(old));
        r
    }

    pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
        let cap = CAP.with(|c| c.get()).min(items.len()).max(1);
        let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
        for (chunk_items, chunk_out) in items.chunks(cap).zip(out.chunks_mut(cap)) {
            std::thread::scope(|s| {
                let handles: Vec<_> = chunk_items.iter().map(|it| s.spawn(|| f(it))).collect();
                for (slot, h) in chunk_out.iter_mut().zip(handles) {
                    *slot = Some(h.join().expect("verification thread panicked"));
                }
            });
        }
        out.into_iter().map(|r| r.expect("filled")).collect()
    }
}

#[derive(Debug, Args)]
pub struct UnitsArgs {
    /// Run configuration whose [fiber] section to use; defaults otherwise.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Loss figure in dB/km (overrides the config).
    #[arg(long)]
    pub loss_db_per_km: Option<f64>,
    /// Gain figure in dB/km (overrides the config).
    #[arg(long)]
    pub gain_db_per_km: Option<f64>,
    /// Pulse time scale in seconds (overrides the config).
    #[arg(long)]
    pub t0: Option<f64>,
}

pub fn units(args: &UnitsArgs) -> Result<(), CliError> {
    let mut fiber = match &args.config {
        Some(p) => {
            let base = p.parent().unwrap_or(Path::new("."));
            RunConfig::parse(&read_text(p)?, base)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
                .fiber
        }
        None => PhysicalFiber::default(),
    };
    if let Some(v) = args.loss_db_per_km {
        fiber.loss_db_per_km = v;
    }
    if let Some(v) = args.gain_db_per_km {
        fiber.gain_db_per_km = v;
    }
    if let Some(v) = args.t0 {
        fiber.t0 = v;
    }
    let u = fiber
        .dimensionless_units()
        .map_err(|e| CliError::Config(e.to_string()))?;
    println!("loss_db_per_km = {}", fiber.loss_db_per_km);
    println!("gain_db_per_km = {}", fiber.gain_db_per_km);
    print!("{u}");
    let _ = Representation::Wigner;
    Ok(())
}
