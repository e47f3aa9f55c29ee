//! Empirical checks of generated noise against target moments.

use std::fmt::{self, Write as _};

use num_complex::Complex64;

use super::{stream, NoiseError, NoiseSpec, NoiseSynth, Purpose};
use crate::grid::{Fourier, Representation};

/// Fraction of bins that must lie within `PASS_SIGMAS` standard errors.
pub const PASS_FRACTION: f64 = 0.99;
pub const PASS_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    WignerAdditive,
    PositivePAdditive,
    WignerRaman,
    PositivePRaman,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::WignerAdditive,
        Generator::PositivePAdditive,
        Generator::WignerRaman,
        Generator::PositivePRaman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::WignerAdditive => "wigner-additive",
            Generator::PositivePAdditive => "positive-p-additive",
            Generator::WignerRaman => "wigner-raman",
            Generator::PositivePRaman => "positive-p-raman",
        }
    }

    pub fn representation(self) -> Representation {
        match self {
            Generator::WignerAdditive | Generator::WignerRaman => Representation::Wigner,
            Generator::PositivePAdditive | Generator::PositivePRaman => Representation::PositiveP,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinCheck {
    pub omega: f64,
    pub target: Complex64,
    pub empirical: Complex64,
    /// Standard error of the complex mean, `sqrt(se_re² + se_im²)`.
    pub se: f64,
    /// `|empirical - target| / se`; 0 when both the error and `se` vanish.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub name: String,
    pub bins: Vec<BinCheck>,
}

impl MomentReport {
    /// Plot-ready table with one header line.
    pub fn table(&self) -> String {
        let mut out = String::from("omega target_re target_im empirical_re empirical_im se z\n");
        for b in &self.bins {
            let _ = writeln!(
                out,
                "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.6e} {:.4}",
                b.omega, b.target.re, b.target.im, b.empirical.re, b.empirical.im, b.se, b.z
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub generator: String,
    pub draws: usize,
    pub moments: Vec<MomentReport>,
}

impl VerificationReport {
    pub fn bins(&self) -> impl Iterator<Item = &BinCheck> {
        self.moments.iter().flat_map(|m| m.bins.iter())
    }

    pub fn fraction_within(&self, sigmas: f64) -> f64 {
        let total = self.bins().count();
        if total == 0 {
            return 1.0;
        }
        self.bins().filter(|b| b.z <= sigmas).count() as f64 / total as f64
    }

    pub fn max_z(&self) -> f64 {
        self.bins().map(|b| b.z).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.fraction_within(PASS_SIGMAS) >= PASS_FRACTION
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} draws={} bins={} within_3se={:.4} max_z={:.2} {}",
            self.generator,
            self.draws,
            self.bins().count(),
            self.fraction_within(PASS_SIGMAS),
            self.max_z(),
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn variance_of_mean(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            self.m2 / (self.n - 1.0) / self.n
        }
    }
}

/// Compares per-bin sample means of generated products with targets.
///
/// `generator(d, samples)` fills `samples[m][k]` with draw `d`'s value of
/// moment `m` in bin `k`; targets give the expected means.
pub fn verify_noise_correlations<G>(
    name: &str,
    omegas: &[f64],
    targets: &[(String, Vec<Complex64>)],
    draws: usize,
    mut generator: G,
) -> Result<VerificationReport, NoiseError>
where
    G: FnMut(usize, &mut [Vec<Complex64>]),
{
    if draws < 100 {
        return Err(NoiseError::TooFewDraws(draws));
    }
    let bins = omegas.len();
    let mut samples = vec![vec![Complex64::new(0.0, 0.0); bins]; targets.len()];
    let mut acc = vec![vec![(Welford::default(), Welford::default()); bins]; targets.len()];
    for d in 0..draws {
        generator(d, &mut samples);
        for (row, sample_row) in acc.iter_mut().zip(&samples) {
            for ((re, im), z) in row.iter_mut().zip(sample_row) {
                re.push(z.re);
                im.push(z.im);
            }
        }
    }
    let moments = targets
        .iter()
        .zip(&acc)
        .map(|((label, target), row)| {
            // Errors below roundoff of the row's largest moment count as exact,
            // so a bin whose target vanishes is not judged on FFT residue.
            let scale = row
                .iter()
                .map(|(re, im)| re.mean.hypot(im.mean))
                .chain(target.iter().map(|t| t.norm()))
                .fold(0.0_f64, f64::max);
            let floor = 1e-12 * scale;
            MomentReport {
                name: label.clone(),
                bins: row
                    .iter()
                    .zip(target)
                    .zip(omegas)
                    .map(|(((re, im), &t), &omega)| {
                        let empirical = Complex64::new(re.mean, im.mean);
                        let se = (re.variance_of_mean() + im.variance_of_mean()).sqrt();
                        let err = (empirical - t).norm();
                        let z = if err <= floor {
                            0.0
                        } else if se > 0.0 {
                            err / se
                        } else if err <= 1e-12 * (1.0 + t.norm()) {
                            0.0
                        } else {
                            f64::INFINITY
                        };
                        BinCheck {
                            omega,
                            target: t,
                            empirical,
                            se,
                            z,
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(VerificationReport {
        generator: name.to_string(),
        draws,
        moments,
    })
}

/// Mode amplitudes recovered from a time-domain field drawn with step `dzeta`:
/// `ũ_k = Σ_j Γ_j e^{±iΩ_kτ_j} / (M sqrt(ΔΩ/(2π dζ)))`. Use `plus = true`
/// for fields synthesized with `e^{-iΩτ}` (Γ, Γ^R) and `false` for Γ^{R+}.
pub fn estimate_amplitudes(
    spec: &NoiseSpec,
    field: &[Complex64],
    dzeta: f64,
    plus: bool,
) -> Vec<Complex64> {
    let fourier = Fourier::for_grid(spec.grid());
    let mut scratch = fourier.scratch();
    let mut buf = field.to_vec();
    if plus {
        fourier.sum_plus(&mut buf, &mut scratch);
    } else {
        fourier.sum_minus(&mut buf, &mut scratch);
    }
    let s = 1.0 / (spec.grid().modes as f64 * spec.field_scale(dzeta));
    buf.iter_mut().for_each(|z| *z *= s);
    buf
}

/// Runs one generator end to end (time-domain synthesis, then amplitude
/// recovery) for `draws` independent draws and checks its moments.
pub fn verify_generator(
    spec: &NoiseSpec,
    generator: Generator,
    draws: usize,
    dzeta: f64,
    master_seed: u64,
) -> Result<VerificationReport, NoiseError> {
    if spec.representation() != generator.representation() {
        return Err(NoiseError::WrongRepresentation {
            generator: generator.name(),
            representation: spec.representation(),
        });
    }
    let grid = spec.grid().clone();
    let m = grid.modes;
    let omegas = grid.omegas();
    let zeros = vec![Complex64::new(0.0, 0.0); m];
    let mirror: Vec<usize> = (0..m).map(|k| grid.mirror(k)).collect();
    let mut synth = NoiseSynth::new(&grid);
    let mut field = zeros.clone();
    let mut field_plus = zeros.clone();
    let mut real = vec![0.0; m];
    let rng_for = |d: usize| stream(master_seed, d as u64, 0, Purpose::Verification);
    // a switched-off source must produce exactly nothing
    let active = match generator {
        Generator::WignerAdditive | Generator::PositivePAdditive => spec.switches().additive,
        Generator::WignerRaman | Generator::PositivePRaman => spec.switches().raman,
    };
    let on = if active { 1.0 } else { 0.0 };

    match generator {
        Generator::WignerAdditive | Generator::PositivePAdditive | Generator::WignerRaman => {
            let density: Vec<f64> = if generator == Generator::WignerRaman {
                spec.raman_density().to_vec()
            } else {
                spec.additive_density().to_vec()
            };
            let targets = vec![
                (
                    "power".to_string(),
                    density
                        .iter()
                        .map(|&s| Complex64::new(on * s, 0.0))
                        .collect(),
                ),
                ("mean".to_string(), zeros.clone()),
            ];
            verify_noise_correlations(generator.name(), &omegas, &targets, draws, |d, out| {
                let mut rng = rng_for(d);
                if generator == Generator::WignerRaman {
                    synth.raman_wigner(spec, dzeta, &mut rng, &mut real);
                    for (f, &r) in field.iter_mut().zip(&real) {
                        *f = Complex64::new(r, 0.0);
                    }
                } else {
                    synth.additive(spec, dzeta, &mut rng, &mut field);
                }
                let u = estimate_amplitudes(spec, &field, dzeta, true);
                for k in 0..m {
                    out[0][k] = Complex64::new(u[k].norm_sqr(), 0.0);
                    out[1][k] = u[k];
                }
            })
        }
        Generator::PositivePRaman => {
            let self_moment: Vec<Complex64> = omegas
                .iter()
                .map(|&w| spec.raman_self_moment(w) * on)
                .collect();
            let targets = vec![
                ("self".to_string(), self_moment.clone()),
                (
                    "self_plus".to_string(),
                    self_moment.iter().map(|z| z.conj()).collect(),
                ),
                (
                    "cross".to_string(),
                    omegas
                        .iter()
                        .map(|&w| Complex64::new(on * spec.raman_cross_moment(w), 0.0))
                        .collect(),
                ),
                ("mean".to_string(), zeros.clone()),
                ("mean_plus".to_string(), zeros.clone()),
            ];
            verify_noise_correlations(generator.name(), &omegas, &targets, draws, |d, out| {
                let mut rng = rng_for(d);
                synth.raman_posp(spec, dzeta, &mut rng, &mut field, &mut field_plus);
                let u = estimate_amplitudes(spec, &field, dzeta, true);
                let v = estimate_amplitudes(spec, &field_plus, dzeta, false);
                for k in 0..m {
                    out[0][k] = u[k] * u[mirror[k]];
                    out[1][k] = v[k] * v[mirror[k]];
                    out[2][k] = v[k] * u[k];
                    out[3][k] = u[k];
                    out[4][k] = v[k];
                }
            })
        }
    }
}
