//! Stochastic fields for both phase-space representations.
//!
//! Noise amplitudes use the symmetric Fourier convention
//! `Γ(Ω) = (2π)^{-1/2} ∫dτ e^{iΩτ} Γ(τ)`. Every correlator is white in ζ and
//! on the grid `δ(Ω-Ω') → 1/ΔΩ`, `δ(ζ-ζ') → 1/dζ`. A field for one step is
//! synthesized from normalized mode amplitudes `ũ_k` with `E|ũ_k|² = S(Ω_k)`:
//!
//! `Γ(τ_j) = sqrt(ΔΩ / (2π dζ)) Σ_k ũ_k e^{-iΩ_k τ_j}`
//!
//! so a flat density `S` gives `E|Γ(τ_j)|² = S / (Δτ dζ)`.

mod pair;
mod rng;
mod verify;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::grid::{Fourier, GridError, Representation, SimulationGrid};
use crate::integrator::FieldState;
use crate::model::{GainLossProfile, ModelError, ResponseModel, Thermal};

pub use pair::{factor_pair, PairFactor, EIGEN_TOLERANCE};
pub use rng::{stream, Purpose};
pub use verify::{
    estimate_amplitudes, verify_generator, verify_noise_correlations, BinCheck, Generator,
    MomentReport, VerificationReport,
};

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("Raman noise covariance is not positive semidefinite at mode {mode} (Ω = {omega}): eigenvalue {eigenvalue:e}")]
    NonPositiveCovariance {
        mode: usize,
        omega: f64,
        eigenvalue: f64,
    },
    #[error("photon number must be positive and finite, got {0}")]
    PhotonNumber(f64),
    #[error("mean field has {got} samples, grid has {expected}")]
    Length { expected: usize, got: usize },
    #[error("verification needs at least 100 draws, got {0}")]
    TooFewDraws(usize),
    #[error("{generator} noise does not exist in the {representation} representation")]
    WrongRepresentation {
        generator: &'static str,
        representation: Representation,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which noise sources are active. Turning all of them off gives the
/// deterministic (mean-field) equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseSwitches {
    pub initial: bool,
    pub additive: bool,
    pub raman: bool,
}

impl Default for NoiseSwitches {
    fn default() -> Self {
        NoiseSwitches {
            initial: true,
            additive: true,
            raman: true,
        }
    }
}

impl NoiseSwitches {
    pub fn off() -> Self {
        NoiseSwitches {
            initial: false,
            additive: false,
            raman: false,
        }
    }

    pub fn any(&self) -> bool {
        self.initial || self.additive || self.raman
    }
}

/// Everything the generators need, with per-mode spectral densities
/// precomputed on the grid.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    grid: SimulationGrid,
    response: ResponseModel,
    profile: GainLossProfile,
    thermal: Thermal,
    photon_number: f64,
    switches: NoiseSwitches,
    amplitude_scale: f64,
    additive_density: Vec<f64>,
    raman_density: Vec<f64>,
    raman_pairs: Vec<PairFactor>,
}

fn theta_neg(omega: f64) -> f64 {
    if omega < 0.0 {
        1.0
    } else {
        0.0
    }
}

impl NoiseSpec {
    pub fn new(
        grid: &SimulationGrid,
        response: &ResponseModel,
        profile: &GainLossProfile,
        thermal: Thermal,
        photon_number: f64,
        switches: NoiseSwitches,
    ) -> Result<Self, NoiseError> {
        grid.validate()?;
        response.validate()?;
        profile.validate()?;
        if !(photon_number.is_finite() && photon_number > 0.0) {
            return Err(NoiseError::PhotonNumber(photon_number));
        }
        let mut spec = NoiseSpec {
            grid: grid.clone(),
            response: response.clone(),
            profile: profile.clone(),
            thermal,
            photon_number,
            switches,
            amplitude_scale: 1.0,
            additive_density: Vec::new(),
            raman_density: Vec::new(),
            raman_pairs: Vec::new(),
        };
        let omegas = grid.omegas();
        spec.additive_density = omegas
            .iter()
            .map(|&w| match grid.representation {
                Representation::Wigner => {
                    (profile.gain_at(w) + profile.loss_at(w)) / (2.0 * photon_number)
                }
                Representation::PositiveP => profile.gain_at(w) / photon_number,
            })
            .collect();
        match grid.representation {
            Representation::Wigner => {
                spec.raman_density = omegas
                    .iter()
                    .map(|&w| thermal.weighted(response.raman_gain(w), w, 0.5) / photon_number)
                    .collect();
            }
            Representation::PositiveP => {
                if switches.raman {
                    spec.raman_pairs = (0..=grid.modes / 2)
                        .map(|k| factor_pair(&spec.pair_targets(k), k, grid.omega(k)))
                        .collect::<Result<_, _>>()?;
                }
            }
        }
        Ok(spec)
    }

    /// Multiplies every generated noise amplitude by `scale`. Only meant for
    /// negative controls of the verification suite.
    pub fn with_amplitude_scale(mut self, scale: f64) -> Self {
        self.amplitude_scale = scale;
        self
    }

    pub fn grid(&self) -> &SimulationGrid {
        &self.grid
    }

    pub fn response(&self) -> &ResponseModel {
        &self.response
    }

    pub fn profile(&self) -> &GainLossProfile {
        &self.profile
    }

    pub fn thermal(&self) -> Thermal {
        self.thermal
    }

    pub fn photon_number(&self) -> f64 {
        self.photon_number
    }

    pub fn switches(&self) -> NoiseSwitches {
        self.switches
    }

    pub fn representation(&self) -> Representation {
        self.grid.representation
    }

    /// Additive spectral density per mode: `(α^G+α^A)/2n̄` (Wigner) or `α^G/n̄` (positive-P).
    pub fn additive_density(&self) -> &[f64] {
        &self.additive_density
    }

    /// Wigner Raman spectral density `α^R(|Ω|)(n_th + ½)/n̄` per mode.
    pub fn raman_density(&self) -> &[f64] {
        &self.raman_density
    }

    /// Positive-P `E[Γ^R(Ω)Γ^R(-Ω)]` density `{(n_th+½)α^R(|Ω|) - i h'(Ω)}/n̄`.
    pub fn raman_self_moment(&self, omega: f64) -> Complex64 {
        let alpha = self.response.raman_gain(omega);
        let h_re = self.response.response_spectrum(omega).re;
        Complex64::new(self.thermal.weighted(alpha, omega, 0.5), -h_re) / self.photon_number
    }

    /// Positive-P `E[Γ^{R+}(Ω)Γ^R(Ω)]` density `(n_th + Θ(-Ω))α^R(|Ω|)/n̄`.
    pub fn raman_cross_moment(&self, omega: f64) -> f64 {
        let alpha = self.response.raman_gain(omega);
        self.thermal.weighted(alpha, omega, theta_neg(omega)) / self.photon_number
    }

    /// Pseudo-covariance of `(u_k, u_-k, v_k, v_-k)`, or of `(u_k, v_k)` for
    /// the self-mirrored zero and Nyquist bins.
    pub fn pair_targets(&self, k: usize) -> DMatrix<Complex64> {
        let m = self.grid.mirror(k);
        let w = self.grid.omega(k);
        let a = self.raman_self_moment(w);
        let b = Complex64::new(self.raman_cross_moment(w), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        if m == k {
            DMatrix::from_row_slice(2, 2, &[a, b, b, a.conj()])
        } else {
            let bm = Complex64::new(self.raman_cross_moment(self.grid.omega(m)), 0.0);
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    zero,
                    a,
                    b,
                    zero,
                    a,
                    zero,
                    zero,
                    bm,
                    b,
                    zero,
                    zero,
                    a.conj(),
                    zero,
                    bm,
                    a.conj(),
                    zero,
                ],
            )
        }
    }

    pub fn pair_factor(&self, k: usize) -> Option<&PairFactor> {
        self.raman_pairs.get(k)
    }

    /// `sqrt(ΔΩ/(2π dζ))`, the amplitude-to-field factor.
    pub fn field_scale(&self, dzeta: f64) -> f64 {
        (self.grid.domega() / (2.0 * PI * dzeta)).sqrt()
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Reusable FFT plans and buffers for drawing noise fields.
#[derive(Debug, Clone)]
pub struct NoiseSynth {
    fourier: Fourier,
    scratch: Vec<Complex64>,
    amps: Vec<Complex64>,
    amps_plus: Vec<Complex64>,
    xi: Vec<f64>,
    z: Vec<Complex64>,
}

impl NoiseSynth {
    pub fn new(grid: &SimulationGrid) -> Self {
        let fourier = Fourier::for_grid(grid);
        let scratch = fourier.scratch();
        NoiseSynth {
            fourier,
            scratch,
            amps: vec![Complex64::new(0.0, 0.0); grid.modes],
            amps_plus: vec![Complex64::new(0.0, 0.0); grid.modes],
            xi: vec![0.0; 8],
            z: vec![Complex64::new(0.0, 0.0); 4],
        }
    }

    /// Circular mode amplitudes with `E|ũ_k|² = S_k`.
    pub fn additive_amplitudes<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        rng: &mut R,
    ) -> &[Complex64] {
        for (a, &s) in self.amps.iter_mut().zip(spec.additive_density()) {
            let sd = (0.5 * s).sqrt();
            let re = normal(rng);
            let im = normal(rng);
            *a = Complex64::new(sd * re, sd * im);
        }
        &self.amps
    }

    /// Writes `Γ(τ)` for one step into `out`; returns `false` (and zeros)
    /// when the source is off or has zero density.
    pub fn additive<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        dzeta: f64,
        rng: &mut R,
        out: &mut [Complex64],
    ) -> bool {
        if !spec.switches.additive || spec.additive_density.iter().all(|&s| s == 0.0) {
            out.fill(Complex64::new(0.0, 0.0));
            return false;
        }
        self.additive_amplitudes(spec, rng);
        out.copy_from_slice(&self.amps);
        self.fourier.sum_minus(out, &mut self.scratch);
        let c = spec.field_scale(dzeta) * spec.amplitude_scale;
        out.iter_mut().for_each(|x| *x *= c);
        true
    }

    /// Hermitian amplitudes for the real Wigner Raman field.
    pub fn raman_wigner_amplitudes<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        rng: &mut R,
    ) -> &[Complex64] {
        let m = spec.grid.modes;
        let s = spec.raman_density();
        for k in 0..=m / 2 {
            let mk = spec.grid.mirror(k);
            if mk == k {
                self.amps[k] = Complex64::new(s[k].sqrt() * normal(rng), 0.0);
            } else {
                let sd = (0.5 * s[k]).sqrt();
                let re = normal(rng);
                let im = normal(rng);
                let a = Complex64::new(sd * re, sd * im);
                self.amps[k] = a;
                self.amps[mk] = a.conj();
            }
        }
        &self.amps
    }

    pub fn raman_wigner<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        dzeta: f64,
        rng: &mut R,
        out: &mut [f64],
    ) -> bool {
        if !spec.switches.raman
            || spec.representation() != Representation::Wigner
            || spec.raman_density.iter().all(|&s| s == 0.0)
        {
            out.fill(0.0);
            return false;
        }
        self.raman_wigner_amplitudes(spec, rng);
        let c = spec.field_scale(dzeta) * spec.amplitude_scale;
        self.fourier.sum_minus(&mut self.amps, &mut self.scratch);
        for (o, a) in out.iter_mut().zip(&self.amps) {
            *o = c * a.re;
        }
        true
    }

    /// Correlated `(u, v)` mode amplitudes of the positive-P Raman pair.
    pub fn raman_posp_amplitudes<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        rng: &mut R,
    ) -> (&[Complex64], &[Complex64]) {
        let m = spec.grid.modes;
        for k in 0..=m / 2 {
            let f = &spec.raman_pairs[k];
            let n = 2 * f.dim;
            for x in &mut self.xi[..n] {
                *x = normal(rng);
            }
            f.apply(&self.xi[..n], &mut self.z);
            let mk = spec.grid.mirror(k);
            if f.dim == 2 {
                self.amps[k] = self.z[0];
                self.amps_plus[k] = self.z[1];
            } else {
                self.amps[k] = self.z[0];
                self.amps[mk] = self.z[1];
                self.amps_plus[k] = self.z[2];
                self.amps_plus[mk] = self.z[3];
            }
        }
        (&self.amps, &self.amps_plus)
    }

    /// `Γ^R(τ) = c Σ u_k e^{-iΩτ}` and `Γ^{R+}(τ) = c Σ v_k e^{+iΩτ}`.
    pub fn raman_posp<R: Rng + ?Sized>(
        &mut self,
        spec: &NoiseSpec,
        dzeta: f64,
        rng: &mut R,
        out: &mut [Complex64],
        out_plus: &mut [Complex64],
    ) -> bool {
        if !spec.switches.raman || spec.raman_pairs.is_empty() {
            out.fill(Complex64::new(0.0, 0.0));
            out_plus.fill(Complex64::new(0.0, 0.0));
            return false;
        }
        self.raman_posp_amplitudes(spec, rng);
        out.copy_from_slice(&self.amps);
        out_plus.copy_from_slice(&self.amps_plus);
        self.fourier.sum_minus(out, &mut self.scratch);
        self.fourier.sum_plus(out_plus, &mut self.scratch);
        let c = spec.field_scale(dzeta) * spec.amplitude_scale;
        out.iter_mut()
            .chain(out_plus.iter_mut())
            .for_each(|x| *x *= c);
        true
    }
}

/// Initial state for one trajectory.
///
/// Positive-P: `φ = mean`, `φ⁺ = conj(mean)`, no noise. Wigner: `mean` plus
/// circular vacuum noise of variance `1/(2n̄Δτ)` per grid point.
pub fn sample_initial_field<R: Rng + ?Sized>(
    mean_field: &[Complex64],
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<FieldState, NoiseError> {
    if mean_field.len() != spec.grid.modes {
        return Err(NoiseError::Length {
            expected: spec.grid.modes,
            got: mean_field.len(),
        });
    }
    Ok(match spec.representation() {
        Representation::PositiveP => FieldState::positive_p(mean_field.to_vec()),
        Representation::Wigner => {
            if !spec.switches.initial {
                return Ok(FieldState::wigner(mean_field.to_vec()));
            }
            let sd = spec.amplitude_scale / (4.0 * spec.photon_number * spec.grid.dtau()).sqrt();
            let phi = mean_field
                .iter()
                .map(|&z| {
                    let re = normal(rng);
                    let im = normal(rng);
                    z + Complex64::new(sd * re, sd * im)
                })
                .collect();
            FieldState::wigner(phi)
        }
    })
}

/// Additive noise `Γ(τ)` for one step of length `dzeta`. The positive-P
/// `φ⁺` equation consumes `conj(Γ)`.
pub fn sample_additive_noise<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    dzeta: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); spec.grid.modes];
    NoiseSynth::new(&spec.grid).additive(spec, dzeta, rng, &mut out);
    out
}

/// Real Raman noise `Γ^R(τ)` for a Wigner step.
pub fn sample_raman_noise_wigner<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    dzeta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = vec![0.0; spec.grid.modes];
    NoiseSynth::new(&spec.grid).raman_wigner(spec, dzeta, rng, &mut out);
    out
}

/// Raman pair `(Γ^R(τ), Γ^{R+}(τ))` for a positive-P step.
pub fn sample_raman_noise_posp<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    dzeta: f64,
    rng: &mut R,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; spec.grid.modes];
    let mut plus = vec![zero; spec.grid.modes];
    NoiseSynth::new(&spec.grid).raman_posp(spec, dzeta, rng, &mut out, &mut plus);
    (out, plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dispersion;
    use crate::model::LorentzianTerm;

    pub(super) fn grid(modes: usize, rep: Representation) -> SimulationGrid {
        SimulationGrid::new(modes, 20.0, 1.0, 0.01, Dispersion::Anomalous, rep, 1).unwrap()
    }

    pub(super) fn single_line() -> ResponseModel {
        ResponseModel::new(vec![LorentzianTerm::new(0.2, 2.0, 0.6).unwrap()], 0.8).unwrap()
    }

    fn spec(rep: Representation, profile: GainLossProfile) -> NoiseSpec {
        NoiseSpec::new(
            &grid(64, rep),
            &single_line(),
            &profile,
            Thermal::zero_temperature(1e-13),
            100.0,
            NoiseSwitches::default(),
        )
        .unwrap()
    }

    #[test]
    fn positive_p_initial_state_is_noiseless() {
        let s = spec(Representation::PositiveP, GainLossProfile::transparent());
        let mean: Vec<_> = (0..64).map(|j| Complex64::new(j as f64, -1.0)).collect();
        let st =
            sample_initial_field(&mean, &s, &mut stream(1, 0, 0, Purpose::InitialField)).unwrap();
        assert_eq!(st.phi, mean);
        assert_eq!(
            st.phi_plus.unwrap(),
            mean.iter().map(|z| z.conj()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn wigner_vacuum_variance_per_point() {
        let g = SimulationGrid::new(
            64,
            6.4,
            1.0,
            0.01,
            Dispersion::Anomalous,
            Representation::Wigner,
            1,
        )
        .unwrap();
        let s = NoiseSpec::new(
            &g,
            &single_line(),
            &GainLossProfile::transparent(),
            Thermal::zero_temperature(1e-13),
            1e3,
            NoiseSwitches::default(),
        )
        .unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); 64];
        let draws = 100_000 / 64 + 1;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut n = 0.0;
        for d in 0..draws {
            let st = sample_initial_field(
                &zero,
                &s,
                &mut stream(3, d as u64, 0, Purpose::InitialField),
            )
            .unwrap();
            for z in st.phi {
                let v = z.norm_sqr();
                sum += v;
                sum2 += v * v;
                n += 1.0;
            }
        }
        let mean = sum / n;
        let se = ((sum2 / n - mean * mean) / n).sqrt();
        let target = 1.0 / (2.0 * 1e3 * 0.1);
        assert!(
            (mean - target).abs() < 3.0 * se,
            "{mean} vs {target} (se {se})"
        );
    }

    #[test]
    fn silent_sources_are_exactly_zero() {
        let s = spec(
            Representation::PositiveP,
            GainLossProfile::flat(0.0, 0.3).unwrap(),
        );
        let g = sample_additive_noise(&s, 0.01, &mut stream(1, 0, 0, Purpose::Additive));
        assert!(g.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let s = spec(Representation::Wigner, GainLossProfile::transparent());
        let g = sample_additive_noise(&s, 0.01, &mut stream(1, 0, 0, Purpose::Additive));
        assert!(g.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let electronic = NoiseSpec::new(
            &grid(64, Representation::Wigner),
            &ResponseModel::electronic_only(),
            &GainLossProfile::transparent(),
            Thermal::zero_temperature(1e-13),
            100.0,
            NoiseSwitches::default(),
        )
        .unwrap();
        let r = sample_raman_noise_wigner(&electronic, 0.01, &mut stream(1, 0, 0, Purpose::Raman));
        assert!(r.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn positive_p_additive_ignores_absorption() {
        let a = spec(
            Representation::PositiveP,
            GainLossProfile::flat(0.2, 0.0).unwrap(),
        );
        let b = spec(
            Representation::PositiveP,
            GainLossProfile::flat(0.2, 0.7).unwrap(),
        );
        let ga = sample_additive_noise(&a, 0.01, &mut stream(5, 2, 9, Purpose::Additive));
        let gb = sample_additive_noise(&b, 0.01, &mut stream(5, 2, 9, Purpose::Additive));
        assert_eq!(ga, gb);
        assert!(ga.iter().any(|z| z.norm() > 0.0));
    }

    #[test]
    fn wigner_raman_field_is_real_by_construction() {
        let s = spec(Representation::Wigner, GainLossProfile::transparent());
        let mut synth = NoiseSynth::new(s.grid());
        let mut rng = stream(1, 0, 0, Purpose::Raman);
        synth.raman_wigner_amplitudes(&s, &mut rng);
        let mut amps = synth.amps.clone();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let fourier = Fourier::for_grid(s.grid());
        let mut scratch = fourier.scratch();
        fourier.sum_minus(&mut amps, &mut scratch);
        let worst = amps.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12 * norm.max(1e-300) * 64.0, "{worst}");
    }

    #[test]
    fn raman_density_has_spontaneous_floor_at_zero_temperature() {
        let s = spec(Representation::Wigner, GainLossProfile::transparent());
        for (k, &d) in s.raman_density().iter().enumerate() {
            let w = s.grid().omega(k);
            let alpha = s.response().raman_gain(w);
            assert!((d - alpha / 200.0).abs() < 1e-15);
            if alpha > 0.0 {
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn pair_factors_match_targets_for_every_mode() {
        let th = Thermal::new(1e-13, 300.0).unwrap();
        let s = NoiseSpec::new(
            &grid(128, Representation::PositiveP),
            &single_line(),
            &GainLossProfile::transparent(),
            th,
            50.0,
            NoiseSwitches::default(),
        )
        .unwrap();
        for k in 0..=64 {
            let q = s.pair_targets(k);
            let scale = q.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
            let got = s.pair_factor(k).unwrap().pseudo_covariance();
            let err = (&got - &q).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10 * scale.max(1.0), "mode {k}: {err}");
        }
    }

    #[test]
    fn electronic_only_pair_is_pure_kerr_noise() {
        let s = NoiseSpec::new(
            &grid(32, Representation::PositiveP),
            &ResponseModel::electronic_only(),
            &GainLossProfile::transparent(),
            Thermal::zero_temperature(1e-13),
            10.0,
            NoiseSwitches::default(),
        )
        .unwrap();
        for k in 0..32 {
            let w = s.grid().omega(k);
            assert_eq!(s.raman_self_moment(w), Complex64::new(0.0, -0.1));
            assert_eq!(s.raman_cross_moment(w), 0.0);
        }
    }

    #[test]
    fn bad_photon_number_is_rejected() {
        let r = NoiseSpec::new(
            &grid(32, Representation::Wigner),
            &single_line(),
            &GainLossProfile::transparent(),
            Thermal::zero_temperature(1e-13),
            0.0,
            NoiseSwitches::default(),
        );
        assert_eq!(r.unwrap_err(), NoiseError::PhotonNumber(0.0));
    }
}
