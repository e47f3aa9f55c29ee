//! Split-step Fourier propagation of the stochastic NLS equations.
//!
//! One step of length `dζ` is the symmetric composition
//!
//! 1. linear half step `φ̃ ← φ̃ exp[(∓iΩ²/2 - g̃(Ω)) dζ/2]`,
//! 2. nonlinear step `φ ← φ exp[i(h⊛I + Γ^R) dζ]` with start-of-step fields,
//! 3. additive noise `φ ← φ + Γ dζ`,
//! 4. linear half step.
//!
//! The positive-P partner obeys the same linear rule applied to `conj(φ⁺)`,
//! takes `φ⁺ ← φ⁺ exp[-i(h⊛I + Γ^{R+}) dζ]` with the complex intensity
//! `I = φ⁺φ`, and receives `conj(Γ) dζ`.

mod checkpoint;
mod ensemble;
mod state;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Fourier, Representation, SimulationGrid};
use crate::model::{kk, GainLossProfile, ResponseModel};
use crate::noise::{stream, NoiseError, NoiseSpec, NoiseSynth, Purpose};

pub use checkpoint::{
    checkpoint_index, read_checkpoints, write_checkpoints, CheckpointError, CheckpointFile,
};
pub use ensemble::{run_ensemble, EnsembleConfig};
pub use state::FieldState;

#[derive(Debug, Error, PartialEq)]
pub enum IntegrateError {
    #[error("trajectory {trajectory} diverged at ζ = {zeta}: max |φ⁺φ| = {max_intensity:e}")]
    Overflow {
        trajectory: u64,
        zeta: f64,
        max_intensity: f64,
    },
    #[error("{diverged} of {total} trajectories diverged, above the allowed fraction {threshold}")]
    TooManyDivergences {
        diverged: usize,
        total: usize,
        threshold: f64,
    },
    #[error("state is {state} but the run is {run}")]
    Representation {
        state: Representation,
        run: Representation,
    },
    #[error("field has {got} samples, grid has {expected}")]
    Length { expected: usize, got: usize },
    #[error("invalid checkpoint list: {0}")]
    Checkpoints(String),
    #[error("trajectory_count must be at least 1")]
    NoTrajectories,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Raman noise for one nonlinear step.
#[derive(Debug, Clone, Copy)]
pub enum RamanField<'a> {
    None,
    Wigner(&'a [f64]),
    PositiveP(&'a [Complex64], &'a [Complex64]),
}

/// `exp[(∓iΩ²/2 - g̃(Ω)) h]` on the grid.
pub fn linear_factors(grid: &SimulationGrid, profile: &GainLossProfile, h: f64) -> Vec<Complex64> {
    let s = grid.dispersion.sign();
    grid.omegas()
        .iter()
        .map(|&w| {
            ((Complex64::new(0.0, -0.5 * s * w * w) - profile.linear_response_spectrum(w)) * h)
                .exp()
        })
        .collect()
}

fn apply_linear(
    fourier: &Fourier,
    scratch: &mut [Complex64],
    factors: &[Complex64],
    field: &mut [Complex64],
    conjugate: bool,
) {
    if conjugate {
        field.iter_mut().for_each(|z| *z = z.conj());
    }
    fourier.forward(field, scratch);
    field.iter_mut().zip(factors).for_each(|(z, f)| *z *= f);
    fourier.inverse(field, scratch);
    if conjugate {
        field.iter_mut().for_each(|z| *z = z.conj());
    }
}

/// `h⊛I` through the analytic spectrum `h̃(Ω_k)`.
fn convolve(
    fourier: &Fourier,
    scratch: &mut [Complex64],
    kernel: &[Complex64],
    data: &mut [Complex64],
) {
    fourier.forward(data, scratch);
    data.iter_mut().zip(kernel).for_each(|(z, h)| *z *= h);
    fourier.inverse(data, scratch);
}

fn check_length(grid: &SimulationGrid, state: &FieldState) -> Result<(), IntegrateError> {
    let bad = state.phi.len() != grid.modes
        || state
            .phi_plus
            .as_ref()
            .is_some_and(|p| p.len() != grid.modes);
    if bad {
        return Err(IntegrateError::Length {
            expected: grid.modes,
            got: state.phi.len(),
        });
    }
    Ok(())
}

/// Linear sub-step of length `h` (usually `dζ/2`).
pub fn linear_half_step(
    state: &FieldState,
    grid: &SimulationGrid,
    profile: &GainLossProfile,
    h: f64,
) -> Result<FieldState, IntegrateError> {
    check_length(grid, state)?;
    let fourier = Fourier::for_grid(grid);
    let mut scratch = fourier.scratch();
    let factors = linear_factors(grid, profile, h);
    let mut out = state.clone();
    apply_linear(&fourier, &mut scratch, &factors, &mut out.phi, false);
    if let Some(plus) = out.phi_plus.as_mut() {
        apply_linear(&fourier, &mut scratch, &factors, plus, true);
    }
    out.zeta += h;
    Ok(out)
}

/// `h⊛I` for the state's intensity: `|φ|²` (real) or `φ⁺φ`.
pub fn nonlinear_phase(
    state: &FieldState,
    grid: &SimulationGrid,
    model: &ResponseModel,
) -> Vec<Complex64> {
    let fourier = Fourier::for_grid(grid);
    let mut scratch = fourier.scratch();
    let kernel: Vec<Complex64> = grid
        .omegas()
        .iter()
        .map(|&w| model.response_spectrum(w))
        .collect();
    let mut data = state.intensity();
    convolve(&fourier, &mut scratch, &kernel, &mut data);
    if state.phi_plus.is_none() {
        data.iter_mut().for_each(|z| z.im = 0.0);
    }
    data
}

/// Nonlinear sub-step with Raman noise; `bound` caps `|φ⁺φ|`.
pub fn nonlinear_step(
    state: &FieldState,
    grid: &SimulationGrid,
    model: &ResponseModel,
    raman: RamanField<'_>,
    dzeta: f64,
    bound: f64,
) -> Result<FieldState, IntegrateError> {
    check_length(grid, state)?;
    let phase = nonlinear_phase(state, grid, model);
    let mut out = state.clone();
    apply_nonlinear(&mut out, &phase, raman, dzeta);
    out.zeta = state.zeta;
    overflow_check(&out, bound, 0)?;
    Ok(out)
}

fn apply_nonlinear(state: &mut FieldState, phase: &[Complex64], raman: RamanField<'_>, dzeta: f64) {
    let i = Complex64::new(0.0, 1.0);
    match (state.phi_plus.as_mut(), raman) {
        (None, RamanField::Wigner(r)) => {
            for ((f, p), g) in state.phi.iter_mut().zip(phase).zip(r) {
                *f *= Complex64::from_polar(1.0, (p.re + g) * dzeta);
            }
        }
        (None, _) => {
            for (f, p) in state.phi.iter_mut().zip(phase) {
                *f *= Complex64::from_polar(1.0, p.re * dzeta);
            }
        }
        (Some(plus), RamanField::PositiveP(r, rp)) => {
            for (((f, fp), p), (g, gp)) in state
                .phi
                .iter_mut()
                .zip(plus.iter_mut())
                .zip(phase)
                .zip(r.iter().zip(rp))
            {
                *f *= (i * (p + g) * dzeta).exp();
                *fp *= (-i * (p + gp) * dzeta).exp();
            }
        }
        (Some(plus), _) => {
            for ((f, fp), p) in state.phi.iter_mut().zip(plus.iter_mut()).zip(phase) {
                *f *= (i * p * dzeta).exp();
                *fp *= (-i * p * dzeta).exp();
            }
        }
    }
}

fn overflow_check(state: &FieldState, bound: f64, trajectory: u64) -> Result<(), IntegrateError> {
    let mut worst = 0.0f64;
    let finite = match &state.phi_plus {
        Some(plus) => state.phi.iter().zip(plus).all(|(f, p)| {
            let v = (f * p).norm();
            worst = worst.max(v);
            v.is_finite()
        }),
        None => state.phi.iter().all(|f| {
            let v = f.norm_sqr();
            worst = worst.max(v);
            v.is_finite()
        }),
    };
    if !finite || worst > bound {
        return Err(IntegrateError::Overflow {
            trajectory,
            zeta: state.zeta,
            max_intensity: if finite { worst } else { f64::INFINITY },
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOptions {
    /// ζ values to record; each is snapped to the nearest step boundary.
    pub checkpoints: Vec<f64>,
    /// Largest admissible `|φ⁺φ|` before a trajectory counts as diverged.
    pub overflow_bound: f64,
    /// Each step's noise is the average of this many sub-step draws, keyed by
    /// fine step index, so runs at `dζ` and `dζ/r` share their noise.
    pub noise_substeps: usize,
    /// Record diagnostics every this many steps; 0 disables them.
    pub diagnostics_every: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            checkpoints: Vec::new(),
            overflow_bound: 1e8,
            noise_substeps: 1,
            diagnostics_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub zeta: f64,
    /// `Σ I_j Δτ` with the representation's intensity.
    pub energy: Complex64,
    pub max_intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub trajectory: u64,
    pub snapshots: Vec<FieldState>,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// Precomputed operators for one grid, response and profile.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: SimulationGrid,
    half_step: Vec<Complex64>,
    kernel: Vec<Complex64>,
    nonlinear: bool,
    warnings: Vec<String>,
}

/// Per-thread buffers.
#[derive(Debug, Clone)]
pub struct Workspace {
    fourier: Fourier,
    scratch: Vec<Complex64>,
    phase: Vec<Complex64>,
    synth: NoiseSynth,
    gamma: Vec<Complex64>,
    gamma_sum: Vec<Complex64>,
    raman_real: Vec<f64>,
    raman_real_sum: Vec<f64>,
    raman: Vec<Complex64>,
    raman_plus: Vec<Complex64>,
    raman_sum: Vec<Complex64>,
    raman_plus_sum: Vec<Complex64>,
}

impl Workspace {
    pub fn new(grid: &SimulationGrid) -> Self {
        let fourier = Fourier::for_grid(grid);
        let scratch = fourier.scratch();
        let zeros = vec![Complex64::new(0.0, 0.0); grid.modes];
        Workspace {
            fourier,
            scratch,
            phase: zeros.clone(),
            synth: NoiseSynth::new(grid),
            gamma: zeros.clone(),
            gamma_sum: zeros.clone(),
            raman_real: vec![0.0; grid.modes],
            raman_real_sum: vec![0.0; grid.modes],
            raman: zeros.clone(),
            raman_plus: zeros.clone(),
            raman_sum: zeros.clone(),
            raman_plus_sum: zeros,
        }
    }
}

/// Steps at which each checkpoint is taken.
pub fn checkpoint_steps(
    grid: &SimulationGrid,
    checkpoints: &[f64],
) -> Result<Vec<usize>, IntegrateError> {
    let total = grid.steps();
    let end = total as f64 * grid.dzeta;
    let mut out: Vec<usize> = Vec::with_capacity(checkpoints.len());
    for &z in checkpoints {
        if !(z.is_finite() && z >= 0.0 && z <= end * (1.0 + 1e-12)) {
            return Err(IntegrateError::Checkpoints(format!(
                "ζ = {z} outside [0, {end}]"
            )));
        }
        let step = ((z / grid.dzeta).round() as usize).min(total);
        if out.last().is_some_and(|&last| step <= last) {
            return Err(IntegrateError::Checkpoints(format!(
                "ζ = {z} does not fall on a later step than the previous checkpoint"
            )));
        }
        out.push(step);
    }
    if out.is_empty() {
        out.push(total);
    }
    Ok(out)
}

impl Propagator {
    pub fn new(grid: &SimulationGrid, response: &ResponseModel, profile: &GainLossProfile) -> Self {
        let omegas = grid.omegas();
        let mut warnings = Vec::new();
        if let Some(w) = dispersion_consistency_warning(grid, profile) {
            warnings.push(w);
        }
        Propagator {
            grid: grid.clone(),
            half_step: linear_factors(grid, profile, 0.5 * grid.dzeta),
            kernel: omegas
                .iter()
                .map(|&w| response.response_spectrum(w))
                .collect(),
            nonlinear: true,
            warnings,
        }
    }

    /// Drops the nonlinear sub-step (pure linear propagation).
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn grid(&self) -> &SimulationGrid {
        &self.grid
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn linear(&self, state: &mut FieldState, ws: &mut Workspace) {
        apply_linear(
            &ws.fourier,
            &mut ws.scratch,
            &self.half_step,
            &mut state.phi,
            false,
        );
        if let Some(plus) = state.phi_plus.as_mut() {
            apply_linear(&ws.fourier, &mut ws.scratch, &self.half_step, plus, true);
        }
    }

    fn draw_noise(
        &self,
        spec: &NoiseSpec,
        trajectory: u64,
        step: usize,
        substeps: usize,
        ws: &mut Workspace,
    ) -> (bool, bool) {
        let dz = self.grid.dzeta / substeps as f64;
        let master = self.grid.master_seed;
        let posp = spec.representation() == Representation::PositiveP;
        let zero = Complex64::new(0.0, 0.0);
        let mut any_add = false;
        let mut any_raman = false;
        let switches = spec.switches();
        if substeps == 1 {
            if switches.additive {
                let mut rng = stream(master, trajectory, step as u64, Purpose::Additive);
                any_add = ws.synth.additive(spec, dz, &mut rng, &mut ws.gamma_sum);
            }
            if switches.raman && self.nonlinear {
                let mut rng = stream(master, trajectory, step as u64, Purpose::Raman);
                any_raman = if posp {
                    ws.synth.raman_posp(
                        spec,
                        dz,
                        &mut rng,
                        &mut ws.raman_sum,
                        &mut ws.raman_plus_sum,
                    )
                } else {
                    ws.synth
                        .raman_wigner(spec, dz, &mut rng, &mut ws.raman_real_sum)
                };
            }
            return (any_add, any_raman);
        }
        ws.gamma_sum.fill(zero);
        ws.raman_sum.fill(zero);
        ws.raman_plus_sum.fill(zero);
        ws.raman_real_sum.fill(0.0);
        let w = 1.0 / substeps as f64;
        for sub in 0..substeps {
            let fine = (step * substeps + sub) as u64;
            if switches.additive {
                let mut rng = stream(master, trajectory, fine, Purpose::Additive);
                if ws.synth.additive(spec, dz, &mut rng, &mut ws.gamma) {
                    any_add = true;
                    ws.gamma_sum
                        .iter_mut()
                        .zip(&ws.gamma)
                        .for_each(|(a, b)| *a += b * w);
                }
            }
            if switches.raman && self.nonlinear {
                let mut rng = stream(master, trajectory, fine, Purpose::Raman);
                if posp {
                    if ws
                        .synth
                        .raman_posp(spec, dz, &mut rng, &mut ws.raman, &mut ws.raman_plus)
                    {
                        any_raman = true;
                        ws.raman_sum
                            .iter_mut()
                            .zip(&ws.raman)
                            .for_each(|(a, b)| *a += b * w);
                        ws.raman_plus_sum
                            .iter_mut()
                            .zip(&ws.raman_plus)
                            .for_each(|(a, b)| *a += b * w);
                    }
                } else if ws
                    .synth
                    .raman_wigner(spec, dz, &mut rng, &mut ws.raman_real)
                {
                    any_raman = true;
                    ws.raman_real_sum
                        .iter_mut()
                        .zip(&ws.raman_real)
                        .for_each(|(a, b)| *a += b * w);
                }
            }
        }
        (any_add, any_raman)
    }

    /// One full Strang step from `ζ_n` (step index `step`).
    pub fn step(
        &self,
        state: &mut FieldState,
        spec: &NoiseSpec,
        trajectory: u64,
        step: usize,
        options: &PropagationOptions,
        ws: &mut Workspace,
    ) -> Result<(), IntegrateError> {
        let dz = self.grid.dzeta;
        self.linear(state, ws);
        let (additive, raman) =
            self.draw_noise(spec, trajectory, step, options.noise_substeps.max(1), ws);
        if self.nonlinear {
            ws.phase.copy_from_slice(&state.intensity());
            convolve(&ws.fourier, &mut ws.scratch, &self.kernel, &mut ws.phase);
            let field = match (raman, state.phi_plus.is_some()) {
                (false, _) => RamanField::None,
                (true, false) => RamanField::Wigner(&ws.raman_real_sum),
                (true, true) => RamanField::PositiveP(&ws.raman_sum, &ws.raman_plus_sum),
            };
            apply_nonlinear(state, &ws.phase, field, dz);
        }
        if additive {
            state
                .phi
                .iter_mut()
                .zip(&ws.gamma_sum)
                .for_each(|(f, g)| *f += g * dz);
            if let Some(plus) = state.phi_plus.as_mut() {
                plus.iter_mut()
                    .zip(&ws.gamma_sum)
                    .for_each(|(f, g)| *f += g.conj() * dz);
            }
        }
        self.linear(state, ws);
        state.zeta = (step + 1) as f64 * dz;
        overflow_check(state, options.overflow_bound, trajectory)
    }

    /// Propagates one trajectory, calling `on_checkpoint(index, state)` at
    /// each recorded ζ.
    pub fn propagate_with<F>(
        &self,
        initial: FieldState,
        spec: &NoiseSpec,
        trajectory: u64,
        options: &PropagationOptions,
        ws: &mut Workspace,
        mut on_checkpoint: F,
    ) -> Result<(FieldState, Vec<StepDiagnostics>), IntegrateError>
    where
        F: FnMut(usize, &FieldState),
    {
        check_length(&self.grid, &initial)?;
        if initial.representation() != self.grid.representation {
            return Err(IntegrateError::Representation {
                state: initial.representation(),
                run: self.grid.representation,
            });
        }
        let stops = checkpoint_steps(&self.grid, &options.checkpoints)?;
        let total = *stops.last().unwrap_or(&self.grid.steps());
        let dtau = self.grid.dtau();
        let mut state = initial;
        state.zeta = 0.0;
        let mut diagnostics = Vec::new();
        let mut next = 0;
        if stops[0] == 0 {
            on_checkpoint(0, &state);
            next = 1;
        }
        for n in 0..total {
            self.step(&mut state, spec, trajectory, n, options, ws)?;
            if options.diagnostics_every > 0 && (n + 1) % options.diagnostics_every == 0 {
                diagnostics.push(StepDiagnostics {
                    zeta: state.zeta,
                    energy: state.energy(dtau),
                    max_intensity: state.max_intensity(),
                });
            }
            if next < stops.len() && stops[next] == n + 1 {
                on_checkpoint(next, &state);
                next += 1;
            }
        }
        Ok((state, diagnostics))
    }

    /// Propagates and keeps a snapshot at every checkpoint.
    pub fn propagate(
        &self,
        initial: FieldState,
        spec: &NoiseSpec,
        trajectory: u64,
        options: &PropagationOptions,
    ) -> Result<TrajectoryRecord, IntegrateError> {
        let mut ws = Workspace::new(&self.grid);
        let mut snapshots = Vec::new();
        let (_, diagnostics) =
            self.propagate_with(initial, spec, trajectory, options, &mut ws, |_, s| {
                snapshots.push(s.clone())
            })?;
        Ok(TrajectoryRecord {
            trajectory,
            snapshots,
            diagnostics,
        })
    }
}

/// Fraction of `Σ|φ|²` sitting in the outer 5% of the window on each side.
pub fn edge_energy_fraction(phi: &[Complex64]) -> f64 {
    let m = phi.len();
    let edge = (m / 20).max(1);
    let total: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let outer: f64 = phi[..edge]
        .iter()
        .chain(&phi[m - edge..])
        .map(|z| z.norm_sqr())
        .sum();
    outer / total
}

/// Warns when a user-supplied `g'(Ω)` disagrees with the dispersion implied
/// by the gain/loss curves through causality.
fn dispersion_consistency_warning(
    grid: &SimulationGrid,
    profile: &GainLossProfile,
) -> Option<String> {
    if profile.dispersive.is_zero() {
        return None;
    }
    let omegas = grid.omegas();
    let real: Vec<f64> = omegas
        .iter()
        .map(|&w| 0.5 * (profile.loss_at(w) - profile.gain_at(w)))
        .collect();
    let implied = kk::imag_from_real(&real, grid.domega());
    let given: Vec<f64> = omegas.iter().map(|&w| profile.dispersive.eval(w)).collect();
    let scale = given
        .iter()
        .chain(&real)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    // interior of the band only; the periodic reconstruction is poor near ±Nyquist
    let edge = grid.omega(grid.modes / 2).abs() * 0.5;
    let worst = omegas
        .iter()
        .zip(implied.iter().zip(&given))
        .filter(|(w, _)| w.abs() < edge)
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);
    (worst > 1e-3 * scale).then(|| {
        format!(
            "dispersive part g' differs from its causal (Kramers-Kronig) partner by up to {worst:.3e} (scale {scale:.3e})"
        )
    })
}

/// Mean photons per significant mode of a Wigner input, with the warning
/// threshold of 10 below which the truncation is unreliable.
pub fn wigner_validity_warning(
    mean_field: &[Complex64],
    grid: &SimulationGrid,
    photon_number: f64,
) -> Option<String> {
    let fourier = Fourier::for_grid(grid);
    let mut scratch = fourier.scratch();
    let mut spec = mean_field.to_vec();
    fourier.forward(&mut spec, &mut scratch);
    let per_mode: Vec<f64> = spec
        .iter()
        .map(|z| photon_number * z.norm_sqr() * grid.domega() / (2.0 * PI))
        .collect();
    let peak = per_mode.iter().copied().fold(0.0, f64::max);
    let relevant: Vec<f64> = per_mode
        .into_iter()
        .filter(|&n| n >= 1e-2 * peak && n > 0.0)
        .collect();
    let mean = if relevant.is_empty() {
        0.0
    } else {
        relevant.iter().sum::<f64>() / relevant.len() as f64
    };
    (mean < 10.0).then(|| {
        format!("truncated Wigner input has {mean:.3e} photons per significant mode (< 10); results may be unreliable")
    })
}
