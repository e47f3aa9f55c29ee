//! Ensemble accumulators and operator-ordering corrections.
//!
//! Wigner moments are symmetrically ordered and positive-P moments normally
//! ordered. The vacuum correction between them is half a photon per mode:
//! `1/(2Δτ)` per grid cell for fluxes, `1/2` per bin for spectra and for
//! quadrature variances. By Parseval the two bookkeepings agree, so each
//! observable applies it exactly once, in its own domain.
//!
//! Photon numbers are in photons (flux in photons per unit τ): the field
//! moments are scaled by `n̄`. Standard errors come from the trajectory
//! scatter and are `NaN` for a single trajectory.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Fourier, Representation, SimulationGrid};
use crate::integrator::{FieldState, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Normal,
    Symmetric,
    Antinormal,
}

impl std::fmt::Display for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ordering::Normal => "normal",
            Ordering::Symmetric => "symmetric",
            Ordering::Antinormal => "antinormal",
        })
    }
}

impl std::str::FromStr for Ordering {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(Ordering::Normal),
            "symmetric" => Ok(Ordering::Symmetric),
            "antinormal" => Ok(Ordering::Antinormal),
            other => Err(format!("unknown ordering `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ObservableError {
    #[error("{0} ordering is not supported")]
    UnsupportedOrdering(Ordering),
    #[error("total corrected intensity at checkpoint {checkpoint} is {total}, not positive")]
    ZeroIntensity { checkpoint: usize, total: f64 },
    #[error("checkpoint {index} not recorded ({count} available)")]
    Checkpoint { index: usize, count: usize },
    #[error("local oscillator is not a phase-rotated copy of any registered one")]
    UnregisteredLocalOscillator,
    #[error("local oscillator must have Σ|LO|²Δτ = 1, got {0}")]
    LocalOscillatorNorm(f64),
    #[error("array has {got} samples, grid has {expected}")]
    Length { expected: usize, got: usize },
}

/// Welford mean and scatter of a complex sample, real and imaginary parts
/// tracked separately.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexMoments {
    pub count: u64,
    pub mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl ComplexMoments {
    pub fn push(&mut self, z: Complex64) {
        self.count += 1;
        let n = self.count as f64;
        let d = z - self.mean;
        self.mean += d / n;
        let d2 = z - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    /// Chan's pairwise combination; merging in a fixed order is deterministic.
    pub fn merge(&mut self, other: &ComplexMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * (nb / n);
        self.m2_re += other.m2_re + d.re * d.re * na * nb / n;
        self.m2_im += other.m2_im + d.im * d.im * na * nb / n;
        self.count += other.count;
    }

    /// Standard error of the mean of the real part.
    pub fn se_re(&self) -> f64 {
        se(self.m2_re, self.count)
    }

    pub fn se_im(&self) -> f64 {
        se(self.m2_im, self.count)
    }
}

fn se(m2: f64, n: u64) -> f64 {
    if n < 2 {
        f64::NAN
    } else {
        (m2 / ((n - 1) as f64 * n as f64)).sqrt()
    }
}

/// Joint Welford moments of two real samples (for ratio estimates).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairMoments {
    pub count: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl PairMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        self.count += 1;
        let n = self.count as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    pub fn merge(&mut self, other: &PairMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.m2_x += other.m2_x + dx * dx * na * nb / n;
        self.m2_y += other.m2_y + dy * dy * na * nb / n;
        self.c_xy += other.c_xy + dx * dy * na * nb / n;
        self.count += other.count;
    }

    /// Sample (co)variances of the two means: `(var x̄, var ȳ, cov)`.
    fn mean_covariance(&self) -> (f64, f64, f64) {
        if self.count < 2 {
            return (f64::NAN, f64::NAN, f64::NAN);
        }
        let n = self.count as f64;
        let k = 1.0 / ((n - 1.0) * n);
        (self.m2_x * k, self.m2_y * k, self.c_xy * k)
    }
}

/// What one trajectory contributes at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// `n̄ φ⁺φ` (or `n̄|φ|²`) per grid point, uncorrected.
    pub flux: Vec<Complex64>,
    /// `n̄ conj(ψ̃)φ̃ ΔΩ/2π` per bin with `ψ = conj(φ⁺)`, uncorrected.
    pub spectrum: Vec<Complex64>,
    pub field: Vec<Complex64>,
    /// `(Σ Ω_k Re s_k, Σ Re s_k)`, uncorrected.
    pub frequency: (f64, f64),
    /// `(a, a⁺)` for each registered local oscillator.
    pub projections: Vec<(Complex64, Complex64)>,
}

/// Grid data needed to turn a field into an [`Observation`].
#[derive(Debug, Clone)]
pub struct Observer {
    grid: SimulationGrid,
    photon_number: f64,
    omegas: Vec<f64>,
    local_oscillators: Vec<Vec<Complex64>>,
    fourier: Fourier,
}

impl Observer {
    /// Each local oscillator must satisfy `Σ|LO|²Δτ = 1` to 1e-9.
    pub fn new(
        grid: &SimulationGrid,
        photon_number: f64,
        local_oscillators: Vec<Vec<Complex64>>,
    ) -> Result<Self, ObservableError> {
        for lo in &local_oscillators {
            check_lo(grid, lo)?;
        }
        Ok(Observer {
            grid: grid.clone(),
            photon_number,
            omegas: grid.omegas(),
            local_oscillators,
            fourier: Fourier::for_grid(grid),
        })
    }

    pub fn local_oscillators(&self) -> &[Vec<Complex64>] {
        &self.local_oscillators
    }

    pub fn observe(&self, state: &FieldState, scratch: &mut [Complex64]) -> Observation {
        let nbar = self.photon_number;
        let dtau = self.grid.dtau();
        let flux: Vec<Complex64> = state.intensity().into_iter().map(|z| z * nbar).collect();
        let mut phi_w = state.phi.clone();
        self.fourier.forward(&mut phi_w, scratch);
        let bin = nbar * self.grid.domega() / (2.0 * PI);
        let spectrum: Vec<Complex64> = match &state.phi_plus {
            Some(plus) => {
                let mut psi_w: Vec<Complex64> = plus.iter().map(|z| z.conj()).collect();
                self.fourier.forward(&mut psi_w, scratch);
                psi_w
                    .iter()
                    .zip(&phi_w)
                    .map(|(p, f)| p.conj() * f * bin)
                    .collect()
            }
            None => phi_w
                .iter()
                .map(|f| Complex64::new(f.norm_sqr() * bin, 0.0))
                .collect(),
        };
        let numerator: f64 = spectrum
            .iter()
            .zip(&self.omegas)
            .map(|(s, w)| s.re * w)
            .sum();
        let denominator: f64 = spectrum.iter().map(|s| s.re).sum();
        let amp = nbar.sqrt() * dtau;
        let projections = self
            .local_oscillators
            .iter()
            .map(|lo| {
                let a: Complex64 = lo
                    .iter()
                    .zip(&state.phi)
                    .map(|(l, f)| l.conj() * f)
                    .sum::<Complex64>()
                    * amp;
                let ap = match &state.phi_plus {
                    Some(plus) => lo.iter().zip(plus).map(|(l, p)| l * p).sum::<Complex64>() * amp,
                    None => a.conj(),
                };
                (a, ap)
            })
            .collect();
        Observation {
            flux,
            spectrum,
            field: state.phi.clone(),
            frequency: (numerator, denominator),
            projections,
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        self.fourier.scratch()
    }
}

fn check_lo(grid: &SimulationGrid, lo: &[Complex64]) -> Result<(), ObservableError> {
    if lo.len() != grid.modes {
        return Err(ObservableError::Length {
            expected: grid.modes,
            got: lo.len(),
        });
    }
    let norm: f64 = lo.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dtau();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(ObservableError::LocalOscillatorNorm(norm));
    }
    Ok(())
}

/// Accumulated moments at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMoments {
    pub zeta: f64,
    pub flux: Vec<ComplexMoments>,
    pub spectrum: Vec<ComplexMoments>,
    pub field: Vec<ComplexMoments>,
    pub total: ComplexMoments,
    pub frequency: PairMoments,
    /// Per-trajectory projections in trajectory order, one list per LO.
    pub projections: Vec<Vec<(Complex64, Complex64)>>,
}

impl CheckpointMoments {
    pub fn new(zeta: f64, modes: usize, local_oscillators: usize) -> Self {
        CheckpointMoments {
            zeta,
            flux: vec![ComplexMoments::default(); modes],
            spectrum: vec![ComplexMoments::default(); modes],
            field: vec![ComplexMoments::default(); modes],
            total: ComplexMoments::default(),
            frequency: PairMoments::default(),
            projections: vec![Vec::new(); local_oscillators],
        }
    }

    pub fn push(&mut self, obs: &Observation, dtau: f64) {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, z) in self.flux.iter_mut().zip(&obs.flux) {
            m.push(*z);
            total += z;
        }
        for (m, z) in self.spectrum.iter_mut().zip(&obs.spectrum) {
            m.push(*z);
        }
        for (m, z) in self.field.iter_mut().zip(&obs.field) {
            m.push(*z);
        }
        self.total.push(total * dtau);
        self.frequency.push(obs.frequency.0, obs.frequency.1);
        for (list, p) in self.projections.iter_mut().zip(&obs.projections) {
            list.push(*p);
        }
    }

    pub fn merge(&mut self, other: &CheckpointMoments) {
        let pairs = self
            .flux
            .iter_mut()
            .zip(&other.flux)
            .chain(self.spectrum.iter_mut().zip(&other.spectrum))
            .chain(self.field.iter_mut().zip(&other.field));
        for (a, b) in pairs {
            a.merge(b);
        }
        self.total.merge(&other.total);
        self.frequency.merge(&other.frequency);
        for (a, b) in self.projections.iter_mut().zip(&other.projections) {
            a.extend_from_slice(b);
        }
    }
}

/// Accumulators for every checkpoint of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    pub checkpoints: Vec<CheckpointMoments>,
    dtau: f64,
}

impl Accumulator {
    pub fn new(grid: &SimulationGrid, zetas: &[f64], local_oscillators: usize) -> Self {
        Accumulator {
            checkpoints: zetas
                .iter()
                .map(|&z| CheckpointMoments::new(z, grid.modes, local_oscillators))
                .collect(),
            dtau: grid.dtau(),
        }
    }

    pub fn push(&mut self, observations: &[Observation]) {
        for (c, o) in self.checkpoints.iter_mut().zip(observations) {
            c.push(o, self.dtau);
        }
    }

    pub fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.checkpoints.iter_mut().zip(&other.checkpoints) {
            a.merge(b);
        }
    }

    pub fn count(&self) -> u64 {
        self.checkpoints.first().map_or(0, |c| c.total.count)
    }
}

/// Finished ensemble: accumulated moments plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub representation: Representation,
    pub grid: SimulationGrid,
    pub photon_number: f64,
    pub local_oscillators: Vec<Vec<Complex64>>,
    pub moments: Vec<CheckpointMoments>,
    /// Completed (non-diverged) trajectories.
    pub trajectory_count: usize,
    pub diverged_count: usize,
    /// `(trajectory, ζ)` of each divergence.
    pub diverged: Vec<(u64, f64)>,
    /// Full records of the lowest-index trajectories, if requested.
    pub kept: Vec<TrajectoryRecord>,
    pub warnings: Vec<String>,
}

impl EnsembleResult {
    pub fn checkpoint(&self, index: usize) -> Result<&CheckpointMoments, ObservableError> {
        self.moments.get(index).ok_or(ObservableError::Checkpoint {
            index,
            count: self.moments.len(),
        })
    }

    pub fn zetas(&self) -> Vec<f64> {
        self.moments.iter().map(|c| c.zeta).collect()
    }

    /// Per-mode shift that takes this representation's native ordering to `target`.
    fn ordering_shift(&self, target: Ordering) -> Result<f64, ObservableError> {
        match (self.representation, target) {
            (_, Ordering::Antinormal) => Err(ObservableError::UnsupportedOrdering(target)),
            (Representation::Wigner, Ordering::Normal) => Ok(-0.5),
            (Representation::Wigner, Ordering::Symmetric) => Ok(0.0),
            (Representation::PositiveP, Ordering::Normal) => Ok(0.0),
            (Representation::PositiveP, Ordering::Symmetric) => Ok(0.5),
        }
    }
}

/// A real estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Normally ordered photon flux `n̄⟨φ⁺φ⟩` (photons per unit τ) at each τ.
pub fn photon_flux(
    result: &EnsembleResult,
    checkpoint: usize,
) -> Result<Vec<Estimate>, ObservableError> {
    let c = result.checkpoint(checkpoint)?;
    let shift = result.ordering_shift(Ordering::Normal)? / result.grid.dtau();
    Ok(c.flux
        .iter()
        .map(|m| Estimate {
            value: m.mean.re + shift,
            se: m.se_re(),
        })
        .collect())
}

/// Normally ordered total photon number `Σ flux Δτ`.
pub fn total_photons(
    result: &EnsembleResult,
    checkpoint: usize,
) -> Result<Estimate, ObservableError> {
    let c = result.checkpoint(checkpoint)?;
    let shift = result.ordering_shift(Ordering::Normal)? * result.grid.modes as f64;
    Ok(Estimate {
        value: c.total.mean.re + shift,
        se: c.total.se_re(),
    })
}

/// Photons per frequency bin, in FFT order.
pub fn optical_spectrum(
    result: &EnsembleResult,
    checkpoint: usize,
    ordering: Ordering,
) -> Result<Vec<Estimate>, ObservableError> {
    let shift = result.ordering_shift(ordering)?;
    let c = result.checkpoint(checkpoint)?;
    Ok(c.spectrum
        .iter()
        .map(|m| Estimate {
            value: m.mean.re + shift,
            se: m.se_re(),
        })
        .collect())
}

/// Ensemble mean field `⟨φ⟩` at each τ.
pub fn mean_field(
    result: &EnsembleResult,
    checkpoint: usize,
) -> Result<Vec<Complex64>, ObservableError> {
    Ok(result
        .checkpoint(checkpoint)?
        .field
        .iter()
        .map(|m| m.mean)
        .collect())
}

/// Photon-weighted mean frequency of the normally ordered spectrum, with a
/// delta-method SE for the ratio.
pub fn mean_frequency(
    result: &EnsembleResult,
    checkpoint: usize,
) -> Result<Estimate, ObservableError> {
    let c = result.checkpoint(checkpoint)?;
    let shift = result.ordering_shift(Ordering::Normal)?;
    let omega_sum: f64 = result.grid.omegas().iter().sum();
    let num = c.frequency.mean_x + shift * omega_sum;
    let den = c.frequency.mean_y + shift * result.grid.modes as f64;
    if !(den > 0.0) {
        return Err(ObservableError::ZeroIntensity {
            checkpoint,
            total: den,
        });
    }
    let ratio = num / den;
    let (vx, vy, cxy) = c.frequency.mean_covariance();
    let var = (vx - 2.0 * ratio * cxy + ratio * ratio * vy) / (den * den);
    Ok(Estimate {
        value: ratio,
        se: var.max(0.0).sqrt(),
    })
}

/// Result of a quadrature-variance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariance {
    pub value: f64,
    pub se: f64,
    /// Phase applied to the local oscillator: `LO → LO e^{iθ}`.
    pub theta: f64,
}

/// Finds the registered LO `r` with `lo = e^{iθ} r`.
fn match_lo(result: &EnsembleResult, lo: &[Complex64]) -> Result<(usize, f64), ObservableError> {
    check_lo(&result.grid, lo)?;
    let dtau = result.grid.dtau();
    for (i, r) in result.local_oscillators.iter().enumerate() {
        let overlap: Complex64 = r
            .iter()
            .zip(lo)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * dtau;
        if (overlap.norm() - 1.0).abs() < 1e-9 {
            return Ok((i, overlap.arg()));
        }
    }
    Err(ObservableError::UnregisteredLocalOscillator)
}

fn variance_at(samples: &[(Complex64, Complex64)], theta: f64) -> (f64, f64) {
    let rot = Complex64::from_polar(1.0, -theta);
    let xs: Vec<Complex64> = samples
        .iter()
        .map(|(a, ap)| (a * rot + ap * rot.conj()) * FRAC_1_SQRT_2)
        .collect();
    let n = xs.len();
    if n < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mean: Complex64 = xs.iter().sum::<Complex64>() / n as f64;
    let ys: Vec<f64> = xs.iter().map(|x| ((x - mean) * (x - mean)).re).collect();
    let value = ys.iter().sum::<f64>() / (n - 1) as f64;
    let ybar = ys.iter().sum::<f64>() / n as f64;
    let var_y = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum::<f64>() / (n - 1) as f64;
    (value, (var_y / n as f64).sqrt())
}

/// Variance of `X = (a + a⁺)/√2` with `a = √n̄ Σ LO*φ Δτ`, at the requested
/// ordering. The vacuum gives 1/2 symmetrically ordered. `lo` must be a
/// registered local oscillator up to a global phase.
pub fn quadrature_variance(
    result: &EnsembleResult,
    checkpoint: usize,
    lo: &[Complex64],
    ordering: Ordering,
) -> Result<QuadratureVariance, ObservableError> {
    let shift = result.ordering_shift(ordering)?;
    let c = result.checkpoint(checkpoint)?;
    let (index, theta) = match_lo(result, lo)?;
    let (value, se) = variance_at(&c.projections[index], theta);
    Ok(QuadratureVariance {
        value: value + shift,
        se,
        theta,
    })
}

/// Minimum of [`quadrature_variance`] over the LO phase.
pub fn min_quadrature_variance(
    result: &EnsembleResult,
    checkpoint: usize,
    lo: &[Complex64],
    ordering: Ordering,
) -> Result<QuadratureVariance, ObservableError> {
    let shift = result.ordering_shift(ordering)?;
    let c = result.checkpoint(checkpoint)?;
    let (index, _) = match_lo(result, lo)?;
    let samples = &c.projections[index];
    let n = samples.len();
    if n < 2 {
        return Ok(QuadratureVariance {
            value: f64::NAN,
            se: f64::NAN,
            theta: 0.0,
        });
    }
    let ma: Complex64 = samples.iter().map(|s| s.0).sum::<Complex64>() / n as f64;
    let mp: Complex64 = samples.iter().map(|s| s.1).sum::<Complex64>() / n as f64;
    let aa: Complex64 = samples.iter().map(|s| (s.0 - ma) * (s.0 - ma)).sum();
    let pp: Complex64 = samples.iter().map(|s| (s.1 - mp) * (s.1 - mp)).sum();
    // Var(θ) = ½ Re[aa e^{-2iθ} + pp e^{2iθ}] + const, minimized where the
    // rotated sum points along the negative real axis
    let s = aa + pp.conj();
    let theta = 0.5 * (s.arg() + PI);
    let (value, se) = variance_at(samples, theta);
    Ok(QuadratureVariance {
        value: value + shift,
        se,
        theta,
    })
}

/// Largest `|Im mean| / SE` over the flux points and the total: a
/// positive-P consistency diagnostic (should stay below about 4).
pub fn imaginary_ratio(result: &EnsembleResult, checkpoint: usize) -> Result<f64, ObservableError> {
    let c = result.checkpoint(checkpoint)?;
    let ratio = |m: &ComplexMoments| {
        let se = m.se_im();
        if se > 0.0 {
            m.mean.im.abs() / se
        } else if m.mean.im == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(c.flux
        .iter()
        .chain(std::iter::once(&c.total))
        .map(ratio)
        .fold(0.0, f64::max))
}

fn fmt_row(out: &mut String, a: f64, b: f64, c: f64) {
    let _ = writeln!(out, "{a:.12e} {b:.12e} {c:.12e}");
}

/// `tau flux se` table.
pub fn flux_table(result: &EnsembleResult, checkpoint: usize) -> Result<String, ObservableError> {
    let flux = photon_flux(result, checkpoint)?;
    let mut out = String::from("tau flux se\n");
    for (j, e) in flux.iter().enumerate() {
        fmt_row(&mut out, result.grid.tau(j), e.value, e.se);
    }
    Ok(out)
}

/// `omega spectrum se` table in ascending Ω.
pub fn spectrum_table(
    result: &EnsembleResult,
    checkpoint: usize,
    ordering: Ordering,
) -> Result<String, ObservableError> {
    let spec = optical_spectrum(result, checkpoint, ordering)?;
    let m = result.grid.modes;
    let mut out = String::from("omega spectrum se\n");
    for i in 0..m {
        let k = (i + m / 2) % m;
        fmt_row(&mut out, result.grid.omega(k), spec[k].value, spec[k].se);
    }
    Ok(out)
}

/// `zeta mean_frequency se` table over all checkpoints; checkpoints with no
/// light give `NaN`.
pub fn mean_frequency_table(result: &EnsembleResult) -> String {
    let mut out = String::from("zeta mean_frequency se\n");
    for (i, c) in result.moments.iter().enumerate() {
        let e = mean_frequency(result, i).unwrap_or(Estimate {
            value: f64::NAN,
            se: f64::NAN,
        });
        fmt_row(&mut out, c.zeta, e.value, e.se);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dispersion;

    fn grid(rep: Representation) -> SimulationGrid {
        SimulationGrid::new(64, 16.0, 1.0, 0.1, Dispersion::Anomalous, rep, 3).unwrap()
    }

    fn gaussian_lo(g: &SimulationGrid) -> Vec<Complex64> {
        let raw: Vec<f64> = g.taus().iter().map(|t| (-t * t / 2.0).exp()).collect();
        let norm = (raw.iter().map(|x| x * x).sum::<f64>() * g.dtau()).sqrt();
        raw.iter().map(|x| Complex64::new(x / norm, 0.0)).collect()
    }

    fn result_from(
        g: &SimulationGrid,
        states: &[FieldState],
        nbar: f64,
        los: Vec<Vec<Complex64>>,
    ) -> EnsembleResult {
        let obs = Observer::new(g, nbar, los.clone()).unwrap();
        let mut scratch = obs.scratch();
        let mut acc = Accumulator::new(g, &[0.0], los.len());
        for s in states {
            acc.push(&[obs.observe(s, &mut scratch)]);
        }
        EnsembleResult {
            representation: g.representation,
            grid: g.clone(),
            photon_number: nbar,
            local_oscillators: los,
            moments: acc.checkpoints,
            trajectory_count: states.len(),
            diverged_count: 0,
            diverged: Vec::new(),
            kept: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn sech(g: &SimulationGrid) -> Vec<Complex64> {
        g.taus()
            .iter()
            .map(|t| Complex64::new(1.0 / t.cosh(), 0.0))
            .collect()
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let data: Vec<Complex64> = (0..37)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut all = ComplexMoments::default();
        data.iter().for_each(|z| all.push(*z));
        let mut a = ComplexMoments::default();
        let mut b = ComplexMoments::default();
        data[..10].iter().for_each(|z| a.push(*z));
        data[10..].iter().for_each(|z| b.push(*z));
        a.merge(&b);
        assert_eq!(a.count, all.count);
        assert!((a.mean - all.mean).norm() < 1e-14);
        assert!((a.se_re() - all.se_re()).abs() < 1e-14);
        assert!((a.se_im() - all.se_im()).abs() < 1e-14);

        let mut p = PairMoments::default();
        let mut q = PairMoments::default();
        let mut r = PairMoments::default();
        for (i, z) in data.iter().enumerate() {
            p.push(z.re, z.im);
            if i < 5 {
                q.push(z.re, z.im)
            } else {
                r.push(z.re, z.im)
            }
        }
        q.merge(&r);
        let (a1, b1, c1) = p.mean_covariance();
        let (a2, b2, c2) = q.mean_covariance();
        assert!((a1 - a2).abs() < 1e-15 && (b1 - b2).abs() < 1e-15 && (c1 - c2).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_have_zero_spread() {
        let mut m = ComplexMoments::default();
        for _ in 0..5 {
            m.push(Complex64::new(0.1, 0.7));
        }
        assert_eq!(m.se_re(), 0.0);
        assert_eq!(m.se_im(), 0.0);
    }

    #[test]
    fn coherent_positive_p_flux_and_zero_variance() {
        let g = grid(Representation::PositiveP);
        let lo = gaussian_lo(&g);
        let s = FieldState::positive_p(sech(&g));
        let r = result_from(&g, &[s.clone(), s.clone(), s], 50.0, vec![lo.clone()]);
        let flux = photon_flux(&r, 0).unwrap();
        for (j, e) in flux.iter().enumerate() {
            let expect = 50.0 / g.tau(j).cosh().powi(2);
            assert!((e.value - expect).abs() < 1e-12 * expect.max(1.0));
        }
        let v = quadrature_variance(&r, 0, &lo, Ordering::Normal).unwrap();
        assert_eq!(v.value, 0.0);
        let v = quadrature_variance(&r, 0, &lo, Ordering::Symmetric).unwrap();
        assert_eq!(v.value, 0.5);
    }

    #[test]
    fn parseval_between_flux_and_spectrum() {
        for rep in [Representation::Wigner, Representation::PositiveP] {
            let g = grid(rep);
            let phi: Vec<Complex64> = g
                .taus()
                .iter()
                .map(|t| Complex64::from_polar(1.0 / (t - 0.3).cosh(), 0.4 * t))
                .collect();
            let mut s = match rep {
                Representation::Wigner => FieldState::wigner(phi),
                Representation::PositiveP => FieldState::positive_p(phi),
            };
            if let Some(p) = s.phi_plus.as_mut() {
                p.iter_mut()
                    .enumerate()
                    .for_each(|(j, z)| *z *= Complex64::new(1.0, 0.01 * j as f64));
            }
            let r = result_from(&g, &[s], 20.0, Vec::new());
            let total = total_photons(&r, 0).unwrap().value;
            let spec: f64 = optical_spectrum(&r, 0, Ordering::Normal)
                .unwrap()
                .iter()
                .map(|e| e.value)
                .sum();
            assert!(
                (total - spec).abs() < 1e-10 * total.abs().max(1.0),
                "{rep}: {total} vs {spec}"
            );
            let sym: Vec<Estimate> = optical_spectrum(&r, 0, Ordering::Symmetric).unwrap();
            let norm: Vec<Estimate> = optical_spectrum(&r, 0, Ordering::Normal).unwrap();
            for (a, b) in sym.iter().zip(&norm) {
                assert!((a.value - b.value - 0.5).abs() < 1e-12 * (1.0 + a.value.abs()));
            }
        }
    }

    #[test]
    fn antinormal_is_rejected() {
        let g = grid(Representation::Wigner);
        let r = result_from(&g, &[FieldState::wigner(sech(&g))], 1.0, Vec::new());
        assert_eq!(
            optical_spectrum(&r, 0, Ordering::Antinormal).unwrap_err(),
            ObservableError::UnsupportedOrdering(Ordering::Antinormal)
        );
    }

    #[test]
    fn symmetric_soliton_has_zero_mean_frequency() {
        let g = grid(Representation::PositiveP);
        let r = result_from(&g, &[FieldState::positive_p(sech(&g))], 1.0, Vec::new());
        let e = mean_frequency(&r, 0).unwrap();
        // only the unpaired Nyquist bin breaks the symmetry
        assert!(e.value.abs() < 1e-8, "{}", e.value);
        let empty = result_from(
            &g,
            &[FieldState::positive_p(vec![Complex64::new(0.0, 0.0); 64])],
            1.0,
            Vec::new(),
        );
        assert!(matches!(
            mean_frequency(&empty, 0),
            Err(ObservableError::ZeroIntensity { .. })
        ));
    }

    #[test]
    fn phase_rotated_lo_is_recognized() {
        let g = grid(Representation::Wigner);
        let lo = gaussian_lo(&g);
        let states: Vec<FieldState> = (0..50)
            .map(|i| {
                let x = (i as f64 * 0.37).sin();
                let y = (i as f64 * 1.3).cos();
                FieldState::wigner(lo.iter().map(|l| l * Complex64::new(x, 0.3 * y)).collect())
            })
            .collect();
        let r = result_from(&g, &states, 1.0, vec![lo.clone()]);
        let quarter: Vec<Complex64> = lo.iter().map(|l| l * Complex64::new(0.0, 1.0)).collect();
        let v0 = quadrature_variance(&r, 0, &lo, Ordering::Symmetric).unwrap();
        let v1 = quadrature_variance(&r, 0, &quarter, Ordering::Symmetric).unwrap();
        assert!((v1.theta - PI / 2.0).abs() < 1e-12);
        // a = c (x + 0.3 i y): the in-phase quadrature sees x, the other 0.3 y
        assert!(v1.value < v0.value);
        let min = min_quadrature_variance(&r, 0, &lo, Ordering::Symmetric).unwrap();
        for k in 0..180 {
            let th = k as f64 * PI / 180.0;
            let rot: Vec<Complex64> = lo
                .iter()
                .map(|l| l * Complex64::from_polar(1.0, th))
                .collect();
            let v = quadrature_variance(&r, 0, &rot, Ordering::Symmetric).unwrap();
            assert!(v.value >= min.value - 1e-12);
        }
        let other: Vec<Complex64> = lo
            .iter()
            .enumerate()
            .map(|(j, l)| if j % 2 == 0 { *l } else { -l })
            .collect();
        let norm = (other.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dtau()).sqrt();
        let other: Vec<Complex64> = other.iter().map(|z| z / norm).collect();
        assert_eq!(
            quadrature_variance(&r, 0, &other, Ordering::Normal).unwrap_err(),
            ObservableError::UnregisteredLocalOscillator
        );
    }

    #[test]
    fn tables_have_single_header() {
        let g = grid(Representation::PositiveP);
        let r = result_from(&g, &[FieldState::positive_p(sech(&g))], 1.0, Vec::new());
        let t = flux_table(&r, 0).unwrap();
        assert_eq!(t.lines().next(), Some("tau flux se"));
        assert_eq!(t.lines().count(), 65);
        let s = spectrum_table(&r, 0, Ordering::Normal).unwrap();
        let first: f64 = s
            .lines()
            .nth(1)
            .unwrap()
            .split(' ')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!((first - g.omega(32)).abs() < 1e-12);
        assert_eq!(mean_frequency_table(&r).lines().count(), 2);
    }
}
