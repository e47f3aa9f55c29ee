use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("mode count {0} is not a power of two (minimum 2)")]
    ModeCount(usize),
    #[error("time window must be positive and finite, got {0}")]
    Window(f64),
    #[error("propagation step must be positive and finite, got {0}")]
    Step(f64),
    #[error("propagation length must be positive and finite, got {0}")]
    Length(f64),
}

/// Phase-space representation a trajectory lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Truncated Wigner: one field, symmetric ordering.
    Wigner,
    /// Positive-P: independent `φ` and `φ⁺`, normal ordering.
    PositiveP,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Wigner => "wigner",
            Representation::PositiveP => "positive-p",
        })
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wigner" | "w" => Ok(Representation::Wigner),
            "positive-p" | "positivep" | "+p" | "p" => Ok(Representation::PositiveP),
            other => Err(format!("unknown representation `{other}`")),
        }
    }
}

/// Sign of the second-derivative term: `+i/2 ∂²φ/∂τ²` for anomalous
/// dispersion (`k'' < 0`), `-i/2` for normal dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dispersion {
    Anomalous,
    Normal,
}

impl Dispersion {
    pub fn sign(self) -> f64 {
        match self {
            Dispersion::Anomalous => 1.0,
            Dispersion::Normal => -1.0,
        }
    }

    /// Regime implied by the sign of the group-velocity dispersion `k''`.
    pub fn from_gvd(gvd: f64) -> Self {
        if gvd > 0.0 {
            Dispersion::Normal
        } else {
            Dispersion::Anomalous
        }
    }
}

impl fmt::Display for Dispersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dispersion::Anomalous => "anomalous",
            Dispersion::Normal => "normal",
        })
    }
}

impl FromStr for Dispersion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "anomalous" | "+" => Ok(Dispersion::Anomalous),
            "normal" | "-" => Ok(Dispersion::Normal),
            other => Err(format!("unknown dispersion regime `{other}`")),
        }
    }
}

/// Periodic time grid in the co-moving frame plus the propagation schedule.
///
/// `τ_j = -τ_window/2 + jΔτ`; frequencies are kept in FFT order, so
/// `Ω_k = 2πk/τ_window` for `k < M/2` and `2π(k-M)/τ_window` above, which
/// puts the Nyquist bin at `-π/Δτ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationGrid {
    pub modes: usize,
    pub window: f64,
    pub zeta_end: f64,
    pub dzeta: f64,
    pub dispersion: Dispersion,
    pub representation: Representation,
    pub master_seed: u64,
}

impl SimulationGrid {
    pub fn new(
        modes: usize,
        window: f64,
        zeta_end: f64,
        dzeta: f64,
        dispersion: Dispersion,
        representation: Representation,
        master_seed: u64,
    ) -> Result<Self, GridError> {
        let grid = SimulationGrid {
            modes,
            window,
            zeta_end,
            dzeta,
            dispersion,
            representation,
            master_seed,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.modes < 2 || !self.modes.is_power_of_two() {
            return Err(GridError::ModeCount(self.modes));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(GridError::Window(self.window));
        }
        if !(self.dzeta.is_finite() && self.dzeta > 0.0) {
            return Err(GridError::Step(self.dzeta));
        }
        if !(self.zeta_end.is_finite() && self.zeta_end > 0.0) {
            return Err(GridError::Length(self.zeta_end));
        }
        Ok(())
    }

    pub fn dtau(&self) -> f64 {
        self.window / self.modes as f64
    }

    pub fn domega(&self) -> f64 {
        2.0 * PI / self.window
    }

    pub fn tau(&self, j: usize) -> f64 {
        -0.5 * self.window + j as f64 * self.dtau()
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.tau(j)).collect()
    }

    pub fn omega(&self, k: usize) -> f64 {
        let m = self.modes as isize;
        let k = k as isize;
        let signed = if k < m / 2 { k } else { k - m };
        signed as f64 * self.domega()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.modes).map(|k| self.omega(k)).collect()
    }

    /// Index of the bin holding `-Ω_k`. The zero and Nyquist bins map to
    /// themselves.
    pub fn mirror(&self, k: usize) -> usize {
        (self.modes - k) % self.modes
    }

    /// Number of propagation steps, rounding `ζ_end/dζ` to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.zeta_end / self.dzeta).round().max(1.0) as usize
    }
}

/// FFT plans plus the scalings that turn them into the continuum transforms.
///
/// `forward` approximates `∫dτ e^{+iΩτ} f(τ)` and `inverse` approximates
/// `(1/2π)∫dΩ e^{-iΩτ} f̃(Ω)`, so the pair is exact inverses on the grid.
/// The grid origin offset `τ_0` is dropped: it only contributes a phase
/// `e^{iΩτ_0}` that cancels in every filter, convolution and power spectrum.
#[derive(Clone)]
pub struct Fourier {
    modes: usize,
    dtau: f64,
    // rustfft's "inverse" is the e^{+i} kernel
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier")
            .field("modes", &self.modes)
            .field("dtau", &self.dtau)
            .finish()
    }
}

impl Fourier {
    pub fn new(modes: usize, dtau: f64) -> Self {
        let mut planner = FftPlanner::new();
        Fourier {
            modes,
            dtau,
            plus: planner.plan_fft_inverse(modes),
            minus: planner.plan_fft_forward(modes),
        }
    }

    pub fn for_grid(grid: &SimulationGrid) -> Self {
        Self::new(grid.modes, grid.dtau())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .plus
            .get_inplace_scratch_len()
            .max(self.minus.get_inplace_scratch_len());
        vec![Complex64::new(0.0, 0.0); len]
    }

    /// Unscaled `Σ_j x_j e^{+2πijk/M}`.
    pub fn sum_plus(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.plus.process_with_scratch(data, scratch);
    }

    /// Unscaled `Σ_k x_k e^{-2πijk/M}`.
    pub fn sum_minus(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.minus.process_with_scratch(data, scratch);
    }

    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.sum_plus(data, scratch);
        let s = self.dtau;
        data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.sum_minus(data, scratch);
        let s = 1.0 / (self.modes as f64 * self.dtau);
        data.iter_mut().for_each(|x| *x *= s);
    }
}
