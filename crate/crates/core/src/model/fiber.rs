use std::f64::consts::{LN_10, PI};
use std::fmt;

use super::ModelError;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Power attenuation in dB/km to the intensity (power) coefficient in m⁻¹.
pub fn db_per_km_to_intensity_per_m(db_per_km: f64) -> f64 {
    db_per_km * LN_10 / 10.0 / 1000.0
}

/// Power attenuation in dB/km to the field-amplitude coefficient in m⁻¹,
/// half the intensity coefficient.
pub fn db_per_km_to_amplitude_per_m(db_per_km: f64) -> f64 {
    0.5 * db_per_km_to_intensity_per_m(db_per_km)
}

/// SI description of a fiber and the scaling time `t₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalFiber {
    /// Carrier wavelength λ, m.
    pub wavelength: f64,
    /// Group velocity v, m/s.
    pub group_velocity: f64,
    /// Group-velocity dispersion k'', s²/m (negative is anomalous).
    pub gvd: f64,
    /// Nonlinear index n₂, m²/W.
    pub n2: f64,
    /// Effective modal area A, m².
    pub mode_area: f64,
    /// Pulse time scale t₀, s.
    pub t0: f64,
    /// Temperature, K.
    pub temperature: f64,
    pub loss_db_per_km: f64,
    pub gain_db_per_km: f64,
}

impl Default for PhysicalFiber {
    /// Dispersion-shifted silica fiber near 1.55 µm with 1 ps pulses.
    fn default() -> Self {
        PhysicalFiber {
            wavelength: 1.55e-6,
            group_velocity: 2.04e8,
            gvd: -1.27e-27,
            n2: 2.6e-20,
            mode_area: 5.0e-11,
            t0: 1.0e-12,
            temperature: 0.0,
            loss_db_per_km: 0.0,
            gain_db_per_km: 0.0,
        }
    }
}

impl PhysicalFiber {
    pub fn carrier_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    pub fn thermal(&self) -> Result<Thermal, ModelError> {
        Thermal::new(self.t0, self.temperature)
    }

    pub fn dimensionless_units(&self) -> Result<DimensionlessUnits, ModelError> {
        if self.gvd == 0.0 {
            return Err(ModelError::ZeroDispersion);
        }
        for (name, value) in [
            ("wavelength", self.wavelength),
            ("group_velocity", self.group_velocity),
            ("n2", self.n2),
            ("mode_area", self.mode_area),
            ("t0", self.t0),
            ("gvd", self.gvd.abs()),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::FiberParameter { name, value });
            }
        }
        if !(self.temperature >= 0.0) {
            return Err(ModelError::NegativeTemperature(self.temperature));
        }
        for (name, value) in [
            ("loss_db_per_km", self.loss_db_per_km),
            ("gain_db_per_km", self.gain_db_per_km),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::FiberParameter { name, value });
            }
        }
        let omega0 = self.carrier_angular_frequency();
        let x0 = self.t0 * self.t0 / self.gvd.abs();
        let photon_number = self.gvd.abs() * self.mode_area * SPEED_OF_LIGHT
            / (self.n2 * HBAR * omega0 * omega0 * self.t0);
        let loss_intensity = db_per_km_to_intensity_per_m(self.loss_db_per_km);
        let gain_intensity = db_per_km_to_intensity_per_m(self.gain_db_per_km);
        Ok(DimensionlessUnits {
            t0: self.t0,
            x0,
            photon_number,
            flux_scale: photon_number / self.t0,
            carrier_angular_frequency: omega0,
            loss_amplitude_per_m: 0.5 * loss_intensity,
            loss_intensity_per_m: loss_intensity,
            alpha_loss: loss_intensity * x0,
            gain_amplitude_per_m: 0.5 * gain_intensity,
            gain_intensity_per_m: gain_intensity,
            alpha_gain: gain_intensity * x0,
            slowly_varying_ratio: self.group_velocity * self.t0 / x0,
        })
    }
}

/// Scalings from SI to the dimensionless propagative frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessUnits {
    pub t0: f64,
    /// Dispersion length `x₀ = t₀²/|k''|`, m.
    pub x0: f64,
    /// `n̄ = |k''| A c / (n₂ ħ ω₀² t₀)`, photons in a fundamental soliton of width t₀.
    pub photon_number: f64,
    /// `n̄/t₀`: photon flux (s⁻¹) per unit `|φ|²`.
    pub flux_scale: f64,
    pub carrier_angular_frequency: f64,
    pub loss_amplitude_per_m: f64,
    pub loss_intensity_per_m: f64,
    /// Dimensionless intensity loss `α^A` per unit ζ.
    pub alpha_loss: f64,
    pub gain_amplitude_per_m: f64,
    pub gain_intensity_per_m: f64,
    /// Dimensionless intensity gain `α^G` per unit ζ.
    pub alpha_gain: f64,
    /// `v t₀ / x₀`, must be ≪ 1 for the propagative frame to hold.
    pub slowly_varying_ratio: f64,
}

impl fmt::Display for DimensionlessUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "t0_s = {:.6e}", self.t0)?;
        writeln!(f, "x0_m = {:.6e}", self.x0)?;
        writeln!(f, "x0_km = {:.6}", self.x0 / 1000.0)?;
        writeln!(f, "photon_number = {:.6e}", self.photon_number)?;
        writeln!(f, "flux_scale_per_s = {:.6e}", self.flux_scale)?;
        writeln!(
            f,
            "carrier_angular_frequency_rad_per_s = {:.6e}",
            self.carrier_angular_frequency
        )?;
        writeln!(
            f,
            "loss_amplitude_coefficient_per_m = {:.6e}",
            self.loss_amplitude_per_m
        )?;
        writeln!(
            f,
            "loss_intensity_coefficient_per_m = {:.6e}",
            self.loss_intensity_per_m
        )?;
        writeln!(f, "alpha_loss = {:.6e}", self.alpha_loss)?;
        writeln!(
            f,
            "gain_amplitude_coefficient_per_m = {:.6e}",
            self.gain_amplitude_per_m
        )?;
        writeln!(
            f,
            "gain_intensity_coefficient_per_m = {:.6e}",
            self.gain_intensity_per_m
        )?;
        writeln!(f, "alpha_gain = {:.6e}", self.alpha_gain)?;
        writeln!(
            f,
            "slowly_varying_ratio = {:.6e}",
            self.slowly_varying_ratio
        )
    }
}

/// Bose-Einstein phonon occupation at physical frequency `|Ω|/t₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermal {
    pub t0: f64,
    pub temperature: f64,
}

impl Thermal {
    pub fn new(t0: f64, temperature: f64) -> Result<Self, ModelError> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(ModelError::NegativeTemperature(temperature));
        }
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(ModelError::FiberParameter {
                name: "t0",
                value: t0,
            });
        }
        Ok(Thermal { t0, temperature })
    }

    pub fn zero_temperature(t0: f64) -> Self {
        Thermal {
            t0,
            temperature: 0.0,
        }
    }

    /// `n_th(|Ω|/t₀)`; infinite at `Ω = 0` when `T > 0`.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            return 0.0;
        }
        let x = HBAR * omega.abs() / (self.t0 * BOLTZMANN * self.temperature);
        1.0 / x.exp_m1()
    }

    /// `α · (n_th(Ω) + offset)`, defined as 0 whenever `α = 0` so the Ω = 0
    /// bin stays finite.
    pub fn weighted(&self, alpha: f64, omega: f64, offset: f64) -> f64 {
        if alpha == 0.0 {
            return 0.0;
        }
        alpha * (self.occupation(omega) + offset)
    }
}

/// `n_th(|Ω|/t₀)` at the fiber's temperature.
pub fn thermal_occupation(omega: f64, fiber: &PhysicalFiber) -> Result<f64, ModelError> {
    Ok(fiber.thermal()?.occupation(omega))
}
