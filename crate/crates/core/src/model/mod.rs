//! Dimensionless fiber model: nonlinear response `h`, linear response `g`,
//! thermal phonon occupation and the SI ↔ soliton-unit bridge.
//!
//! All response transforms here use `f̃(Ω) = ∫dτ e^{iΩτ} f(τ)` without a
//! `1/√2π` factor, so `h̃(0) = ∫h dτ = 1` for a normalized model.

mod fiber;
mod io;
pub mod kk;
mod profile;
mod response;

use thiserror::Error;

pub use fiber::{
    db_per_km_to_amplitude_per_m, db_per_km_to_intensity_per_m, thermal_occupation,
    DimensionlessUnits, PhysicalFiber, Thermal, BOLTZMANN, HBAR, SPEED_OF_LIGHT,
};
pub use io::{
    parse_profile, parse_response_model, silica_response, write_profile, write_response_model,
};
pub use profile::{GainLossProfile, SampledCurve};
pub use response::{LorentzianTerm, ResponseModel};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("Lorentzian width must be positive and finite, got {0}")]
    Width(f64),
    #[error("Lorentzian center must be non-negative and finite, got {0}")]
    Center(f64),
    #[error("Lorentzian strength must be finite, got {0}")]
    Strength(f64),
    #[error("electronic fraction must lie in [0, 1], got {0}")]
    ElectronicFraction(f64),
    #[error("{curve} curve is negative ({value}) at Ω = {omega}")]
    NegativeCurve {
        curve: &'static str,
        omega: f64,
        value: f64,
    },
    #[error("sampled curve needs strictly increasing, finite abscissae")]
    CurveSamples,
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
    #[error("group-velocity dispersion k'' is zero: no dispersion length scale")]
    ZeroDispersion,
    #[error("fiber parameter `{name}` must be positive and finite, got {value}")]
    FiberParameter { name: &'static str, value: f64 },
}
