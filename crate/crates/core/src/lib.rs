//! Stochastic phase-space simulation of quantum noise in nonlinear optical fibers.
//!
//! The crate integrates the dimensionless Raman-modified nonlinear Schrödinger
//! equation in the truncated-Wigner and positive-P representations, synthesizes
//! the colored gain, loss and Raman reservoir noise each representation needs,
//! and turns trajectory ensembles into ordering-corrected observables.
//!
//! Module map:
//!
//! * [`model`]: response functions `h` and `g`, thermal occupation, and the
//!   bridge from SI fiber parameters to soliton units.
//! * [`ramanfit`]: multi-Lorentzian least-squares fits of measured Raman gain.
//! * [`noise`]: initial vacuum, additive and multiplicative Raman noise fields
//!   and their empirical verification.
//! * [`integrator`]: split-step Fourier propagation and ensemble driver.
//! * [`observables`]: ensemble accumulators and ordering corrections.
//! * [`config`]: the sectioned key-value run configuration.
//!
//! Fourier conventions are fixed crate-wide. Response functions follow
//! `f̃(Ω) = ∫ dτ e^{iΩτ} f(τ)` (no `1/√2π`), stochastic fields use the
//! symmetric `1/√2π` convention, and the discrete delta functions are
//! `δ(τ) → 1/Δτ`, `δ(Ω) → 1/ΔΩ`, `δ(ζ) → 1/dζ`.

pub mod config;
pub mod grid;
pub mod integrator;
pub mod kv;
pub mod model;
pub mod noise;
pub mod observables;
pub mod ramanfit;

pub use num_complex::Complex64;

pub use grid::{Dispersion, Fourier, Representation, SimulationGrid};
pub use model::{
    GainLossProfile, LorentzianTerm, PhysicalFiber, ResponseModel, SampledCurve, Thermal,
};
