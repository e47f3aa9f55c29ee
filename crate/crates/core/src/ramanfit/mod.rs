//! Multi-Lorentzian fits of measured Raman gain spectra.
//!
//! The fitted quantity is the gain curve `α^R(Ω) = 2|h''(Ω)|`. Lorentzian
//! decompositions of a gain curve are not unique: terms can trade strength
//! and width, and overlapping lines can swap roles. Judge a fit by the
//! reconstructed curve, never by individual parameters.

mod lm;
mod spectrum;

use std::fmt::Write as _;

use thiserror::Error;

use crate::kv::fmt_f64;
use crate::model::{LorentzianTerm, ResponseModel};

pub use lm::FitOptions;
pub use spectrum::{parse_spectrum_table, FrequencyUnit, SpectrumError};

/// One measured gain point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSpectrumSample {
    pub omega: f64,
    pub gain: f64,
    pub weight: f64,
}

impl GainSpectrumSample {
    pub fn new(omega: f64, gain: f64) -> Self {
        GainSpectrumSample {
            omega,
            gain,
            weight: 1.0,
        }
    }
}

/// Rough per-term uncertainty from the linearized covariance at the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermDiagnostics {
    pub strength_se: f64,
    pub center_se: f64,
    pub width_se: f64,
    /// Share of `∫|α^R_j|` carried by this term over the sampled band.
    pub weight_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: ResponseModel,
    pub residual_rms: f64,
    pub iterations: usize,
    pub converged: bool,
    pub terms: Vec<TermDiagnostics>,
    /// Objective after each accepted iteration, starting with the initial guess.
    pub cost_history: Vec<f64>,
}

impl FitReport {
    pub fn raman_fraction(&self) -> f64 {
        self.model.raman_fraction()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format = fibernoise-fit-report 1");
        let _ = writeln!(out, "converged = {}", self.converged);
        let _ = writeln!(out, "iterations = {}", self.iterations);
        let _ = writeln!(out, "residual_rms = {}", fmt_f64(self.residual_rms));
        let _ = writeln!(out, "raman_fraction = {}", fmt_f64(self.raman_fraction()));
        let _ = writeln!(
            out,
            "electronic_fraction = {}",
            fmt_f64(self.model.electronic_fraction)
        );
        if let Some(t0) = self.model.time_scale {
            let _ = writeln!(out, "time_scale_s = {}", fmt_f64(t0));
        }
        let _ = writeln!(out, "terms = {}", self.model.lorentzians.len());
        let _ = writeln!(
            out,
            "# term.<j> = F Omega Delta se_F se_Omega se_Delta weight_share"
        );
        for (j, (t, d)) in self.model.lorentzians.iter().zip(&self.terms).enumerate() {
            let _ = writeln!(
                out,
                "term.{j} = {} {} {} {} {} {} {}",
                fmt_f64(t.strength),
                fmt_f64(t.center),
                fmt_f64(t.width),
                fmt_f64(d.strength_se),
                fmt_f64(d.center_se),
                fmt_f64(d.width_se),
                fmt_f64(d.weight_share),
            );
        }
        out
    }

    /// Plot-ready `omega measured fitted residual` table.
    pub fn curve_table(&self, samples: &[GainSpectrumSample]) -> String {
        let mut out = String::from("omega measured fitted residual\n");
        for s in samples {
            let fit = self.model.raman_gain(s.omega);
            let _ = writeln!(
                out,
                "{:.12e} {:.12e} {:.12e} {:.12e}",
                s.omega,
                s.gain,
                fit,
                fit - s.gain
            );
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} samples for {terms} terms, got {got}")]
    InsufficientData {
        needed: usize,
        got: usize,
        terms: usize,
    },
    #[error("all samples share one frequency; the line shape is undetermined")]
    DegenerateData,
    #[error("invalid sample {index}: {reason}")]
    InvalidSample { index: usize, reason: String },
    #[error("n_terms must be at least 1")]
    NoTerms,
    #[error("iteration cap reached after {} iterations (residual rms {:.3e})", .0.iterations, .0.residual_rms)]
    NoConvergence(Box<FitReport>),
    #[error("initial guess has {got} terms, expected {expected}")]
    GuessShape { expected: usize, got: usize },
}

/// Least-squares fit of `n_terms` Lorentzians to `samples`.
///
/// Minimizes `Σ w_s (α^R_model(Ω_s) - α_s)²` with a damped Gauss-Newton
/// iteration. Strengths are free in sign; centers and widths are kept
/// positive through a log parameterization, and when
/// `options.brillouin_center_max` is set term 0 is confined to
/// `(0, bound)` through a logistic map.
pub fn fit_lorentzians(
    samples: &[GainSpectrumSample],
    n_terms: usize,
    initial_guess: Option<&ResponseModel>,
    options: &FitOptions,
) -> Result<FitReport, FitError> {
    if n_terms == 0 {
        return Err(FitError::NoTerms);
    }
    for (index, s) in samples.iter().enumerate() {
        let reason = if !(s.omega.is_finite() && s.omega >= 0.0) {
            Some("frequency must be finite and non-negative")
        } else if !(s.gain.is_finite() && s.gain >= 0.0) {
            Some("gain must be finite and non-negative")
        } else if !(s.weight.is_finite() && s.weight > 0.0) {
            Some("weight must be positive")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(FitError::InvalidSample {
                index,
                reason: reason.to_string(),
            });
        }
    }
    if samples.len() < 3 * n_terms {
        return Err(FitError::InsufficientData {
            needed: 3 * n_terms,
            got: samples.len(),
            terms: n_terms,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    if sorted.first().map(|s| s.omega) == sorted.last().map(|s| s.omega) {
        return Err(FitError::DegenerateData);
    }
    let guess = match initial_guess {
        Some(m) => {
            if m.lorentzians.len() != n_terms {
                return Err(FitError::GuessShape {
                    expected: n_terms,
                    got: m.lorentzians.len(),
                });
            }
            m.lorentzians.clone()
        }
        None => initial_guess_from_peaks(&sorted, n_terms),
    };
    let report = lm::run(&sorted, guess, options);
    if report.converged {
        Ok(report)
    } else {
        Err(FitError::NoConvergence(Box::new(report)))
    }
}

/// Deterministic starting point: centers on the largest local maxima
/// (padded with the points farthest from existing centers), widths at half
/// the spacing to the nearest neighbouring center, strengths from heights.
pub fn initial_guess_from_peaks(
    sorted: &[GainSpectrumSample],
    n_terms: usize,
) -> Vec<LorentzianTerm> {
    let span = sorted[sorted.len() - 1].omega - sorted[0].omega;
    let top = sorted.iter().map(|s| s.gain).fold(0.0, f64::max);
    // maxima of a lightly smoothed copy, so measurement noise does not spawn peaks
    let half = (sorted.len() / 200).max(1);
    let smooth: Vec<f64> = (0..sorted.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(sorted.len());
            sorted[lo..hi].iter().map(|s| s.gain).sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let mut peaks: Vec<usize> = (1..sorted.len().saturating_sub(1))
        .filter(|&i| smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1])
        .collect();
    peaks.sort_by(|&a, &b| smooth[b].total_cmp(&smooth[a]).then(a.cmp(&b)));
    let min_gap = span / (4.0 * n_terms as f64);
    let mut centers: Vec<(f64, bool)> = Vec::new();
    for i in peaks {
        if centers.len() == n_terms {
            break;
        }
        let w = sorted[i].omega;
        if centers.iter().all(|c| (c.0 - w).abs() >= min_gap) {
            centers.push((w, true));
        }
    }
    while centers.len() < n_terms {
        let pick = if centers.is_empty() {
            sorted[sorted.len() / 2].omega
        } else {
            let mut best = (f64::NEG_INFINITY, sorted[0].omega);
            for s in sorted.iter().filter(|s| s.gain >= 0.05 * top) {
                let d = centers
                    .iter()
                    .map(|c| (c.0 - s.omega).abs())
                    .fold(f64::INFINITY, f64::min);
                if d > best.0 {
                    best = (d, s.omega);
                }
            }
            best.1
        };
        centers.push((pick, false));
    }
    centers.sort_by(|a, b| a.0.total_cmp(&b.0));
    let floor = (span * 1e-3).max(1e-9);
    (0..n_terms)
        .map(|i| {
            let center = centers[i].0.max(floor);
            let left = if i > 0 {
                center - centers[i - 1].0
            } else {
                f64::INFINITY
            };
            let right = if i + 1 < n_terms {
                centers[i + 1].0 - center
            } else {
                f64::INFINITY
            };
            let spacing = left.min(right);
            let width = if spacing.is_finite() {
                (0.5 * spacing).max(floor)
            } else {
                0.25 * span.max(floor)
            };
            let height = interpolate(sorted, center);
            let peak_factor = (width * width + 4.0 * center * center) / (4.0 * center * center);
            let strength = height * peak_factor * if centers[i].1 { 1.0 } else { 0.5 };
            LorentzianTerm {
                strength,
                center,
                width,
            }
        })
        .collect()
}

fn interpolate(sorted: &[GainSpectrumSample], omega: f64) -> f64 {
    let idx = sorted.partition_point(|s| s.omega < omega);
    if idx == 0 {
        return sorted[0].gain;
    }
    if idx >= sorted.len() {
        return sorted[sorted.len() - 1].gain;
    }
    let (a, b) = (sorted[idx - 1], sorted[idx]);
    if b.omega == a.omega {
        return b.gain;
    }
    a.gain + (b.gain - a.gain) * (omega - a.omega) / (b.omega - a.omega)
}

#[derive(Debug, Error, PartialEq)]
pub enum NormalizeError {
    #[error("Raman fraction {0} leaves no room for the electronic response")]
    NoHeadroom(f64),
    #[error("target Raman fraction must lie in [0, 1], got {0}")]
    Target(f64),
    #[error("model has no Raman response to rescale to fraction {0}")]
    NothingToScale(f64),
}

/// Makes `h̃(0) = 1`.
///
/// With a target, strengths are rescaled so the Raman fraction equals it and
/// the electronic fraction becomes `1 - f_target`. Without one, the Raman
/// terms are kept and the electronic fraction is set to `1 - f`.
pub fn normalize_total_response(
    model: &ResponseModel,
    f_target: Option<f64>,
) -> Result<ResponseModel, NormalizeError> {
    let f = model.raman_fraction();
    match f_target {
        None => {
            if (model.electronic_fraction + f - 1.0).abs() <= 1e-12 {
                return Ok(model.clone());
            }
            if !(0.0..1.0).contains(&f) {
                return Err(NormalizeError::NoHeadroom(f));
            }
            let mut out = model.clone();
            out.electronic_fraction = 1.0 - f;
            Ok(out)
        }
        Some(t) => {
            if !(0.0..=1.0).contains(&t) {
                return Err(NormalizeError::Target(t));
            }
            let scale = if t == 0.0 {
                0.0
            } else if f == 0.0 {
                return Err(NormalizeError::NothingToScale(t));
            } else {
                t / f
            };
            let mut out = model.clone();
            for term in &mut out.lorentzians {
                term.strength *= scale;
            }
            out.electronic_fraction = 1.0 - t;
            Ok(out)
        }
    }
}
