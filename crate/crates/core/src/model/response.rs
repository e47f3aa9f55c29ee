use num_complex::Complex64;

use super::ModelError;

/// One damped-oscillator term `Θ(τ) F Δ e^{-Δτ} sin(Ω_c τ)` of the Raman response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianTerm {
    /// `F`, dimensionless; negative values are allowed.
    pub strength: f64,
    /// `Ω_c = ω_c t₀ ≥ 0`.
    pub center: f64,
    /// `Δ = δ t₀ > 0`.
    pub width: f64,
}

impl LorentzianTerm {
    pub fn new(strength: f64, center: f64, width: f64) -> Result<Self, ModelError> {
        let term = LorentzianTerm {
            strength,
            center,
            width,
        };
        term.validate()?;
        Ok(term)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.strength.is_finite() {
            return Err(ModelError::Strength(self.strength));
        }
        if !(self.center.is_finite() && self.center >= 0.0) {
            return Err(ModelError::Center(self.center));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(ModelError::Width(self.width));
        }
        Ok(())
    }

    pub fn response(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.strength * self.width * (-self.width * tau).exp() * (self.center * tau).sin()
    }

    /// `∫₀^∞ e^{iΩτ} F Δ e^{-Δτ} sin(Ω_c τ) dτ = F Δ Ω_c / ((Δ - iΩ)² + Ω_c²)`.
    pub fn transform(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(self.width, -omega);
        let denom = s * s + self.center * self.center;
        Complex64::new(self.strength * self.width * self.center, 0.0) / denom
    }

    /// Time integral of the term, `F Δ Ω_c / (Δ² + Ω_c²)`.
    pub fn area(&self) -> f64 {
        self.strength * self.width * self.center
            / (self.width * self.width + self.center * self.center)
    }
}

/// Total nonlinear response `h(τ) = (1 - f) δ(τ) + h^R(τ)`.
///
/// Index 0 of `lorentzians` is the Brillouin/acoustic term when one is
/// present. `time_scale` records the `t₀` (seconds) the dimensionless
/// centers and widths refer to, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseModel {
    pub lorentzians: Vec<LorentzianTerm>,
    pub electronic_fraction: f64,
    pub time_scale: Option<f64>,
}

impl ResponseModel {
    pub fn new(
        lorentzians: Vec<LorentzianTerm>,
        electronic_fraction: f64,
    ) -> Result<Self, ModelError> {
        let model = ResponseModel {
            lorentzians,
            electronic_fraction,
            time_scale: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Instantaneous Kerr response, `h = δ`.
    pub fn electronic_only() -> Self {
        ResponseModel {
            lorentzians: Vec::new(),
            electronic_fraction: 1.0,
            time_scale: None,
        }
    }

    pub fn with_time_scale(mut self, t0: f64) -> Self {
        self.time_scale = Some(t0);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for term in &self.lorentzians {
            term.validate()?;
        }
        if !(self.electronic_fraction.is_finite()
            && (0.0..=1.0).contains(&self.electronic_fraction))
        {
            return Err(ModelError::ElectronicFraction(self.electronic_fraction));
        }
        Ok(())
    }

    /// `h^R(τ)`; exactly zero for `τ ≤ 0`.
    pub fn raman_response(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.lorentzians.iter().map(|t| t.response(tau)).sum()
    }

    pub fn raman_spectrum(&self, omega: f64) -> Complex64 {
        self.lorentzians.iter().map(|t| t.transform(omega)).sum()
    }

    /// `h̃(Ω) = h'(Ω) + i h''(Ω)`, electronic constant included.
    pub fn response_spectrum(&self, omega: f64) -> Complex64 {
        self.raman_spectrum(omega) + self.electronic_fraction
    }

    /// Dimensionless Raman gain `α^R(Ω) = 2|h''(Ω)|`.
    pub fn raman_gain(&self, omega: f64) -> f64 {
        2.0 * self.raman_spectrum(omega).im.abs()
    }

    /// `f = ∫₀^∞ h^R(τ) dτ`.
    pub fn raman_fraction(&self) -> f64 {
        self.lorentzians.iter().map(LorentzianTerm::area).sum()
    }

    /// Re-expresses the model for a new normalization time `t₀'`: the
    /// dimensionless frequencies scale by `t₀'/t₀`, strengths are unchanged.
    pub fn rescaled_time(&self, new_t0: f64) -> Option<Self> {
        let old = self.time_scale?;
        let ratio = new_t0 / old;
        Some(ResponseModel {
            lorentzians: self
                .lorentzians
                .iter()
                .map(|t| LorentzianTerm {
                    strength: t.strength,
                    center: t.center * ratio,
                    width: t.width * ratio,
                })
                .collect(),
            electronic_fraction: self.electronic_fraction,
            time_scale: Some(new_t0),
        })
    }
}
