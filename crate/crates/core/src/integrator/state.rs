use num_complex::Complex64;

use crate::grid::Representation;

/// Field samples on the τ grid at propagation distance `zeta`.
///
/// Wigner runs carry only `phi`; positive-P runs carry the independent
/// partner `phi_plus`, which starts as `conj(phi)` and drifts away from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub phi: Vec<Complex64>,
    pub phi_plus: Option<Vec<Complex64>>,
    pub zeta: f64,
}

impl FieldState {
    pub fn wigner(phi: Vec<Complex64>) -> Self {
        FieldState {
            phi,
            phi_plus: None,
            zeta: 0.0,
        }
    }

    /// Coherent positive-P state: `φ⁺ = φ*`.
    pub fn positive_p(phi: Vec<Complex64>) -> Self {
        let plus = phi.iter().map(|z| z.conj()).collect();
        FieldState {
            phi,
            phi_plus: Some(plus),
            zeta: 0.0,
        }
    }

    pub fn representation(&self) -> Representation {
        if self.phi_plus.is_some() {
            Representation::PositiveP
        } else {
            Representation::Wigner
        }
    }

    pub fn modes(&self) -> usize {
        self.phi.len()
    }

    /// Complex intensity `φ⁺φ` (positive-P) or `|φ|²` (Wigner) at each τ.
    pub fn intensity(&self) -> Vec<Complex64> {
        match &self.phi_plus {
            Some(plus) => plus.iter().zip(&self.phi).map(|(p, f)| p * f).collect(),
            None => self
                .phi
                .iter()
                .map(|f| Complex64::new(f.norm_sqr(), 0.0))
                .collect(),
        }
    }

    /// `Σ_j I_j Δτ` using the representation's intensity.
    pub fn energy(&self, dtau: f64) -> Complex64 {
        self.intensity().iter().sum::<Complex64>() * dtau
    }

    /// Largest `|φ⁺φ|` (or `|φ|²`), the divergence monitor for positive-P.
    pub fn max_intensity(&self) -> f64 {
        self.intensity()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}
