use num_complex::Complex64;

use super::ModelError;

/// Real function of `Ω`: either flat, or a sample table interpolated
/// linearly and held constant beyond its ends.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledCurve {
    Flat(f64),
    Table(Vec<(f64, f64)>),
}

impl Default for SampledCurve {
    fn default() -> Self {
        SampledCurve::Flat(0.0)
    }
}

impl SampledCurve {
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty()
            || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite())
            || points.windows(2).any(|w| w[1].0 <= w[0].0)
        {
            return Err(ModelError::CurveSamples);
        }
        Ok(SampledCurve::Table(points))
    }

    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            SampledCurve::Flat(v) => *v,
            SampledCurve::Table(pts) => {
                let first = pts[0];
                let last = pts[pts.len() - 1];
                if omega <= first.0 {
                    return first.1;
                }
                if omega >= last.0 {
                    return last.1;
                }
                let idx = pts.partition_point(|p| p.0 <= omega);
                let (x0, y0) = pts[idx - 1];
                let (x1, y1) = pts[idx];
                y0 + (y1 - y0) * (omega - x0) / (x1 - x0)
            }
        }
    }

    fn min_value(&self) -> (f64, f64) {
        match self {
            SampledCurve::Flat(v) => (0.0, *v),
            // piecewise linear: the minimum is at a node
            SampledCurve::Table(pts) => {
                pts.iter().copied().fold(
                    (0.0, f64::INFINITY),
                    |acc, p| if p.1 < acc.1 { p } else { acc },
                )
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SampledCurve::Flat(v) => *v == 0.0,
            SampledCurve::Table(pts) => pts.iter().all(|p| p.1 == 0.0),
        }
    }
}

/// Linear gain and loss: `2 Re g̃(Ω) = α^A(Ω) - α^G(Ω)`,
/// `Im g̃(Ω) = g'(Ω) + detuning_offset`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GainLossProfile {
    pub gain: SampledCurve,
    pub loss: SampledCurve,
    pub dispersive: SampledCurve,
    /// Spatially uniform refractive-index detuning, dimensionless.
    pub detuning_offset: f64,
}

impl GainLossProfile {
    pub fn new(
        gain: SampledCurve,
        loss: SampledCurve,
        dispersive: SampledCurve,
        detuning_offset: f64,
    ) -> Result<Self, ModelError> {
        let p = GainLossProfile {
            gain,
            loss,
            dispersive,
            detuning_offset,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn transparent() -> Self {
        Self::default()
    }

    pub fn flat(gain: f64, loss: f64) -> Result<Self, ModelError> {
        Self::new(
            SampledCurve::Flat(gain),
            SampledCurve::Flat(loss),
            SampledCurve::Flat(0.0),
            0.0,
        )
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, curve) in [("gain", &self.gain), ("loss", &self.loss)] {
            let (omega, value) = curve.min_value();
            if !(value >= 0.0) {
                return Err(ModelError::NegativeCurve {
                    curve: name,
                    omega,
                    value,
                });
            }
        }
        let (_, d) = self.dispersive.min_value();
        if !d.is_finite() || !self.detuning_offset.is_finite() {
            return Err(ModelError::CurveSamples);
        }
        Ok(())
    }

    pub fn gain_at(&self, omega: f64) -> f64 {
        self.gain.eval(omega)
    }

    pub fn loss_at(&self, omega: f64) -> f64 {
        self.loss.eval(omega)
    }

    /// `g̃(Ω)`.
    pub fn linear_response_spectrum(&self, omega: f64) -> Complex64 {
        Complex64::new(
            0.5 * (self.loss.eval(omega) - self.gain.eval(omega)),
            self.dispersive.eval(omega) + self.detuning_offset,
        )
    }

    /// Adds flat intensity gain and loss rates to both curves.
    pub fn with_flat_offsets(&self, gain: f64, loss: f64) -> Result<Self, ModelError> {
        let shift = |c: &SampledCurve, by: f64| match c {
            SampledCurve::Flat(v) => SampledCurve::Flat(v + by),
            SampledCurve::Table(pts) => {
                SampledCurve::Table(pts.iter().map(|&(x, y)| (x, y + by)).collect())
            }
        };
        Self::new(
            shift(&self.gain, gain),
            shift(&self.loss, loss),
            self.dispersive.clone(),
            self.detuning_offset,
        )
    }
}
