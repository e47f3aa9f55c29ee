//! Damped Gauss-Newton (Levenberg-Marquardt) core with an analytic Jacobian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{FitReport, GainSpectrumSample, TermDiagnostics};
use crate::model::{LorentzianTerm, ResponseModel};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step lowers the objective by less than this fraction.
    pub relative_tolerance: f64,
    /// Stop when the step is this small relative to the parameter vector.
    pub step_tolerance: f64,
    /// Upper bound for the center of term 0 (the Brillouin term), if constrained.
    pub brillouin_center_max: Option<f64>,
    /// `t₀` recorded in the fitted model.
    pub time_scale: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 20_000,
            relative_tolerance: 1e-12,
            step_tolerance: 1e-13,
            brillouin_center_max: None,
            time_scale: None,
        }
    }
}

struct Param<'a> {
    bound: Option<f64>,
    samples: &'a [GainSpectrumSample],
}

impl Param<'_> {
    fn bounded(&self, term: usize) -> Option<f64> {
        if term == 0 {
            self.bound
        } else {
            None
        }
    }

    fn encode(&self, terms: &[LorentzianTerm]) -> DVector<f64> {
        let mut p = DVector::zeros(3 * terms.len());
        for (j, t) in terms.iter().enumerate() {
            p[3 * j] = t.strength;
            p[3 * j + 1] = match self.bounded(j) {
                Some(b) => {
                    let x = (t.center / b).clamp(1e-6, 1.0 - 1e-6);
                    (x / (1.0 - x)).ln()
                }
                None => t.center.ln(),
            };
            p[3 * j + 2] = t.width.ln();
        }
        p
    }

    /// Terms plus `dΩ_c/da` for each term.
    fn decode(&self, p: &DVector<f64>) -> (Vec<LorentzianTerm>, Vec<f64>) {
        let n = p.len() / 3;
        let mut terms = Vec::with_capacity(n);
        let mut dcenter = Vec::with_capacity(n);
        for j in 0..n {
            let a = p[3 * j + 1];
            let (center, dc) = match self.bounded(j) {
                Some(b) => {
                    let s = 1.0 / (1.0 + (-a).exp());
                    (b * s, b * s * (1.0 - s))
                }
                None => {
                    let c = a.exp();
                    (c, c)
                }
            };
            terms.push(LorentzianTerm {
                strength: p[3 * j],
                center,
                width: p[3 * j + 2].exp(),
            });
            dcenter.push(dc);
        }
        (terms, dcenter)
    }

    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let (terms, _) = self.decode(p);
        DVector::from_iterator(
            self.samples.len(),
            self.samples.iter().map(|s| {
                let h: f64 = terms.iter().map(|t| t.transform(s.omega).im).sum();
                s.weight.sqrt() * (2.0 * h.abs() - s.gain)
            }),
        )
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let (terms, dcenter) = self.decode(p);
        let mut jac = DMatrix::zeros(self.samples.len(), p.len());
        for (row, s) in self.samples.iter().enumerate() {
            let h: f64 = terms.iter().map(|t| t.transform(s.omega).im).sum();
            let sign = if h < 0.0 { -1.0 } else { 1.0 };
            let scale = 2.0 * sign * s.weight.sqrt();
            for (j, t) in terms.iter().enumerate() {
                let sv = Complex64::new(t.width, -s.omega);
                let d = sv * sv + t.center * t.center;
                let d2 = d * d;
                let base = Complex64::new(t.width * t.center, 0.0) / d;
                let d_strength = base;
                let d_width = t.strength * (t.center / d - t.width * t.center * 2.0 * sv / d2);
                let d_center =
                    t.strength * (t.width / d - t.width * t.center * 2.0 * t.center / d2);
                jac[(row, 3 * j)] = scale * d_strength.im;
                jac[(row, 3 * j + 1)] = scale * d_center.im * dcenter[j];
                jac[(row, 3 * j + 2)] = scale * d_width.im * t.width;
            }
        }
        jac
    }
}

fn half_norm_sq(r: &DVector<f64>) -> f64 {
    0.5 * r.norm_squared()
}

pub(super) fn run(
    samples: &[GainSpectrumSample],
    guess: Vec<LorentzianTerm>,
    options: &FitOptions,
) -> FitReport {
    let problem = Param {
        bound: options.brillouin_center_max,
        samples,
    };
    let mut guess = guess;
    if let (Some(b), Some(first)) = (options.brillouin_center_max, guess.first_mut()) {
        if first.center >= b {
            first.center = 0.5 * b;
        }
    }
    let mut p = problem.encode(&guess);
    let mut r = problem.residuals(&p);
    let mut cost = half_norm_sq(&r);
    let data_scale: f64 = samples
        .iter()
        .map(|s| s.weight * s.gain * s.gain)
        .sum::<f64>();
    let floor = 1e-30 * (1.0 + data_scale);
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut converged = cost <= floor;
    let mut iterations = 0;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let jac = problem.jacobian(&p);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        if grad.amax() <= 1e-15 * (1.0 + cost) {
            converged = true;
            break;
        }
        let diag_max = jtj.diagonal().amax().max(1e-300);
        let mut accepted = false;
        while lambda < 1e20 {
            let mut damped = jtj.clone();
            for i in 0..p.len() {
                damped[(i, i)] += lambda * (jtj[(i, i)] + 1e-12 * diag_max);
            }
            let mut step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            // at most a factor e per iteration in centers and widths
            let log_move = (0..p.len())
                .filter(|i| i % 3 != 0)
                .map(|i| step[i].abs())
                .fold(0.0, f64::max);
            if log_move > 1.0 {
                step /= log_move;
            }
            let trial = &p + &step;
            let trial_r = problem.residuals(&trial);
            let trial_cost = half_norm_sq(&trial_r);
            if trial.iter().all(|x| x.is_finite()) && trial_cost.is_finite() && trial_cost < cost {
                let actual = cost - trial_cost;
                let predicted = -grad.dot(&step) - 0.5 * step.dot(&(&jtj * &step));
                let small_step =
                    step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance);
                p = trial;
                r = trial_r;
                cost = trial_cost;
                history.push(cost);
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                let tol = options.relative_tolerance * cost;
                if (actual <= tol && predicted <= tol) || small_step || cost <= floor {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // no downhill step at any damping: a stationary point
            converged = true;
        }
    }

    let (terms, dcenter) = problem.decode(&p);
    let diagnostics = diagnostics(&problem, &p, &terms, &dcenter, cost);
    let f: f64 = terms.iter().map(LorentzianTerm::area).sum();
    let model = ResponseModel {
        lorentzians: terms,
        electronic_fraction: (1.0 - f).clamp(0.0, 1.0),
        time_scale: options.time_scale,
    };
    let wsum: f64 = samples.iter().map(|s| s.weight).sum();
    FitReport {
        model,
        residual_rms: (2.0 * cost / wsum).sqrt(),
        iterations,
        converged,
        terms: diagnostics,
        cost_history: history,
    }
}

fn diagnostics(
    problem: &Param<'_>,
    p: &DVector<f64>,
    terms: &[LorentzianTerm],
    dcenter: &[f64],
    cost: f64,
) -> Vec<TermDiagnostics> {
    let n = problem.samples.len();
    let k = p.len();
    let jac = problem.jacobian(p);
    let jtj = jac.transpose() * &jac;
    let sigma2 = if n > k {
        2.0 * cost / (n - k) as f64
    } else {
        f64::NAN
    };
    let cov =
        symmetric_pseudo_inverse(jtj).unwrap_or_else(|| DMatrix::from_element(k, k, f64::NAN));
    let shares: Vec<f64> = terms
        .iter()
        .map(|t| {
            problem
                .samples
                .iter()
                .map(|s| t.transform(s.omega).im.abs())
                .sum::<f64>()
        })
        .collect();
    let total: f64 = shares.iter().sum();
    terms
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let var = |i: usize| {
                let v = sigma2 * cov[(i, i)];
                if v.is_nan() {
                    f64::NAN
                } else {
                    v.max(0.0).sqrt()
                }
            };
            TermDiagnostics {
                strength_se: var(3 * j),
                center_se: var(3 * j + 1) * dcenter[j],
                width_se: var(3 * j + 2) * t.width,
                weight_share: if total > 0.0 { shares[j] / total } else { 0.0 },
            }
        })
        .collect()
}

/// Pseudo-inverse of a symmetric PSD matrix through its eigendecomposition;
/// `None` if the decomposition fails to converge or the input is not finite.
fn symmetric_pseudo_inverse(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let eig = SymmetricEigen::try_new(m, 1e-15, 10_000)?;
    let top = eig.eigenvalues.amax();
    let cut = 1e-14 * top.max(1e-300);
    let inv = eig.eigenvalues.map(|l| if l > cut { 1.0 / l } else { 0.0 });
    Some(&eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let samples: Vec<_> = (1..40)
            .map(|i| GainSpectrumSample {
                omega: 0.4 * i as f64,
                gain: 0.1,
                weight: 1.0 + 0.01 * i as f64,
            })
            .collect();
        for bound in [None, Some(3.0)] {
            let problem = Param {
                bound,
                samples: &samples,
            };
            let terms = vec![
                LorentzianTerm::new(0.3, 2.0, 0.7).unwrap(),
                LorentzianTerm::new(-0.1, 7.0, 1.5).unwrap(),
            ];
            let p = problem.encode(&terms);
            let jac = problem.jacobian(&p);
            for c in 0..p.len() {
                let h = 1e-6;
                let mut up = p.clone();
                up[c] += h;
                let mut dn = p.clone();
                dn[c] -= h;
                let fd = (problem.residuals(&up) - problem.residuals(&dn)) / (2.0 * h);
                for row in 0..samples.len() {
                    assert!(
                        (fd[row] - jac[(row, c)]).abs() < 1e-7 * (1.0 + fd[row].abs()),
                        "col {c} row {row}: fd {} vs {}",
                        fd[row],
                        jac[(row, c)]
                    );
                }
            }
        }
    }
}
