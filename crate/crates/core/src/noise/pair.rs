//! Gaussian factors for the positive-P Raman noise of a `±Ω` mode pair.
//!
//! The targets fix only the pseudo-covariance `Q = E[z zᵀ]` of the complex
//! vector `z = (u_k, u_-k, v_k, v_-k)`. Any Hermitian `P = E[z z†]` that makes
//! the real covariance of `(Re z, Im z)` positive semidefinite is admissible;
//! `P = (Q Q†)^{1/2}` is the smallest such choice and always works for a
//! symmetric `Q`. The resulting real covariance is factored by
//! eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::NoiseError;

/// Relative tolerance below which negative eigenvalues count as roundoff.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 10_000;

/// Real factor `L` with `L Lᵀ = C` for the stacked `(Re z, Im z)` vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFactor {
    /// Complex dimension: 4 for a `±Ω` pair, 2 for a self-mirrored bin.
    pub dim: usize,
    pub factor: DMatrix<f64>,
}

impl PairFactor {
    /// Covariance rebuilt from the factor.
    pub fn covariance(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }

    /// `E[z zᵀ]` implied by the factor.
    pub fn pseudo_covariance(&self) -> DMatrix<Complex64> {
        let c = self.covariance();
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(c[(i, j)] - c[(n + i, n + j)], c[(i, n + j)] + c[(n + i, j)])
        })
    }

    /// `z = (L ξ)_re + i (L ξ)_im` for a standard normal `ξ`.
    pub fn apply(&self, xi: &[f64], out: &mut [Complex64]) {
        let n = self.dim;
        let x = &self.factor * DVector::from_column_slice(xi);
        for i in 0..n {
            out[i] = Complex64::new(x[i], x[n + i]);
        }
    }
}

fn all_finite(q: &DMatrix<Complex64>) -> bool {
    q.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Factor for pseudo-covariance `q`; `mode` and `omega` label errors.
pub fn factor_pair(
    q: &DMatrix<Complex64>,
    mode: usize,
    omega: f64,
) -> Result<PairFactor, NoiseError> {
    let fail = |eigenvalue: f64| NoiseError::NonPositiveCovariance {
        mode,
        omega,
        eigenvalue,
    };
    if !all_finite(q) {
        return Err(fail(f64::NAN));
    }
    let n = q.nrows();
    let qq = q * q.adjoint();
    let eig = SymmetricEigen::try_new(qq, 1e-15, MAX_SWEEPS).ok_or_else(|| fail(f64::NAN))?;
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let p = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint();

    let mut c = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (pij, qij) = (p[(i, j)], q[(i, j)]);
            c[(i, j)] = 0.5 * (pij.re + qij.re);
            c[(n + i, n + j)] = 0.5 * (pij.re - qij.re);
            c[(i, n + j)] = 0.5 * (qij.im - pij.im);
            c[(n + i, j)] = 0.5 * (qij.im + pij.im);
        }
    }
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::try_new(c, 1e-15, MAX_SWEEPS).ok_or_else(|| fail(f64::NAN))?;
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let lowest = eig.eigenvalues.min();
    if lowest < -EIGEN_TOLERANCE * top {
        return Err(fail(lowest));
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(PairFactor {
        dim: n,
        factor: eig.eigenvectors * DMatrix::from_diagonal(&roots),
    })
}
