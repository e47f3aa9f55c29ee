//! Kramers-Kronig reconstruction for causal real response functions.
//!
//! For `f(τ)` real and causal, the odd and even parts in time obey
//! `f_even(τ) = sgn(τ) f_odd(τ)`. With `f̃ = ∫e^{iΩτ} f`, the odd part's
//! transform is `i Im f̃` and the even part's is `Re f̃`, so either part of the
//! spectrum determines the other (up to an instantaneous constant).

use num_complex::Complex64;

use crate::grid::Fourier;

/// Sign of the FFT-ordered time index `j` on an `n`-point periodic grid.
fn index_sign(j: usize, n: usize) -> f64 {
    if j == 0 || 2 * j == n {
        0.0
    } else if 2 * j < n {
        1.0
    } else {
        -1.0
    }
}

fn reconstruct(samples: &[f64], domega: f64, from_imag: bool) -> Vec<f64> {
    let n = samples.len();
    assert!(
        n.is_power_of_two(),
        "Kramers-Kronig grid must have 2^k points"
    );
    let dtau = 2.0 * std::f64::consts::PI / (n as f64 * domega);
    let fourier = Fourier::new(n, dtau);
    let mut scratch = fourier.scratch();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&v| {
            if from_imag {
                Complex64::new(0.0, v)
            } else {
                Complex64::new(v, 0.0)
            }
        })
        .collect();
    fourier.inverse(&mut buf, &mut scratch);
    for (j, x) in buf.iter_mut().enumerate() {
        *x *= index_sign(j, n);
    }
    fourier.forward(&mut buf, &mut scratch);
    if from_imag {
        buf.iter().map(|x| x.re).collect()
    } else {
        buf.iter().map(|x| x.im).collect()
    }
}

/// Real part `Re f̃(Ω_k)` implied by `Im f̃(Ω_k)`, excluding any
/// frequency-independent (instantaneous) contribution.
///
/// `imag` is sampled on the FFT-ordered grid `Ω_k = k·domega`, wrapped to
/// negative frequencies above `n/2`; accuracy degrades near the grid edges.
pub fn real_from_imag(imag: &[f64], domega: f64) -> Vec<f64> {
    reconstruct(imag, domega, true)
}

/// Imaginary part implied by the real part; the inverse of [`real_from_imag`].
pub fn imag_from_real(real: &[f64], domega: f64) -> Vec<f64> {
    reconstruct(real, domega, false)
}

/// FFT-ordered frequencies `k·domega` for an `n`-point reconstruction grid.
pub fn grid_frequencies(n: usize, domega: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let s = if 2 * k < n {
                k as f64
            } else {
                k as f64 - n as f64
            };
            s * domega
        })
        .collect()
}
