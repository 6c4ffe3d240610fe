//! Extreme eigenvalues of symmetric-definite banded pencils `K x = λ M x`.

use crate::band::SymBand;
use crate::error::{Error, Result};

/// Converged smallest eigenpair with the iteration count.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Smallest eigenpair by inverse iteration with Rayleigh-quotient monitoring.
/// Stops at relative change `rel_tol` or when the quotient stops decreasing.
/// `k` must be positive definite; `m` positive definite.
pub fn smallest_eigenpair(
    k: &SymBand,
    m: &SymBand,
    start: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Eigenpair> {
    let chol = k.cholesky()?;
    let mut u = start.to_vec();
    let mut lambda = f64::INFINITY;
    for it in 1..=max_iter {
        let mu = m.mul_vec(&u);
        let mut w = chol.solve(&mu);
        let norm = m.bilinear(&w, &w).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Eigen(
                "inverse iteration produced a null vector".into(),
            ));
        }
        w.iter_mut().for_each(|v| *v /= norm);
        let next = k.bilinear(&w, &w);
        u = w;
        // In exact arithmetic the quotient decreases monotonically; once it
        // stops doing so the iteration is at the roundoff floor.
        let stalled = it > 2 && next >= lambda;
        if (next - lambda).abs() <= rel_tol * next.abs() || stalled {
            if !(next > 0.0) {
                return Err(Error::Eigen(format!(
                    "non-positive smallest eigenvalue {next}; assembly is broken"
                )));
            }
            return Ok(Eigenpair {
                value: next,
                vector: u,
                iterations: it,
            });
        }
        lambda = next;
    }
    Err(Error::Eigen(format!(
        "inverse iteration did not converge in {max_iter} iterations (last λ = {lambda})"
    )))
}

/// Rough estimate of the largest eigenvalue by power iteration on `M⁻¹K`.
/// Always a lower bound of the true value.
pub fn largest_eigenvalue_estimate(k: &SymBand, m: &SymBand, iters: usize) -> Result<f64> {
    let chol = m.cholesky()?;
    let n = k.dim();
    // alternating start excites the high end of the spectrum
    let mut u: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let ku = k.mul_vec(&u);
        let mut w = chol.solve(&ku);
        let norm = m.bilinear(&w, &w).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        w.iter_mut().for_each(|v| *v /= norm);
        lambda = k.bilinear(&w, &w);
        u = w;
    }
    Ok(lambda)
}
