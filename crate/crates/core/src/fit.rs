//! Least-squares fits used by the asymptotic experiments.
//!
//! Expansions in `1/k` are fitted as polynomials in `u = 1/k`. The design
//! matrix is built in the rescaled variable `u / u_max` and the coefficients
//! are mapped back afterwards, which keeps the Vandermonde system reasonably
//! conditioned for the level ranges used here.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Coefficient of `k^{-l}` at index `l`.
    pub coefficients: Vec<C64>,
    /// Ratio of extreme singular values of the rescaled design matrix.
    pub condition: f64,
    /// Largest absolute residual over the samples.
    pub max_residual: f64,
}

/// Fits `values[i] ≈ Σ_l c_l k_i^{-l}` for `l = 0..=degree`.
pub fn fit_inverse_powers(k_values: &[f64], values: &[C64], degree: usize) -> Result<PolyFit> {
    if k_values.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: k_values.len(),
            got: values.len(),
        });
    }
    if k_values.len() < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "a degree-{degree} fit needs at least {} samples, got {}",
            degree + 1,
            k_values.len()
        )));
    }
    if k_values.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    let u_max = k_values.iter().map(|k| 1.0 / k).fold(0.0, f64::max);
    let rows = k_values.len();
    let design = DMatrix::from_fn(rows, degree + 1, |i, l| {
        (1.0 / k_values[i] / u_max).powi(l as i32)
    });
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };

    let re = DVector::from_iterator(rows, values.iter().map(|v| v.re));
    let im = DVector::from_iterator(rows, values.iter().map(|v| v.im));
    let eps = 1e-14 * smax;
    let sol_re = svd
        .solve(&re, eps)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
    let sol_im = svd
        .solve(&im, eps)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;

    let coefficients: Vec<C64> = (0..=degree)
        .map(|l| C64::new(sol_re[l], sol_im[l]) / u_max.powi(l as i32))
        .collect();
    let max_residual = k_values
        .iter()
        .zip(values)
        .map(|(&k, v)| {
            let model: C64 = coefficients
                .iter()
                .enumerate()
                .map(|(l, c)| c * k.powi(-(l as i32)))
                .sum();
            (model - v).norm()
        })
        .fold(0.0, f64::max);
    Ok(PolyFit {
        coefficients,
        condition,
        max_residual,
    })
}

/// Convergence order `p` from a least-squares fit of `log e ≈ c - p log k`.
///
/// Returns `None` when fewer than two positive errors are available.
pub fn log_log_order(k_values: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = k_values
        .iter()
        .zip(errors)
        .filter(|(k, e)| **k > 0.0 && **e > 0.0)
        .map(|(k, e)| (k.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}
