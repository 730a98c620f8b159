//! Small dense helpers shared by the operator modules.

use nalgebra::DMatrix;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Largest operator side handled densely.
pub const MAX_DENSE_DIM: usize = 4096;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `max |A - A*|` over entries.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| C64::new(v, 0.0))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// `x · A y` with real `A` and real vectors.
pub fn quad_form(a: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * a[(i, j)] * y[j];
        }
    }
    acc
}

/// Bilinear (not sesquilinear) `x · A y` over the complex numbers.
pub fn cquad_form(a: &CMatrix, x: &[C64], y: &[C64]) -> C64 {
    let n = x.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * a[(i, j)] * y[j];
        }
    }
    acc
}
