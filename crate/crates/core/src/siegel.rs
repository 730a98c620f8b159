//! Points of the Siegel upper half space and the Kähler geometry they induce.
//!
//! A point `Z = X + iY` (symmetric, `Y > 0`) gives complex coordinates
//! `z = x + Zy` on the torus and the complex structure
//!
//! ```text
//! I(Z) = [[-Y⁻¹X, -(Y + XY⁻¹X)],
//!         [  Y⁻¹,       XY⁻¹    ]]
//! ```
//!
//! in the `(∂x, ∂y)` frame. Derivatives in `Z` use the Wirtinger convention
//! `∂/∂Z = ½(∂/∂X - i∂/∂Y)`, and for `i ≠ j` the entries `Z_ij`, `Z_ji` move
//! together (the perturbation is `Δ_ij`, with ones at `(i,j)` and `(j,i)`).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::fourier::FourierMode;
use crate::linalg::{max_abs_real, quad_form, CMatrix};
use crate::{Error, Result, C64};

const SYMMETRY_TOL: f64 = 1e-12;
const NORMALITY_TOL: f64 = 1e-10;

/// `Z = X + iY` with `Z = Zᵀ` and `Y` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    z: CMatrix,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    det_y: f64,
    lambda_min: f64,
    is_normal: bool,
}

impl SiegelPoint {
    pub fn new(z: CMatrix) -> Result<Self> {
        if !z.is_square() || z.nrows() == 0 {
            return Err(Error::InvalidPoint(format!(
                "Z must be a non-empty square matrix, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidPoint("Z has non-finite entries".into()));
        }
        let asym = z
            .iter()
            .zip(z.transpose().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if asym >= SYMMETRY_TOL {
            return Err(Error::InvalidPoint(format!(
                "Z is not symmetric (defect {asym:e})"
            )));
        }
        let x = z.map(|v| v.re);
        let y = z.map(|v| v.im);
        let chol = Cholesky::new(y.clone()).ok_or_else(|| {
            Error::InvalidPoint("imaginary part Y is not positive definite".into())
        })?;
        let y_inv = chol.inverse();
        let det_y = chol.determinant();
        let lambda_min = SymmetricEigen::new(y.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let is_normal = max_abs_real(&(&x * &y - &y * &x)) < NORMALITY_TOL;
        Ok(Self {
            z,
            x,
            y,
            y_inv,
            det_y,
            lambda_min,
            is_normal,
        })
    }

    /// One-dimensional point `Z = z`.
    pub fn scalar(z: C64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, z))
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            entries,
        )))
    }

    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    pub fn re(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn im_inv(&self) -> &DMatrix<f64> {
        &self.y_inv
    }

    pub fn det_im(&self) -> f64 {
        self.det_y
    }

    /// Smallest eigenvalue of `Y`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// `[X, Y] = 0` within `1e-10`; always true for `n = 1`.
    pub fn is_normal(&self) -> bool {
        self.is_normal
    }

    /// `Z + t Δ_ij`.
    pub fn perturbed(&self, i: usize, j: usize, t: C64) -> Result<Self> {
        let mut z = self.z.clone();
        z[(i, j)] += t;
        if i != j {
            z[(j, i)] += t;
        }
        Self::new(z)
    }

    /// Real coordinates `y = Y⁻¹ Im z` of a complex point `z = x + Zy`.
    pub fn y_coordinates(&self, z: &[C64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.y_inv[(i, j)] * z[j].im).sum())
            .collect()
    }

    /// The complex point `x + Zy`.
    pub fn complex_point(&self, x: &[f64], y: &[f64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| C64::new(x[i], 0.0) + (0..n).map(|j| self.z[(i, j)] * y[j]).sum::<C64>())
            .collect()
    }

    /// `I(Z)` in the `(∂x, ∂y)` frame.
    pub fn complex_structure(&self) -> DMatrix<f64> {
        let n = self.dim();
        let yi = &self.y_inv;
        let tl = -(&self.x * yi);
        let tr = -(&self.y + &self.x * yi * &self.x);
        let br = yi * &self.x;
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&tl);
        out.view_mut((0, n), (n, n)).copy_from(&tr);
        out.view_mut((n, 0), (n, n)).copy_from(yi);
        out.view_mut((n, n), (n, n)).copy_from(&br);
        out
    }

    /// Matrix of `ω = Σ dx_i ∧ dy_i` in the `(∂x, ∂y)` frame.
    pub fn symplectic_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        j
    }

    /// `g = 2π ω(·, I·)`.
    pub fn metric(&self) -> DMatrix<f64> {
        self.symplectic_matrix() * self.complex_structure() * (2.0 * PI)
    }

    /// `∂I(Z)/∂Z_ij` (holomorphic) or `∂I(Z)/∂Z̄_ij` (antiholomorphic).
    ///
    /// The closed form is only valid when `Z` is normal and commutes with
    /// `Δ_ij`; other points are refused.
    pub fn d_complex_structure(&self, v: TangentDirection) -> Result<CMatrix> {
        let n = self.dim();
        v.check_dim(n)?;
        let delta = v.delta_matrix(n);
        if !self.is_normal {
            return Err(Error::UnsupportedPoint(
                "closed-form dI/dZ requires [X, Y] = 0".into(),
            ));
        }
        let commutator = &self.z * &delta - &delta * &self.z;
        if commutator.iter().any(|c| c.norm() >= NORMALITY_TOL) {
            return Err(Error::UnsupportedPoint(format!(
                "closed-form dI/dZ requires Z to commute with Δ_{}{}",
                v.i + 1,
                v.j + 1
            )));
        }
        let yi = crate::linalg::to_complex(&self.y_inv);
        let m = &yi * &delta * &yi;
        let (w, sign) = match v.kind {
            DirectionKind::Holomorphic => (self.z.map(|c| c.conj()), 1.0),
            DirectionKind::Antiholomorphic => (self.z.clone(), -1.0),
        };
        let one = C64::new(1.0, 0.0);
        let tl = &m * &w;
        let tr = &m * &w * &w;
        let bl = -&m;
        let br = -(&m * &w);
        let mut out = CMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&tl);
        out.view_mut((0, n), (n, n)).copy_from(&tr);
        out.view_mut((n, 0), (n, n)).copy_from(&bl);
        out.view_mut((n, n), (n, n)).copy_from(&br);
        let factor = one / C64::new(0.0, 2.0) * sign;
        Ok(out * factor)
    }

    /// Columns are `∂/∂z_a` expressed in the `(∂x, ∂y)` frame.
    ///
    /// From `y = Y⁻¹(z - z̄)/2i` and `x = z - Zy`.
    pub fn holomorphic_frame(&self) -> CMatrix {
        let n = self.dim();
        let yi = crate::linalg::to_complex(&self.y_inv);
        let inv2i = C64::new(1.0, 0.0) / C64::new(0.0, 2.0);
        let top = CMatrix::identity(n, n) - &self.z * &yi * inv2i;
        let bottom = &yi * inv2i;
        let mut p = CMatrix::zeros(2 * n, n);
        p.view_mut((0, 0), (n, n)).copy_from(&top);
        p.view_mut((n, 0), (n, n)).copy_from(&bottom);
        p
    }

    /// `[∂z_1 … ∂z_n, ∂z̄_1 … ∂z̄_n]` in the real frame.
    pub fn complex_frame(&self) -> CMatrix {
        let n = self.dim();
        let p = self.holomorphic_frame();
        let mut c = CMatrix::zeros(2 * n, 2 * n);
        c.view_mut((0, 0), (2 * n, n)).copy_from(&p);
        c.view_mut((0, n), (2 * n, n))
            .copy_from(&p.map(|v| v.conj()));
        c
    }

    /// `ω = -(1/2i) Σ w_kl dz_k ∧ dz̄_l` with `W = Y⁻¹`, as a matrix on the
    /// complex frame.
    pub fn symplectic_form_complex(&self) -> CMatrix {
        let n = self.dim();
        let c = C64::new(1.0, 0.0) / C64::new(0.0, 2.0);
        let mut om = CMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            for l in 0..n {
                let w = self.y_inv[(k, l)];
                om[(k, n + l)] = -c * w;
                om[(n + l, k)] = c * w;
            }
        }
        om
    }

    /// Eigenvalue of `Δ_{I(Z)}` on `F_{r,s}`:
    /// `λ = -2π((s - Xr)·Y⁻¹(s - Xr) + r·Yr)`.
    pub fn laplace_eigenvalue(&self, m: &FourierMode) -> f64 {
        assert_eq!(m.dim(), self.dim(), "mode dimension mismatch");
        let r = m.r_f64();
        let b = self.shifted_s(m);
        -2.0 * PI * (quad_form(&self.y_inv, &b, &b) + quad_form(&self.y, &r, &r))
    }

    /// `s - Xr`.
    fn shifted_s(&self, m: &FourierMode) -> Vec<f64> {
        let n = self.dim();
        let r = m.r_f64();
        (0..n)
            .map(|i| m.s()[i] as f64 - (0..n).map(|j| self.x[(i, j)] * r[j]).sum::<f64>())
            .collect()
    }

    /// Analytic Wirtinger derivative of [`laplace_eigenvalue`](Self::laplace_eigenvalue)
    /// along `v`.
    pub fn laplace_eigenvalue_derivative(
        &self,
        m: &FourierMode,
        v: TangentDirection,
    ) -> Result<C64> {
        let n = self.dim();
        v.check_dim(n)?;
        let delta = v.delta_matrix_real(n);
        let r = m.r_f64();
        let b = self.shifted_s(m);
        let dr: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| delta[(i, j)] * r[j]).sum())
            .collect();
        // d/dX: b -> b - Δr.
        let d_x = 4.0 * PI * quad_form(&self.y_inv, &dr, &b);
        // d/dY: Y⁻¹ -> -Y⁻¹ΔY⁻¹, Y -> Δ.
        let yd = &self.y_inv * &delta * &self.y_inv;
        let d_y = 2.0 * PI * quad_form(&yd, &b, &b) - 2.0 * PI * quad_form(&delta, &r, &r);
        Ok(match v.kind {
            DirectionKind::Holomorphic => C64::new(d_x, -d_y) * 0.5,
            DirectionKind::Antiholomorphic => C64::new(d_x, d_y) * 0.5,
        })
    }

    /// `c_a` with `∂z_a F_{r,s} = c_a F_{r,s}` (or `∂z̄_a` for the
    /// antiholomorphic kind).
    pub fn frame_derivative_factors(&self, m: &FourierMode, kind: DirectionKind) -> Vec<C64> {
        let n = self.dim();
        let mut p = self.holomorphic_frame();
        if kind == DirectionKind::Antiholomorphic {
            p = p.map(|v| v.conj());
        }
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        (0..n)
            .map(|a| {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..n {
                    acc += p[(b, a)] * m.r()[b] as f64 + p[(n + b, a)] * m.s()[b] as f64;
                }
                two_pi_i * acc
            })
            .collect()
    }
}

impl fmt::Display for SiegelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_c = |c: &C64| {
            if c.im >= 0.0 {
                format!("{}+{}i", c.re, c.im)
            } else {
                format!("{}-{}i", c.re, -c.im)
            }
        };
        if self.dim() == 1 {
            return write!(f, "{}", fmt_c(&self.z[(0, 0)]));
        }
        let rows: Vec<String> = (0..self.dim())
            .map(|i| {
                let cols: Vec<String> = (0..self.dim()).map(|j| fmt_c(&self.z[(i, j)])).collect();
                format!("[{}]", cols.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionKind {
    /// `∂/∂Z_ij`
    Holomorphic,
    /// `∂/∂Z̄_ij`
    Antiholomorphic,
}

/// A coordinate direction on the Siegel space. Indices are zero-based and
/// stored with `i ≤ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TangentDirection {
    pub i: usize,
    pub j: usize,
    pub kind: DirectionKind,
}

impl TangentDirection {
    pub fn new(i: usize, j: usize, kind: DirectionKind) -> Self {
        Self {
            i: i.min(j),
            j: i.max(j),
            kind,
        }
    }

    pub fn holomorphic(i: usize, j: usize) -> Self {
        Self::new(i, j, DirectionKind::Holomorphic)
    }

    pub fn antiholomorphic(i: usize, j: usize) -> Self {
        Self::new(i, j, DirectionKind::Antiholomorphic)
    }

    /// Every direction for dimension `n`, holomorphic ones first.
    pub fn all(n: usize) -> Vec<TangentDirection> {
        let mut out = Vec::new();
        for kind in [DirectionKind::Holomorphic, DirectionKind::Antiholomorphic] {
            for i in 0..n {
                for j in i..n {
                    out.push(Self::new(i, j, kind));
                }
            }
        }
        out
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.j >= n {
            return Err(Error::InvalidArgument(format!(
                "direction ({}, {}) out of range for n = {n}",
                self.i + 1,
                self.j + 1
            )));
        }
        Ok(())
    }

    pub fn delta_matrix_real(&self, n: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(n, n);
        d[(self.i, self.j)] = 1.0;
        d[(self.j, self.i)] = 1.0;
        d
    }

    pub fn delta_matrix(&self, n: usize) -> CMatrix {
        crate::linalg::to_complex(&self.delta_matrix_real(n))
    }
}

impl fmt::Display for TangentDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar = match self.kind {
            DirectionKind::Holomorphic => "",
            DirectionKind::Antiholomorphic => "bar",
        };
        write!(f, "dZ{}{}{}", bar, self.i + 1, self.j + 1)
    }
}

/// Constant symmetric bivector `G̃(V)` on the complex frame of the torus.
///
/// `coefficients` is `n×n`; the entry `(a, b)` multiplies `∂z_a ⊗ ∂z_b`
/// (holomorphic kind) or `∂z̄_a ⊗ ∂z̄_b` (antiholomorphic kind).
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    pub kind: DirectionKind,
    pub coefficients: CMatrix,
}

/// `G̃(∂/∂Z_ij) = 2i(∂z_i ⊗ ∂z_j + ∂z_j ⊗ ∂z_i)`, or `2i ∂z_i ⊗ ∂z_i` on the
/// diagonal. The antiholomorphic direction gets the complex conjugate,
/// `-2i` on `∂z̄ ⊗ ∂z̄`. Independent of the base point.
pub fn gtilde_coefficients(n: usize, v: TangentDirection) -> Bivector {
    let c = match v.kind {
        DirectionKind::Holomorphic => C64::new(0.0, 2.0),
        DirectionKind::Antiholomorphic => C64::new(0.0, -2.0),
    };
    let mut coefficients = CMatrix::zeros(n, n);
    coefficients[(v.i, v.j)] = c;
    coefficients[(v.j, v.i)] = c;
    Bivector {
        kind: v.kind,
        coefficients,
    }
}

impl Bivector {
    /// The bivector as a `2n×2n` matrix on the complex frame.
    pub fn on_complex_frame(&self) -> CMatrix {
        let n = self.coefficients.nrows();
        let mut g = CMatrix::zeros(2 * n, 2 * n);
        let offset = match self.kind {
            DirectionKind::Holomorphic => 0,
            DirectionKind::Antiholomorphic => n,
        };
        g.view_mut((offset, offset), (n, n))
            .copy_from(&self.coefficients);
        g
    }

    /// `G̃ · ω`, an endomorphism on the complex frame.
    pub fn contract_symplectic(&self, p: &SiegelPoint) -> CMatrix {
        self.on_complex_frame() * p.symplectic_form_complex()
    }

    /// Eigenvalue `μ` of `Δ_G̃ = Σ G̃^{ab} ∂_a ∂_b` on `F_m` at `p`.
    pub fn laplacian_eigenvalue(&self, p: &SiegelPoint, m: &FourierMode) -> C64 {
        let d = p.frame_derivative_factors(m, self.kind);
        let n = d.len();
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += self.coefficients[(a, b)] * d[a] * d[b];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fd_complex_structure(p: &SiegelPoint, v: TangentDirection, h: f64) -> CMatrix {
        let i_of = |t: C64| {
            crate::linalg::to_complex(&p.perturbed(v.i, v.j, t).unwrap().complex_structure())
        };
        let d_x = (i_of(c(h, 0.0)) - i_of(c(-h, 0.0))) / c(2.0 * h, 0.0);
        let d_y = (i_of(c(0.0, h)) - i_of(c(0.0, -h))) / c(2.0 * h, 0.0);
        match v.kind {
            DirectionKind::Holomorphic => (d_x - d_y * c(0.0, 1.0)) * c(0.5, 0.0),
            DirectionKind::Antiholomorphic => (d_x + d_y * c(0.0, 1.0)) * c(0.5, 0.0),
        }
    }

    fn test_points() -> Vec<SiegelPoint> {
        vec![
            SiegelPoint::scalar(c(0.0, 1.0)).unwrap(),
            SiegelPoint::scalar(c(1.0, 2.0)).unwrap(),
            SiegelPoint::scalar(c(0.5, 0.7)).unwrap(),
            SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap(),
            SiegelPoint::diagonal(&[c(0.3, 1.5), c(-0.2, 0.8)]).unwrap(),
        ]
    }

    #[test]
    fn complex_structure_at_i() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let i = p.complex_structure();
        assert_eq!(i, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn complex_structure_at_one_plus_i() {
        let p = SiegelPoint::scalar(c(1.0, 1.0)).unwrap();
        let i = p.complex_structure();
        let expected = DMatrix::from_row_slice(2, 2, &[-1.0, -2.0, 1.0, 1.0]);
        assert!(max_abs_real(&(i - expected)) < 1e-15);
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        let general = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.4, 1.3), c(0.2, 0.3), c(0.2, 0.3), c(-0.7, 0.9)],
        ))
        .unwrap();
        assert!(!general.is_normal());
        for p in test_points().into_iter().chain([general]) {
            let i = p.complex_structure();
            let n2 = 2 * p.dim();
            let defect = &i * &i + DMatrix::identity(n2, n2);
            assert!(max_abs_real(&defect) < 1e-10);
            let g = p.metric();
            assert!(max_abs_real(&(&g - g.transpose())) < 1e-10);
            assert!(
                Cholesky::new(g).is_some(),
                "metric must be positive definite"
            );
        }
    }

    #[test]
    fn rejects_invalid_points() {
        assert!(matches!(
            SiegelPoint::scalar(c(0.0, -1.0)),
            Err(Error::InvalidPoint(_))
        ));
        let asym =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.1, 0.0), c(0.2, 0.0), c(0.0, 1.0)]);
        assert!(SiegelPoint::new(asym).is_err());
    }

    #[test]
    fn d_complex_structure_at_i() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let d = p
            .d_complex_structure(TangentDirection::holomorphic(0, 0))
            .unwrap();
        let expected =
            CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.5, 0.0)]);
        assert!(max_abs_diff(&d, &expected) < 1e-15);
    }

    #[test]
    fn d_complex_structure_anticommutes_and_matches_finite_differences() {
        for p in test_points() {
            let i = crate::linalg::to_complex(&p.complex_structure());
            for v in TangentDirection::all(p.dim()) {
                if v.i != v.j {
                    continue;
                }
                let d = p.d_complex_structure(v).unwrap();
                assert!(crate::linalg::max_abs(&(&d * &i + &i * &d)) < 1e-10);
                let fd = fd_complex_structure(&p, v, 1e-4);
                assert!(max_abs_diff(&d, &fd) < 1e-6, "{v} at {p}");
            }
        }
    }

    #[test]
    fn finite_difference_error_is_second_order() {
        let p = SiegelPoint::scalar(c(0.3, 0.8)).unwrap();
        let v = TangentDirection::holomorphic(0, 0);
        let d = p.d_complex_structure(v).unwrap();
        let e1 = max_abs_diff(&d, &fd_complex_structure(&p, v, 1e-2));
        let e2 = max_abs_diff(&d, &fd_complex_structure(&p, v, 5e-3));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn off_diagonal_direction_with_scalar_imaginary_part() {
        let p = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 1.0), c(0.0, 0.3), c(0.0, 0.3), c(0.0, 1.0)],
        ))
        .unwrap();
        for v in [
            TangentDirection::holomorphic(0, 1),
            TangentDirection::antiholomorphic(0, 1),
        ] {
            let d = p.d_complex_structure(v).unwrap();
            assert!(max_abs_diff(&d, &fd_complex_structure(&p, v, 1e-4)) < 1e-6);
        }
    }

    #[test]
    fn refuses_unsupported_points() {
        let non_normal = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 1.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 2.0)],
        ))
        .unwrap();
        assert!(!non_normal.is_normal());
        assert!(matches!(
            non_normal.d_complex_structure(TangentDirection::holomorphic(0, 0)),
            Err(Error::UnsupportedPoint(_))
        ));
        let diag = SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        assert!(diag.is_normal());
        assert!(matches!(
            diag.d_complex_structure(TangentDirection::holomorphic(0, 1)),
            Err(Error::UnsupportedPoint(_))
        ));
    }

    #[test]
    fn holomorphic_frame_is_an_eigenframe() {
        for p in test_points() {
            let i = crate::linalg::to_complex(&p.complex_structure());
            let frame = p.complex_frame();
            let n = p.dim();
            let mut eig = CMatrix::zeros(2 * n, 2 * n);
            for a in 0..n {
                eig[(a, a)] = c(0.0, 1.0);
                eig[(n + a, n + a)] = c(0.0, -1.0);
            }
            assert!(max_abs_diff(&(&i * &frame), &(&frame * eig)) < 1e-12);
        }
    }

    #[test]
    fn bivector_contraction_reproduces_d_complex_structure() {
        for p in test_points() {
            let frame = p.complex_frame();
            let inv = frame.clone().try_inverse().unwrap();
            for v in TangentDirection::all(p.dim()) {
                let Ok(d) = p.d_complex_structure(v) else {
                    continue;
                };
                let on_frame = &inv * d * &frame;
                let contracted = gtilde_coefficients(p.dim(), v).contract_symplectic(&p);
                assert!(max_abs_diff(&on_frame, &contracted) < 1e-8, "{v} at {p}");
            }
        }
    }

    #[test]
    fn gtilde_coefficients_are_constant() {
        let g = gtilde_coefficients(1, TangentDirection::holomorphic(0, 0));
        assert_eq!(g.coefficients[(0, 0)], c(0.0, 2.0));
        let g = gtilde_coefficients(2, TangentDirection::holomorphic(0, 1));
        assert_eq!(g.coefficients[(0, 1)], c(0.0, 2.0));
        assert_eq!(g.coefficients[(1, 0)], c(0.0, 2.0));
        assert_eq!(g.coefficients[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn laplace_eigenvalues() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        assert_eq!(p.laplace_eigenvalue(&FourierMode::scalar(0, 0)), 0.0);
        assert!((p.laplace_eigenvalue(&FourierMode::scalar(1, 0)) + 2.0 * PI).abs() < 1e-14);
        assert!((p.laplace_eigenvalue(&FourierMode::scalar(0, 1)) + 2.0 * PI).abs() < 1e-14);
        for q in test_points() {
            for m in FourierMode::all_within(q.dim(), 2) {
                let l = q.laplace_eigenvalue(&m);
                if m.is_zero() {
                    assert_eq!(l, 0.0);
                } else {
                    assert!(l < 0.0);
                }
            }
        }
    }

    #[test]
    fn laplace_eigenvalue_matches_operator_on_phase() {
        // Δ = (1/2π)((∂y - X∂x)·Y⁻¹(∂y - X∂x) + ∂x·Y∂x), applied by second
        // differences to F_{r,s} for n = 1.
        let p = SiegelPoint::scalar(c(0.6, 1.3)).unwrap();
        let (x_re, y_im) = (0.6, 1.3);
        let m = FourierMode::scalar(2, -1);
        let f = |x: f64, y: f64| m.phase(&[x], &[y]);
        let (x0, y0, h) = (0.21, 0.37, 1e-3);
        let fxx = (f(x0 + h, y0) - 2.0 * f(x0, y0) + f(x0 - h, y0)) / (h * h);
        let fyy = (f(x0, y0 + h) - 2.0 * f(x0, y0) + f(x0, y0 - h)) / (h * h);
        let fxy = (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h) + f(x0 - h, y0 - h))
            / (4.0 * h * h);
        let d_op = (fyy - 2.0 * x_re * fxy + x_re * x_re * fxx) / y_im + fxx * y_im;
        let lap = d_op / (2.0 * PI);
        let expected = f(x0, y0) * p.laplace_eigenvalue(&m);
        assert!((lap - expected).norm() < 1e-3 * expected.norm());
    }

    #[test]
    fn eigenvalue_derivative_matches_finite_differences() {
        for p in test_points() {
            for v in TangentDirection::all(p.dim()) {
                for m in FourierMode::all_within(p.dim(), 1) {
                    let analytic = p.laplace_eigenvalue_derivative(&m, v).unwrap();
                    let h = 1e-5;
                    let lam = |t: C64| p.perturbed(v.i, v.j, t).unwrap().laplace_eigenvalue(&m);
                    let dx = (lam(c(h, 0.0)) - lam(c(-h, 0.0))) / (2.0 * h);
                    let dy = (lam(c(0.0, h)) - lam(c(0.0, -h))) / (2.0 * h);
                    let fd = match v.kind {
                        DirectionKind::Holomorphic => c(dx, -dy) * 0.5,
                        DirectionKind::Antiholomorphic => c(dx, dy) * 0.5,
                    };
                    assert!((analytic - fd).norm() < 1e-6 * (1.0 + fd.norm()));
                }
            }
        }
    }

    #[test]
    fn frame_derivative_of_phase_at_i() {
        // ∂z F = π(s - Z̄r)/Y · F for n = 1.
        let p = SiegelPoint::scalar(c(0.4, 1.7)).unwrap();
        let m = FourierMode::scalar(2, -3);
        let d = p.frame_derivative_factors(&m, DirectionKind::Holomorphic)[0];
        let zbar = c(0.4, -1.7);
        let expected = (c(-3.0, 0.0) - zbar * 2.0) * PI / 1.7;
        assert!((d - expected).norm() < 1e-12);
    }
}
