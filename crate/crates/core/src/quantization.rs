//! Sections of `L^k` in the theta frame and their `L²` pairings.
//!
//! Inner products are integrals over the unit cell `[0,1)^{2n}` in the
//! coordinates `z = x + Zy` of the `Λ`-invariant density
//! `s₁ s̄₂ h^k`, with `h(z) = exp(-2π y·Yy)`. The density is smooth and
//! periodic, so the equal-weight rule on a uniform grid converges
//! spectrally.
//!
//! The sampler works one `y`-row at a time: for fixed `y` the weighted frame
//! is a trigonometric polynomial in `x`,
//!
//! ```text
//! θ_a(x + Zy) e^{-πk y·Yy} = Σ_{j ≡ a (mod k)} A_j(y) e^{2πi j·x},
//! A_j(y) = exp(πi j·Zj/k + 2πi j·Zy - πk y·Yy),
//! ```
//!
//! and the `x`-phases come from a table of `N`-th roots of unity.

use std::f64::consts::PI;

use crate::fourier::FourierFunction;
use crate::linalg::CMatrix;
use crate::parallel::{map_indices, Execution};
use crate::siegel::SiegelPoint;
use crate::theta::{
    frame_dimension, lattice_window, theta_frame, truncation_radius, DerivativeSelector,
    TruncationPolicy,
};
use crate::{Error, Result, C64};

/// Truncation tolerance used for every quadrature sample.
pub const QUADRATURE_EPSILON: f64 = 1e-16;

/// Coefficients of a section in the theta frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionVector {
    k: u32,
    n: usize,
    coeffs: Vec<C64>,
}

impl SectionVector {
    pub fn new(k: u32, n: usize, coeffs: Vec<C64>) -> Result<Self> {
        let dim = frame_dimension(k, n)?;
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coeffs.len(),
            });
        }
        Ok(Self { k, n, coeffs })
    }

    pub fn zero(k: u32, n: usize) -> Result<Self> {
        Self::new(k, n, vec![C64::new(0.0, 0.0); frame_dimension(k, n)?])
    }

    /// The frame element with index `index`.
    pub fn unit(k: u32, n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(k, n)?;
        if index >= s.coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "frame index {index} out of range"
            )));
        }
        s.coeffs[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn add(&self, other: &SectionVector) -> Result<SectionVector> {
        if other.k != self.k || other.n != self.n {
            return Err(Error::InvalidArgument(
                "sections live at different levels".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }
}

/// Uniform grid with `points` nodes per coordinate on `[0,1)^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    points: usize,
    exec: Execution,
}

impl QuadratureGrid {
    pub fn new(points: usize) -> Self {
        Self {
            points,
            exec: Execution::default(),
        }
    }

    /// Bandwidth bound `4(k·⌈R⌉ + m_max)`.
    pub fn required_points(p: &SiegelPoint, k: u32, m_max: u64) -> Result<usize> {
        let policy = quadrature_policy(p, k)?;
        Ok(4 * (k as usize * policy.radius.ceil() as usize + m_max as usize))
    }

    /// Smallest admissible grid.
    pub fn for_level(p: &SiegelPoint, k: u32, m_max: u64) -> Result<Self> {
        Ok(Self::new(Self::required_points(p, k, m_max)?))
    }

    /// Same grid with twice as many points per coordinate.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points,
            exec: self.exec,
        }
    }

    pub fn with_execution(self, exec: Execution) -> Self {
        Self { exec, ..self }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    fn check(&self, p: &SiegelPoint, k: u32, m_max: u64) -> Result<()> {
        let required = Self::required_points(p, k, m_max)?;
        if self.points < required {
            return Err(Error::InsufficientGrid {
                required,
                got: self.points,
            });
        }
        Ok(())
    }
}

fn quadrature_policy(p: &SiegelPoint, k: u32) -> Result<TruncationPolicy> {
    truncation_radius(p, k, QUADRATURE_EPSILON, DerivativeSelector::Value)
}

/// `h(z) = exp(-2π y·Yy)` with `y = Y⁻¹ Im z`.
pub fn hermitian_weight(p: &SiegelPoint, z: &[C64]) -> f64 {
    let y = p.y_coordinates(z);
    (-2.0 * PI * crate::linalg::quad_form(p.im(), &y, &y)).exp()
}

/// `e_λ(z) = exp(-2πi b·z - πi b·Zb)` for `λ = a + Zb`.
pub fn multiplier(p: &SiegelPoint, z: &[C64], b: &[i64]) -> C64 {
    let bf: Vec<C64> = b.iter().map(|&v| C64::new(v as f64, 0.0)).collect();
    let bz: C64 = bf.iter().zip(z).map(|(bi, zi)| bi * zi).sum();
    let bzb = crate::linalg::cquad_form(p.z(), &bf, &bf);
    (C64::new(0.0, -2.0 * PI) * bz - C64::new(0.0, PI) * bzb).exp()
}

/// Generator `lattice_index` of `Λ = Zⁿ + ZZⁿ` as `(a, b)`.
fn lattice_generator(n: usize, lattice_index: usize) -> (Vec<i64>, Vec<i64>) {
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    if lattice_index < n {
        a[lattice_index] = 1;
    } else {
        b[lattice_index - n] = 1;
    }
    (a, b)
}

fn translate(p: &SiegelPoint, z: &[C64], a: &[i64], b: &[i64]) -> Vec<C64> {
    let n = p.dim();
    (0..n)
        .map(|i| z[i] + a[i] as f64 + (0..n).map(|j| p.z()[(i, j)] * b[j] as f64).sum::<C64>())
        .collect()
}

/// Largest relative residual of
///
/// ```text
/// h(z + λ) |e_λ(z)|² = h(z)
/// e_{λ+λ'}(z) = e_λ(z + λ') e_{λ'}(z)
/// ```
///
/// for `λ` the generator `lattice_index` and `λ'` running over all
/// generators.
pub fn lattice_weight_identity(p: &SiegelPoint, z: &[C64], lattice_index: usize) -> Result<f64> {
    let n = p.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    if lattice_index >= 2 * n {
        return Err(Error::InvalidArgument(format!(
            "lattice index {lattice_index} out of range 0..{}",
            2 * n
        )));
    }
    let (a, b) = lattice_generator(n, lattice_index);
    let h = hermitian_weight(p, z);
    let shifted = hermitian_weight(p, &translate(p, z, &a, &b)) * multiplier(p, z, &b).norm_sqr();
    let mut worst = (shifted - h).abs() / h.max(shifted);
    for other in 0..2 * n {
        let (a2, b2) = lattice_generator(n, other);
        let sum_b: Vec<i64> = b.iter().zip(&b2).map(|(u, v)| u + v).collect();
        let lhs = multiplier(p, z, &sum_b);
        let rhs = multiplier(p, &translate(p, z, &a2, &b2), &b) * multiplier(p, z, &b2);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()));
    }
    Ok(worst)
}

/// `Σ_α c_α θ_α(x + Zy)`.
pub fn section_eval(p: &SiegelPoint, s: &SectionVector, x: &[f64], y: &[f64]) -> Result<C64> {
    if s.dim() != p.dim() || x.len() != p.dim() || y.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: s.dim(),
        });
    }
    let policy = quadrature_policy(p, s.k())?;
    let frame = theta_frame(p, s.k(), &p.complex_point(x, y), &policy)?;
    Ok(frame.iter().zip(s.coeffs()).map(|(t, c)| t * c).sum())
}

/// Weighted frame `θ_a(x + Zy) e^{-πk y·Yy}` at one point.
/// One Fourier term of a weight: `(r, s, coefficient)`.
type WeightTerm = (Vec<i64>, Vec<i64>, C64);

fn weighted_frame_at(
    p: &SiegelPoint,
    k: u32,
    policy: &TruncationPolicy,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<C64>> {
    let w = (-PI * k as f64 * crate::linalg::quad_form(p.im(), y, y)).exp();
    let frame = theta_frame(p, k, &p.complex_point(x, y), policy)?;
    Ok(frame.into_iter().map(|v| v * w).collect())
}

/// Largest deviation of the density matrix `F_a F̄_b` (weighted frame) under
/// a unit shift of any single coordinate, relative to its largest entry.
pub fn integrand_periodicity_residual(
    p: &SiegelPoint,
    k: u32,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let n = p.dim();
    let policy = quadrature_policy(p, k)?;
    let density = |x: &[f64], y: &[f64]| -> Result<Vec<C64>> {
        let f = weighted_frame_at(p, k, &policy, x, y)?;
        Ok(f.iter()
            .flat_map(|a| f.iter().map(move |b| a * b.conj()))
            .collect())
    };
    let base = density(x, y)?;
    let scale = base.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for c in 0..2 * n {
        let (mut xs, mut ys) = (x.to_vec(), y.to_vec());
        if c < n {
            xs[c] += 1.0;
        } else {
            ys[c - n] += 1.0;
        }
        let moved = density(&xs, &ys)?;
        for (u, v) in base.iter().zip(&moved) {
            worst = worst.max((u - v).norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Point used for the periodicity certificate; irrational-looking so it
/// avoids accidental symmetries.
const PROBE: [f64; 2] = [0.371_946_2, 0.613_428_7];

/// `√(2ⁿ kⁿ det Y)`, the factor making the theta frame orthonormal.
pub fn normalization_factor(p: &SiegelPoint, k: u32) -> f64 {
    let n = p.dim() as i32;
    (2f64.powi(n) * (k as f64).powi(n) * p.det_im()).sqrt()
}

/// `M[(b, a)] = ∫ w θ_a θ̄_b h^k` over the unit cell, optionally with the
/// normalization factor applied.
///
/// The weight `w` (a Fourier series in `(x, y)`) defaults to 1. Rows of the
/// grid run in parallel under `grid.execution()`; the per-row partial
/// matrices are summed in row order.
pub fn quadrature_matrix(
    p: &SiegelPoint,
    k: u32,
    grid: &QuadratureGrid,
    weight: Option<&FourierFunction>,
    normalized: bool,
) -> Result<CMatrix> {
    let n = p.dim();
    if let Some(w) = weight {
        if w.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w.dim(),
            });
        }
    }
    let m_max = weight.map_or(0, |w| w.max_mode_entry());
    grid.check(p, k, m_max)?;
    let dim = frame_dimension(k, n)?;
    let policy = quadrature_policy(p, k)?;

    let probe: Vec<f64> = (0..n).map(|i| PROBE[i % 2] + 0.1 * i as f64).collect();
    let periodicity = integrand_periodicity_residual(p, k, &probe, &probe)?;
    if periodicity > 1e-12 {
        return Err(Error::UnsupportedPoint(format!(
            "quadrature integrand is not periodic (residual {periodicity:.3e})"
        )));
    }

    let big_n = grid.points();
    let roots: Vec<C64> = (0..big_n)
        .map(|t| C64::from_polar(1.0, 2.0 * PI * t as f64 / big_n as f64))
        .collect();
    let rows = big_n.pow(n as u32);
    let x_nodes: Vec<Vec<usize>> = (0..rows).map(|idx| multi_index(idx, n, big_n)).collect();
    let weight_terms: Vec<WeightTerm> = weight
        .map(|w| {
            w.terms()
                .map(|(m, c)| (m.r().to_vec(), m.s().to_vec(), *c))
                .collect()
        })
        .unwrap_or_default();

    let partials = map_indices(grid.execution(), rows, |row| {
        let yq = multi_index(row, n, big_n);
        let y: Vec<f64> = yq.iter().map(|&q| q as f64 / big_n as f64).collect();
        row_partial(
            p,
            k,
            &policy,
            dim,
            &y,
            &yq,
            &x_nodes,
            &roots,
            weight.map(|_| weight_terms.as_slice()),
        )
    });

    let mut total = CMatrix::zeros(dim, dim);
    for part in partials {
        total += part;
    }
    let mut scale = 1.0 / (big_n as f64).powi(2 * n as i32);
    if normalized {
        scale *= normalization_factor(p, k);
    }
    Ok(total * C64::new(scale, 0.0))
}

fn multi_index(mut idx: usize, n: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn row_partial(
    p: &SiegelPoint,
    k: u32,
    policy: &TruncationPolicy,
    dim: usize,
    y: &[f64],
    yq: &[usize],
    x_nodes: &[Vec<usize>],
    roots: &[C64],
    weight: Option<&[WeightTerm]>,
) -> CMatrix {
    let n = p.dim();
    let big_n = roots.len();
    let kf = k as f64;
    let envelope = PI * kf * crate::linalg::quad_form(p.im(), y, y);
    let zy: Vec<C64> = (0..n)
        .map(|i| (0..n).map(|j| p.z()[(i, j)] * y[j]).sum())
        .collect();
    // Coefficients A_j(y) with their frame index.
    let coeffs: Vec<(Vec<i64>, usize, C64)> = lattice_window(k, y, policy.radius)
        .into_iter()
        .map(|j| {
            let jf: Vec<C64> = j.iter().map(|&v| C64::new(v as f64, 0.0)).collect();
            let quad = crate::linalg::cquad_form(p.z(), &jf, &jf) / kf;
            let lin: C64 = jf.iter().zip(&zy).map(|(a, b)| a * b).sum();
            let a = (C64::new(0.0, PI) * (quad + lin * 2.0) - envelope).exp();
            let idx = j.iter().fold(0usize, |acc, &v| {
                acc * k as usize + v.rem_euclid(k as i64) as usize
            });
            (j, idx, a)
        })
        .collect();

    let mut acc = CMatrix::zeros(dim, dim);
    let mut frame = vec![C64::new(0.0, 0.0); dim];
    for xq in x_nodes {
        frame.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (j, idx, a) in &coeffs {
            let t = j
                .iter()
                .zip(xq)
                .map(|(&ji, &xi)| ji * xi as i64)
                .sum::<i64>()
                .rem_euclid(big_n as i64) as usize;
            frame[*idx] += a * roots[t];
        }
        let w = match weight {
            None => C64::new(1.0, 0.0),
            Some(terms) => terms
                .iter()
                .map(|(r, s, c)| {
                    let t = r
                        .iter()
                        .zip(xq)
                        .chain(s.iter().zip(yq))
                        .map(|(&m, &q)| m * q as i64)
                        .sum::<i64>()
                        .rem_euclid(big_n as i64) as usize;
                    c * roots[t]
                })
                .sum(),
        };
        for b in 0..dim {
            let fb = frame[b].conj() * w;
            for a in 0..dim {
                acc[(b, a)] += frame[a] * fb;
            }
        }
    }
    acc
}

/// `G[(a, b)] = (θ_a, θ_b)`, normalized; close to the identity.
pub fn gram_matrix(p: &SiegelPoint, k: u32, grid: &QuadratureGrid) -> Result<CMatrix> {
    Ok(quadrature_matrix(p, k, grid, None, true)?.transpose())
}

/// `(s₁, s₂) = ∫ s₁ s̄₂ h^k`, optionally normalized.
pub fn l2_inner(
    p: &SiegelPoint,
    s1: &SectionVector,
    s2: &SectionVector,
    grid: &QuadratureGrid,
    normalized: bool,
) -> Result<C64> {
    if s1.k() != s2.k() || s1.dim() != p.dim() || s2.dim() != p.dim() {
        return Err(Error::InvalidArgument(
            "sections do not match the point and each other".into(),
        ));
    }
    let m = quadrature_matrix(p, s1.k(), grid, None, normalized)?;
    let mut acc = C64::new(0.0, 0.0);
    for (a, ca) in s1.coeffs().iter().enumerate() {
        for (b, cb) in s2.coeffs().iter().enumerate() {
            acc += ca * cb.conj() * m[(b, a)];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_defect, max_abs_diff};
    use crate::theta::{theta_eval, ThetaLabel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn identity_defect(g: &CMatrix) -> f64 {
        max_abs_diff(g, &CMatrix::identity(g.nrows(), g.ncols()))
    }

    #[test]
    fn gram_is_identity_in_one_dimension() {
        for z in [c(0.0, 1.0), c(1.0, 2.0), c(0.5, 0.7), c(0.0, 2.0)] {
            let p = SiegelPoint::scalar(z).unwrap();
            for k in [1, 2, 4, 8] {
                let grid = QuadratureGrid::for_level(&p, k, 0).unwrap();
                let g = gram_matrix(&p, k, &grid).unwrap();
                assert!(
                    identity_defect(&g) < 1e-8,
                    "Z={z} k={k}: {}",
                    identity_defect(&g)
                );
                assert!(hermitian_defect(&g) < 1e-13);
            }
        }
    }

    #[test]
    fn gram_is_identity_in_two_dimensions() {
        let p = SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.3, 1.4)]).unwrap();
        for k in [1, 2] {
            let grid = QuadratureGrid::for_level(&p, k, 0).unwrap();
            let g = gram_matrix(&p, k, &grid).unwrap();
            assert!(identity_defect(&g) < 1e-8, "k={k}: {}", identity_defect(&g));
        }
    }

    #[test]
    fn brute_force_oracle_agrees() {
        // Midpoint sums of θ_a θ̄_b h^k built from theta_eval directly.
        let p = SiegelPoint::scalar(c(0.2, 0.9)).unwrap();
        let k = 2;
        let pol = truncation_radius(&p, k, 1e-16, DerivativeSelector::Value).unwrap();
        let m = 48;
        let mut g = CMatrix::zeros(2, 2);
        for i in 0..m {
            for j in 0..m {
                let (x, y) = ((i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64);
                let z = [c(x, 0.0) + p.z()[(0, 0)] * y];
                let h = (-2.0 * PI * 0.9 * y * y).exp().powi(k as i32);
                let vals: Vec<C64> = (0..2)
                    .map(|a| {
                        let label = ThetaLabel::new(k, vec![a]).unwrap();
                        theta_eval(&p, &label, &z, DerivativeSelector::Value, &pol).unwrap()
                    })
                    .collect();
                for a in 0..2 {
                    for b in 0..2 {
                        g[(a, b)] += vals[a] * vals[b].conj() * h;
                    }
                }
            }
        }
        let oracle = g * c(normalization_factor(&p, k) / (m * m) as f64, 0.0);
        let grid = QuadratureGrid::for_level(&p, k, 0).unwrap();
        assert!(max_abs_diff(&gram_matrix(&p, k, &grid).unwrap(), &oracle) < 1e-10);
    }

    #[test]
    fn refinement_changes_little() {
        let p = SiegelPoint::scalar(c(0.5, 0.7)).unwrap();
        let grid = QuadratureGrid::for_level(&p, 2, 0).unwrap();
        let a = gram_matrix(&p, 2, &grid).unwrap();
        let b = gram_matrix(&p, 2, &grid.refined()).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let p = SiegelPoint::scalar(c(0.3, 1.1)).unwrap();
        let grid = QuadratureGrid::for_level(&p, 4, 0).unwrap();
        let a = gram_matrix(&p, 4, &grid.with_execution(Execution::Sequential)).unwrap();
        let b = gram_matrix(&p, 4, &grid.with_execution(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn insufficient_grid_is_refused() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let required = QuadratureGrid::required_points(&p, 4, 0).unwrap();
        match gram_matrix(&p, 4, &QuadratureGrid::new(required - 1)) {
            Err(Error::InsufficientGrid { required: r, got }) => {
                assert_eq!(r, required);
                assert_eq!(got, required - 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inner_product_properties() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let grid = QuadratureGrid::for_level(&p, 2, 0).unwrap();
        let s1 = SectionVector::new(2, 1, vec![c(1.0, 0.5), c(-0.3, 2.0)]).unwrap();
        let s2 = SectionVector::new(2, 1, vec![c(0.2, -1.0), c(0.7, 0.1)]).unwrap();
        let a = l2_inner(&p, &s1, &s2, &grid, true).unwrap();
        let b = l2_inner(&p, &s2, &s1, &grid, true).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        // Orthonormal frame: the pairing is the coefficient pairing.
        let expected: C64 = s1
            .coeffs()
            .iter()
            .zip(s2.coeffs())
            .map(|(u, v)| u * v.conj())
            .sum();
        assert!((a - expected).norm() < 1e-8);
        let e0 = SectionVector::unit(2, 1, 0).unwrap();
        let e1 = SectionVector::unit(2, 1, 1).unwrap();
        assert!((l2_inner(&p, &e0, &e0, &grid, true).unwrap() - 1.0).norm() < 1e-8);
        assert!(l2_inner(&p, &e0, &e1, &grid, true).unwrap().norm() < 1e-8);
        let raw = l2_inner(&p, &e0, &e0, &grid, false).unwrap();
        assert!((raw * normalization_factor(&p, 2) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn section_evaluation() {
        let p = SiegelPoint::scalar(c(0.1, 0.8)).unwrap();
        let (x, y) = ([0.3], [0.6]);
        let pol = truncation_radius(&p, 3, 1e-16, DerivativeSelector::Value).unwrap();
        let z = p.complex_point(&x, &y);
        let unit = SectionVector::unit(3, 1, 2).unwrap();
        let label = ThetaLabel::new(3, vec![2]).unwrap();
        let direct = theta_eval(&p, &label, &z, DerivativeSelector::Value, &pol).unwrap();
        assert!((section_eval(&p, &unit, &x, &y).unwrap() - direct).norm() < 1e-14);
        let zero = SectionVector::zero(3, 1).unwrap();
        assert_eq!(section_eval(&p, &zero, &x, &y).unwrap(), c(0.0, 0.0));
        let s1 = SectionVector::new(3, 1, vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)]).unwrap();
        let s2 = SectionVector::new(3, 1, vec![c(-0.5, 0.0), c(1.0, 1.0), c(0.0, 3.0)]).unwrap();
        let sum = section_eval(&p, &s1.add(&s2).unwrap(), &x, &y).unwrap();
        let parts = section_eval(&p, &s1, &x, &y).unwrap() + section_eval(&p, &s2, &x, &y).unwrap();
        assert!((sum - parts).norm() < 1e-12);
        assert!(SectionVector::new(3, 1, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn weight_and_multiplier_identities() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        assert!(lattice_weight_identity(&p, &[c(0.2, 0.3)], 0).unwrap() < 1e-14);
        assert!(lattice_weight_identity(&p, &[c(0.2, 0.3)], 1).unwrap() < 1e-12);
        let q = SiegelPoint::scalar(c(1.0, 1.0)).unwrap();
        assert!(lattice_weight_identity(&q, &[c(-0.4, 0.7)], 1).unwrap() < 1e-12);
        let r = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.4, 1.3), c(0.2, 0.3), c(0.2, 0.3), c(-0.7, 0.9)],
        ))
        .unwrap();
        for idx in 0..4 {
            assert!(
                lattice_weight_identity(&r, &[c(0.1, 0.2), c(0.3, -0.1)], idx).unwrap() < 1e-12
            );
        }
        // Direct value at Z = i, shift by Z, z = 0.2 + 0.3i.
        let z = [c(0.2, 0.3)];
        let e = multiplier(&p, &z, &[1]);
        let expected = (c(0.0, -2.0 * PI) * z[0] - c(0.0, PI) * c(0.0, 1.0)).exp();
        assert!((e - expected).norm() < 1e-15);
    }

    #[test]
    fn integrand_is_periodic() {
        let p = SiegelPoint::diagonal(&[c(0.4, 1.0), c(0.0, 0.6)]).unwrap();
        assert!(integrand_periodicity_residual(&p, 2, &[0.1, 0.7], &[0.25, 0.5]).unwrap() < 1e-12);
    }
}
