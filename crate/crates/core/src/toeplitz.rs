//! Toeplitz operators in the theta frame.
//!
//! For a pure phase `F_{r,s}(x, y) = exp(2πi(r·x + s·y))` the matrix
//! `(F_{r,s} θ_α, θ_β)` is a weighted shift: it is nonzero only when
//! `β ≡ α + r/k (mod 1)` and then
//!
//! ```text
//! e^{-(πi/k) r·Z̄r} e^{-2πi s·α} e^{-π²(s - Z̄r)·(2πkY)⁻¹(s - Z̄r)}
//! ```
//!
//! whose modulus is `η_k(r,s)`. Dividing by `η_k` gives the unitary,
//! `Z`-independent operator `U_{r,s}` with entries `e^{-πi r·s/k} e^{-2πi s·α}`.
//! Both are built here, next to a quadrature oracle that integrates the
//! matrix elements directly.

use std::f64::consts::PI;
use std::fmt;

use crate::fit::{fit_inverse_powers, log_log_order};
use crate::fourier::{poisson_bracket, FourierFunction, FourierMode};
use crate::linalg::{max_abs_diff, spectral_norm, CMatrix};
use crate::parallel::{map_slice, Execution};
use crate::quantization::{quadrature_matrix, QuadratureGrid};
use crate::siegel::SiegelPoint;
use crate::theta::{frame_dimension, ThetaLabel};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Derived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
            Provenance::Derived => "derived",
        })
    }
}

/// A `kⁿ × kⁿ` operator in the theta frame of a Siegel point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    k: u32,
    point: SiegelPoint,
    entries: CMatrix,
    provenance: Provenance,
}

impl OperatorMatrix {
    pub fn new(p: &SiegelPoint, k: u32, entries: CMatrix, provenance: Provenance) -> Result<Self> {
        let dim = frame_dimension(k, p.dim())?;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self {
            k,
            point: p.clone(),
            entries,
            provenance,
        })
    }

    pub fn identity(p: &SiegelPoint, k: u32) -> Result<Self> {
        let dim = frame_dimension(k, p.dim())?;
        Self::new(p, k, CMatrix::identity(dim, dim), Provenance::ClosedForm)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn point(&self) -> &SiegelPoint {
        &self.point
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn compatible(&self, other: &OperatorMatrix) -> Result<()> {
        if self.k != other.k || self.dim() != other.dim() {
            return Err(Error::InvalidArgument(format!(
                "operators at (k={}, n={}) and (k={}, n={}) cannot be combined",
                self.k,
                self.dim(),
                other.k,
                other.dim()
            )));
        }
        Ok(())
    }

    fn derived(&self, entries: CMatrix) -> Self {
        Self {
            k: self.k,
            point: self.point.clone(),
            entries,
            provenance: Provenance::Derived,
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.derived(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.derived(&self.entries - &other.entries))
    }

    /// Operator composition `self ∘ other`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.derived(&self.entries * &other.entries))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.derived(&self.entries * c)
    }

    pub fn adjoint(&self) -> Self {
        self.derived(self.entries.adjoint())
    }

    pub fn max_entry_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.compatible(other)?;
        Ok(max_abs_diff(&self.entries, &other.entries))
    }
}

/// `η_k(r,s) = exp(-(π/2k)((s - Xr)·Y⁻¹(s - Xr) + r·Yr))`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EtaValue(f64);

impl EtaValue {
    pub fn value(&self) -> f64 {
        self.0
    }
}

pub fn eta(p: &SiegelPoint, k: u32, m: &FourierMode) -> EtaValue {
    EtaValue((p.laplace_eigenvalue(m) / (4.0 * k as f64)).exp())
}

fn check_mode(p: &SiegelPoint, k: u32, m: &FourierMode) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidLevel);
    }
    if m.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: m.dim(),
        });
    }
    frame_dimension(k, p.dim())
}

/// Matrix with entry `value(α)` at `(α + r/k, α)` and zeros elsewhere.
fn weighted_shift(
    k: u32,
    n: usize,
    r: &[i64],
    value: impl Fn(&ThetaLabel) -> C64,
) -> Result<CMatrix> {
    let dim = frame_dimension(k, n)?;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let alpha = ThetaLabel::from_index(k, n, col);
        let beta: Vec<u32> = alpha
            .numerators()
            .iter()
            .zip(r)
            .map(|(&a, &ri)| (a as i64 + ri).rem_euclid(k as i64) as u32)
            .collect();
        let row = ThetaLabel::new(k, beta)?.index();
        out[(row, col)] = value(&alpha);
    }
    Ok(out)
}

/// `s·α` for the label `α = a/k`.
fn pair_with_label(s: &[i64], alpha: &ThetaLabel) -> f64 {
    s.iter()
        .zip(alpha.numerators())
        .map(|(&si, &a)| si as f64 * a as f64)
        .sum::<f64>()
        / alpha.k() as f64
}

/// `T_{F_m}` from the closed-form matrix elements.
pub fn toeplitz_mode_closed_form(
    p: &SiegelPoint,
    k: u32,
    m: &FourierMode,
) -> Result<OperatorMatrix> {
    check_mode(p, k, m)?;
    let n = p.dim();
    let kf = k as f64;
    let zbar = p.z().map(|v| v.conj());
    let r: Vec<C64> = m.r().iter().map(|&v| C64::new(v as f64, 0.0)).collect();
    let zbar_r: Vec<C64> = (0..n)
        .map(|i| (0..n).map(|j| zbar[(i, j)] * r[j]).sum())
        .collect();
    let r_zbar_r: C64 = r.iter().zip(&zbar_r).map(|(a, b)| a * b).sum();
    let w: Vec<C64> = (0..n).map(|i| m.s()[i] as f64 - zbar_r[i]).collect();
    let yinv = crate::linalg::to_complex(p.im_inv());
    let gauss_form = crate::linalg::cquad_form(&yinv, &w, &w);
    // π²/(2πk) = π/(2k)
    let common = (C64::new(0.0, -PI / kf) * r_zbar_r - gauss_form * (PI / (2.0 * kf))).exp();
    let entries = weighted_shift(k, n, m.r(), |alpha| {
        common * C64::from_polar(1.0, -2.0 * PI * pair_with_label(m.s(), alpha))
    })?;
    OperatorMatrix::new(p, k, entries, Provenance::ClosedForm)
}

/// `T_{F_m}` with every matrix element integrated on `grid`.
pub fn toeplitz_mode_quadrature(
    p: &SiegelPoint,
    k: u32,
    m: &FourierMode,
    grid: &QuadratureGrid,
) -> Result<OperatorMatrix> {
    check_mode(p, k, m)?;
    toeplitz_function_quadrature(p, k, &FourierFunction::mode(m.clone()), grid)
}

fn toeplitz_function_quadrature(
    p: &SiegelPoint,
    k: u32,
    f: &FourierFunction,
    grid: &QuadratureGrid,
) -> Result<OperatorMatrix> {
    let entries = quadrature_matrix(p, k, grid, Some(f), true)?;
    OperatorMatrix::new(p, k, entries, Provenance::Quadrature)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToeplitzSource {
    ClosedForm,
    Quadrature(QuadratureGrid),
}

/// `T_f = Σ λ_{r,s} T_{F_{r,s}}`.
pub fn toeplitz_function(
    p: &SiegelPoint,
    k: u32,
    f: &FourierFunction,
    source: ToeplitzSource,
) -> Result<OperatorMatrix> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    match source {
        ToeplitzSource::ClosedForm => {
            let dim = frame_dimension(k, p.dim())?;
            let mut acc = CMatrix::zeros(dim, dim);
            for (m, c) in f.terms() {
                acc += toeplitz_mode_closed_form(p, k, m)?.entries * *c;
            }
            OperatorMatrix::new(p, k, acc, Provenance::ClosedForm)
        }
        ToeplitzSource::Quadrature(grid) => toeplitz_function_quadrature(p, k, f, &grid),
    }
}

/// `T_{f(r,s,Z)(k) F_{r,s}}`: entries `e^{-πi r·s/k} e^{-2πi s·α}` on the
/// shift pattern of `r`.
pub fn rescaled_toeplitz(p: &SiegelPoint, k: u32, m: &FourierMode) -> Result<OperatorMatrix> {
    check_mode(p, k, m)?;
    let kf = k as f64;
    let rs: f64 = m.r().iter().zip(m.s()).map(|(&a, &b)| (a * b) as f64).sum();
    let entries = weighted_shift(k, p.dim(), m.r(), |alpha| {
        C64::from_polar(
            1.0,
            -PI * rs / kf - 2.0 * PI * pair_with_label(m.s(), alpha),
        )
    })?;
    OperatorMatrix::new(p, k, entries, Provenance::ClosedForm)
}

/// Largest singular value.
pub fn operator_norm(a: &OperatorMatrix) -> f64 {
    spectral_norm(a.entries())
}

/// `⟨A, B⟩ = tr(A B*)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    a.compatible(b)?;
    Ok(a.entries()
        .iter()
        .zip(b.entries().iter())
        .map(|(u, v)| u * v.conj())
        .sum())
}

/// `‖A‖_k = k^{-n/2} √⟨A, A⟩`.
pub fn hs_norm_scaled(a: &OperatorMatrix) -> f64 {
    let frob2: f64 = a.entries().iter().map(|v| v.norm_sqr()).sum();
    (frob2 / (a.k() as f64).powi(a.dim() as i32)).sqrt()
}

/// Closed-form `tr(T_{F_{m1}} T_{F_{m2}}*)` with its phase bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePair {
    pub value: C64,
    /// `(r,s) ≡ (t,u) (mod k)`.
    pub congruent: bool,
    /// `e^{-(πi/k)(r·s - 2s·t + t·u)}`, the phase multiplying `kⁿηη`.
    pub phase: C64,
    /// `ε = ±1` in `phase = ε e^{(πi/k) r·(s-u)}`.
    pub epsilon: i32,
}

pub fn trace_pair_closed_form(
    p: &SiegelPoint,
    k: u32,
    m1: &FourierMode,
    m2: &FourierMode,
) -> Result<TracePair> {
    check_mode(p, k, m1)?;
    check_mode(p, k, m2)?;
    let ki = k as i64;
    let congruent = m1
        .r()
        .iter()
        .zip(m2.r())
        .chain(m1.s().iter().zip(m2.s()))
        .all(|(a, b)| (a - b).rem_euclid(ki) == 0);
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let (r, s, t, u) = (m1.r(), m1.s(), m2.r(), m2.s());
    let kf = k as f64;
    let exponent = dot(r, s) - 2 * dot(s, t) + dot(t, u);
    let phase = C64::from_polar(1.0, -PI * exponent as f64 / kf);
    let s_minus_u: Vec<i64> = s.iter().zip(u).map(|(a, b)| a - b).collect();
    let eps_val = phase * C64::from_polar(1.0, -PI * dot(r, &s_minus_u) as f64 / kf);
    let epsilon = if eps_val.re >= 0.0 { 1 } else { -1 };
    let value = if congruent {
        phase * (kf.powi(p.dim() as i32) * eta(p, k, m1).value() * eta(p, k, m2).value())
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(TracePair {
        value,
        congruent,
        phase,
        epsilon,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmsRow {
    pub k: u32,
    pub norm: f64,
    pub sup: f64,
    pub error: f64,
}

/// Grid used for `sup |f|`: dense in one dimension, coarser beyond.
fn sup_grid_points(n: usize) -> usize {
    if n == 1 {
        2048
    } else {
        64
    }
}

/// `‖T_f^{(k)}‖` against `sup |f|` over a level sweep.
pub fn bms_experiment(
    p: &SiegelPoint,
    f: &FourierFunction,
    k_values: &[u32],
    exec: Execution,
) -> Result<Vec<BmsRow>> {
    let sup = f.sup_abs_on_grid(sup_grid_points(f.dim()));
    map_slice(exec, k_values, |&k| {
        let t = toeplitz_function(p, k, f, ToeplitzSource::ClosedForm)?;
        let norm = operator_norm(&t);
        Ok(BmsRow {
            k,
            norm,
            sup,
            error: (norm - sup).abs(),
        })
    })
    .into_iter()
    .collect()
}

/// Per-mode `1/k` expansion of `T_f T_g` in terms of `T_{F_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductExpansion {
    pub k_values: Vec<u32>,
    /// Output modes (support of `f·g`).
    pub modes: Vec<FourierMode>,
    /// `coefficients[i][l]`: coefficient of `k^{-l}` for `modes[i]`.
    pub coefficients: Vec<Vec<C64>>,
    /// Worst condition number over the per-mode fits.
    pub condition: f64,
    /// Worst fit residual.
    pub max_residual: f64,
    /// `‖T_f T_g - T_{fg}‖` at each level.
    pub c0_residuals: Vec<f64>,
    /// Log-log order of `c0_residuals`; `None` when the residuals vanish.
    pub c0_order: Option<f64>,
}

impl ProductExpansion {
    /// `c_l(f, g)` as a Fourier series.
    pub fn coefficient_function(&self, order: usize) -> FourierFunction {
        let n = self.modes.first().map_or(0, FourierMode::dim);
        FourierFunction::from_terms(
            n,
            self.modes
                .iter()
                .zip(&self.coefficients)
                .filter_map(|(m, c)| c.get(order).map(|v| (m.clone(), *v))),
        )
    }
}

/// Fits `⟨T_f T_g, T_m⟩ / ⟨T_m, T_m⟩ ≈ Σ_l c_{l,m} k^{-l}` for every output
/// mode `m`, with polynomial degree `order` in `1/k`.
///
/// Levels must be large enough that distinct output modes are not congruent
/// modulo `k`, otherwise their Toeplitz matrices overlap.
pub fn product_expansion_fit(
    p: &SiegelPoint,
    f: &FourierFunction,
    g: &FourierFunction,
    k_values: &[u32],
    order: usize,
    exec: Execution,
) -> Result<ProductExpansion> {
    if k_values.len() < order + 2 {
        return Err(Error::InvalidArgument(format!(
            "an order-{order} fit needs at least {} levels",
            order + 2
        )));
    }
    let fg = f * g;
    let modes: Vec<FourierMode> = fg.terms().map(|(m, _)| m.clone()).collect();
    let span = modes
        .iter()
        .map(FourierMode::max_abs_entry)
        .max()
        .unwrap_or(0);
    if let Some(&k) = k_values.iter().find(|&&k| (k as u64) <= 2 * span) {
        return Err(Error::InvalidArgument(format!(
            "level {k} aliases output modes of size up to {span}"
        )));
    }

    struct LevelData {
        projections: Vec<C64>,
        c0_residual: f64,
    }
    let per_level: Vec<Result<LevelData>> = map_slice(exec, k_values, |&k| {
        let tf = toeplitz_function(p, k, f, ToeplitzSource::ClosedForm)?;
        let tg = toeplitz_function(p, k, g, ToeplitzSource::ClosedForm)?;
        let prod = tf.compose(&tg)?;
        let tfg = toeplitz_function(p, k, &fg, ToeplitzSource::ClosedForm)?;
        let c0_residual = operator_norm(&prod.sub(&tfg)?);
        let projections = modes
            .iter()
            .map(|m| {
                let tm = toeplitz_mode_closed_form(p, k, m)?;
                Ok(hs_inner(&prod, &tm)? / hs_inner(&tm, &tm)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelData {
            projections,
            c0_residual,
        })
    });
    let per_level = per_level.into_iter().collect::<Result<Vec<_>>>()?;

    let kf: Vec<f64> = k_values.iter().map(|&k| k as f64).collect();
    let mut coefficients = Vec::with_capacity(modes.len());
    let mut condition: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    for i in 0..modes.len() {
        let samples: Vec<C64> = per_level.iter().map(|d| d.projections[i]).collect();
        let fit = fit_inverse_powers(&kf, &samples, order)?;
        condition = condition.max(fit.condition);
        max_residual = max_residual.max(fit.max_residual);
        coefficients.push(fit.coefficients);
    }
    let c0_residuals: Vec<f64> = per_level.iter().map(|d| d.c0_residual).collect();
    let c0_order = log_log_order(&kf, &c0_residuals);
    Ok(ProductExpansion {
        k_values: k_values.to_vec(),
        modes,
        coefficients,
        condition,
        max_residual,
        c0_residuals,
        c0_order,
    })
}

/// Fitted `c₁(f,g) - c₁(g,f)` next to `-i{f,g}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorComparison {
    pub fitted: FourierFunction,
    pub reference: FourierFunction,
    pub k_max: u32,
    pub condition: f64,
}

impl CommutatorComparison {
    /// Least-squares constant `C` in `fitted ≈ C · reference`.
    pub fn constant(&self) -> Option<C64> {
        let denom = self.reference.l2_inner(&self.reference);
        if denom.norm() == 0.0 {
            None
        } else {
            Some(self.fitted.l2_inner(&self.reference) / denom)
        }
    }

    /// `‖T_{fitted} - C T_{reference}‖ / ‖C T_{reference}‖` at `k_max`, or the
    /// absolute norm of `T_{fitted}` when the reference vanishes.
    pub fn deviation(&self, p: &SiegelPoint, constant: C64) -> Result<f64> {
        let fitted = toeplitz_function(p, self.k_max, &self.fitted, ToeplitzSource::ClosedForm)?;
        let reference = toeplitz_function(
            p,
            self.k_max,
            &self.reference.scale(constant),
            ToeplitzSource::ClosedForm,
        )?;
        let diff = operator_norm(&fitted.sub(&reference)?);
        let scale = operator_norm(&reference);
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

pub fn commutator_comparison(
    p: &SiegelPoint,
    f: &FourierFunction,
    g: &FourierFunction,
    k_values: &[u32],
    order: usize,
    exec: Execution,
) -> Result<CommutatorComparison> {
    let fg = product_expansion_fit(p, f, g, k_values, order, exec)?;
    let gf = product_expansion_fit(p, g, f, k_values, order, exec)?;
    let fitted = (&fg.coefficient_function(1) - &gf.coefficient_function(1)).pruned(0.0);
    let reference = poisson_bracket(f, g).scale(C64::new(0.0, -1.0));
    Ok(CommutatorComparison {
        fitted,
        reference,
        k_max: k_values.iter().copied().max().unwrap_or(1),
        condition: fg.condition.max(gf.condition),
    })
}
