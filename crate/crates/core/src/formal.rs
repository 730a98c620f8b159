//! Heat-operator trivialization, flatness of the formal connection, and the
//! Moyal product on Fourier series.
//!
//! Every operator here is diagonal on pure phases. `Δ_{I(Z)} F_m = λ(m,Z) F_m`
//! with `λ ≤ 0`, so `E_I = exp(-hΔ/4)` multiplies `F_m` by
//! `exp(-hλ/4) ≥ 1`; at `h = 1/k` this is the reciprocal of `η_k(m)`.

use std::f64::consts::PI;

use crate::fit::fit_inverse_powers;
use crate::fourier::{FourierFunction, FourierMode};
use crate::parallel::{map_slice, Execution};
use crate::siegel::{gtilde_coefficients, DirectionKind, SiegelPoint, TangentDirection};
use crate::toeplitz::{
    hs_inner, rescaled_toeplitz, toeplitz_function, toeplitz_mode_closed_form, OperatorMatrix,
    ToeplitzSource,
};
use crate::{Error, Result, C64};

/// `Σ_{l=0}^{L} f_l h^l`, truncated at order `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalFourierSeries {
    n: usize,
    coefficients: Vec<FourierFunction>,
}

impl FormalFourierSeries {
    /// Pads with zeros up to `order`; longer inputs are rejected.
    pub fn new(n: usize, order: usize, mut coefficients: Vec<FourierFunction>) -> Result<Self> {
        if coefficients.len() > order + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients exceed order {order}",
                coefficients.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        coefficients.resize(order + 1, FourierFunction::zero(n));
        Ok(Self { n, coefficients })
    }

    /// `f` as a series with no `h`-dependence.
    pub fn constant(f: FourierFunction, order: usize) -> Self {
        let n = f.dim();
        let mut coefficients = vec![FourierFunction::zero(n); order + 1];
        coefficients[0] = f;
        Self { n, coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, l: usize) -> &FourierFunction {
        &self.coefficients[l]
    }

    pub fn coefficients(&self) -> &[FourierFunction] {
        &self.coefficients
    }

    /// Evaluates the truncated series at a numerical `h`.
    pub fn evaluate(&self, h: f64) -> FourierFunction {
        let mut acc = FourierFunction::zero(self.n);
        for (l, c) in self.coefficients.iter().enumerate() {
            acc = &acc + &c.scale(C64::new(h.powi(l as i32), 0.0));
        }
        acc
    }

    /// Largest coefficient difference over all orders.
    pub fn max_difference(&self, other: &FormalFourierSeries) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.max_coefficient_diff(b))
            .fold(0.0, f64::max)
    }

    fn map_modes(&self, factor: impl Fn(&FourierMode) -> Vec<f64>) -> Self {
        // factor(m)[j] multiplies h^j; the product is truncated at the order.
        let order = self.order();
        let mut out = vec![FourierFunction::zero(self.n); order + 1];
        for (l, c) in self.coefficients.iter().enumerate() {
            for (m, v) in c.terms() {
                let series = factor(m);
                for (j, s) in series.iter().enumerate().take(order + 1 - l) {
                    out[l + j].add_term(m.clone(), v * *s);
                }
            }
        }
        Self {
            n: self.n,
            coefficients: out,
        }
    }
}

/// `f(r,s,Z)(k) = exp(-λ(m,Z) / 4k)`, the reciprocal of `η_k(m)`.
pub fn heat_coefficient(p: &SiegelPoint, k: u32, m: &FourierMode) -> f64 {
    (-p.laplace_eigenvalue(m) / (4.0 * k as f64)).exp()
}

/// `E_I f` at the numerical value `h`.
pub fn heat_transform(p: &SiegelPoint, f: &FourierFunction, h: f64) -> FourierFunction {
    FourierFunction::from_terms(
        f.dim(),
        f.terms()
            .map(|(m, c)| (m.clone(), c * (-h * p.laplace_eigenvalue(m) / 4.0).exp())),
    )
}

/// `E_I f` as a formal series in `h`, truncated at the order of `f`.
pub fn heat_transform_formal(p: &SiegelPoint, f: &FormalFourierSeries) -> FormalFourierSeries {
    let order = f.order();
    f.map_modes(|m| {
        let x = -p.laplace_eigenvalue(m) / 4.0;
        let mut term = 1.0;
        (0..=order)
            .map(|j| {
                if j > 0 {
                    term *= x / j as f64;
                }
                term
            })
            .collect()
    })
}

/// Toeplitz operator of the heat-rescaled mode, `T_{f(m,Z)(k) F_m}`.
pub fn heat_rescaled_toeplitz(p: &SiegelPoint, k: u32, m: &FourierMode) -> Result<OperatorMatrix> {
    let f = heat_transform(p, &FourierFunction::mode(m.clone()), 1.0 / k as f64);
    toeplitz_function(p, k, &f, ToeplitzSource::ClosedForm)
}

/// Largest entry difference between the heat-rescaled Toeplitz matrices of
/// `F_m` at two points, with the theta frames identified label by label.
pub fn covariant_constancy_residual(
    p1: &SiegelPoint,
    p2: &SiegelPoint,
    k: u32,
    m: &FourierMode,
) -> Result<f64> {
    heat_rescaled_toeplitz(p1, k, m)?.max_entry_diff(&heat_rescaled_toeplitz(p2, k, m)?)
}

/// The same comparison without the heat rescaling.
pub fn unrescaled_difference(
    p1: &SiegelPoint,
    p2: &SiegelPoint,
    k: u32,
    m: &FourierMode,
) -> Result<f64> {
    toeplitz_mode_closed_form(p1, k, m)?.max_entry_diff(&toeplitz_mode_closed_form(p2, k, m)?)
}

/// Residuals of `∂_v λ + μ_{G̃(v)} / 2π = 0`, the per-mode form of
/// `D_V E_I(F_m) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessResidual {
    /// With the analytic derivative of `λ`.
    pub analytic: f64,
    /// With `∂_v λ` from central differences in `Z`.
    pub finite_difference: f64,
}

/// Default step for the finite-difference variant.
pub const FLATNESS_FD_STEP: f64 = 1e-4;

pub fn formal_hitchin_residual(
    p: &SiegelPoint,
    m: &FourierMode,
    v: TangentDirection,
) -> Result<FlatnessResidual> {
    formal_hitchin_residual_with_step(p, m, v, FLATNESS_FD_STEP)
}

pub fn formal_hitchin_residual_with_step(
    p: &SiegelPoint,
    m: &FourierMode,
    v: TangentDirection,
    step: f64,
) -> Result<FlatnessResidual> {
    let n = p.dim();
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.dim(),
        });
    }
    if n >= 2 && !p.is_normal() {
        return Err(Error::UnsupportedPoint(format!(
            "Z = {p} is not normal; the bivector formulas need ZZ̄ = Z̄Z"
        )));
    }
    let mu = gtilde_coefficients(n, v).laplacian_eigenvalue(p, m);
    let target = -mu / (2.0 * PI);
    let analytic = p.laplace_eigenvalue_derivative(m, v)?;

    let lam = |t: C64| -> Result<f64> { Ok(p.perturbed(v.i, v.j, t)?.laplace_eigenvalue(m)) };
    let h = step;
    let d_x = (lam(C64::new(h, 0.0))? - lam(C64::new(-h, 0.0))?) / (2.0 * h);
    let d_y = (lam(C64::new(0.0, h))? - lam(C64::new(0.0, -h))?) / (2.0 * h);
    let fd = match v.kind {
        DirectionKind::Holomorphic => C64::new(d_x, -d_y) * 0.5,
        DirectionKind::Antiholomorphic => C64::new(d_x, d_y) * 0.5,
    };
    Ok(FlatnessResidual {
        analytic: (analytic - target).norm(),
        finite_difference: (fd - target).norm(),
    })
}

/// `f ⋆ g = μ ∘ exp(-(i/2) h Q)(f ⊗ g)`, truncated at order `order`.
///
/// On pure phases `Q` acts by `-4π²(r·u - s·t)`, so
/// `F_{r,s} ⋆ F_{t,u} = Σ_j (2π²i h (r·u - s·t))^j / j! F_{r+t,s+u}`.
pub fn moyal_product(
    f: &FormalFourierSeries,
    g: &FormalFourierSeries,
    order: usize,
) -> Result<FormalFourierSeries> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let n = f.dim();
    let mut out = vec![FourierFunction::zero(n); order + 1];
    for (l1, a) in f.coefficients().iter().enumerate().take(order + 1) {
        for (l2, b) in g.coefficients().iter().enumerate().take(order + 1 - l1) {
            for (m1, c1) in a.terms() {
                for (m2, c2) in b.terms() {
                    let x = C64::new(0.0, 2.0 * PI * PI * m1.symplectic_pairing(m2) as f64);
                    let sum = m1 + m2;
                    let mut term = c1 * c2;
                    for (j, slot) in out.iter_mut().enumerate().skip(l1 + l2) {
                        if j > l1 + l2 {
                            term *= x / (j - l1 - l2) as f64;
                        }
                        slot.add_term(sum.clone(), term);
                    }
                }
            }
        }
    }
    FormalFourierSeries::new(n, order, out)
}

/// Coefficient-wise difference of `(f⋆g)⋆h` and `f⋆(g⋆h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociativityDefect {
    pub absolute: f64,
    /// Largest coefficient of the intermediate products `f⋆g` and `g⋆h`
    /// (at least 1); rounding in those coefficients bounds the attainable
    /// absolute agreement.
    pub scale: f64,
}

impl AssociativityDefect {
    pub fn relative(&self) -> f64 {
        self.absolute / self.scale
    }
}

pub fn associativity_defect(
    f: &FormalFourierSeries,
    g: &FormalFourierSeries,
    h: &FormalFourierSeries,
    order: usize,
) -> Result<AssociativityDefect> {
    let fg = moyal_product(f, g, order)?;
    let gh = moyal_product(g, h, order)?;
    let left = moyal_product(&fg, h, order)?;
    let right = moyal_product(f, &gh, order)?;
    let scale = [&fg, &gh]
        .iter()
        .flat_map(|s| s.coefficients().iter())
        .flat_map(|c| c.terms().map(|(_, v)| v.norm()))
        .fold(1.0, f64::max);
    Ok(AssociativityDefect {
        absolute: left.max_difference(&right),
        scale,
    })
}

/// Order-1 coefficient of the trivialized Berezin–Toeplitz product of two
/// modes, next to the Moyal one.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivializedStar {
    /// Coefficient of `k^{-1}` in `P⁻¹(P F_{m1} ⋆ P F_{m2})` on `F_{m1+m2}`.
    pub fitted: C64,
    /// Coefficient of `h` in `F_{m1} ⋆ F_{m2}` on `F_{m1+m2}`.
    pub moyal: C64,
    pub condition: f64,
}

impl TrivializedStar {
    /// `fitted / moyal`, undefined when the Moyal term vanishes.
    pub fn ratio(&self) -> Option<C64> {
        (self.moyal.norm() > 0.0).then(|| self.fitted / self.moyal)
    }

    /// `|fitted - C·moyal| / |C·moyal|`, or `|fitted|` when the Moyal term
    /// vanishes.
    pub fn deviation(&self, constant: C64) -> f64 {
        let reference = self.moyal * constant;
        let diff = (self.fitted - reference).norm();
        if reference.norm() > 0.0 {
            diff / reference.norm()
        } else {
            diff
        }
    }
}

/// Fits the `1/k` expansion of `⟨T_{PF_{m1}} T_{PF_{m2}}, T_{PF_{m1+m2}}⟩ /
/// ⟨T_{PF_{m1+m2}}, T_{PF_{m1+m2}}⟩`, where `P = E_I` at `h = 1/k`.
pub fn trivialized_star_compare(
    p: &SiegelPoint,
    m1: &FourierMode,
    m2: &FourierMode,
    k_values: &[u32],
    order: usize,
    exec: Execution,
) -> Result<TrivializedStar> {
    let sum = m1 + m2;
    let samples: Vec<Result<C64>> = map_slice(exec, k_values, |&k| {
        let a = heat_rescaled_toeplitz(p, k, m1)?;
        let b = heat_rescaled_toeplitz(p, k, m2)?;
        let target = heat_rescaled_toeplitz(p, k, &sum)?;
        Ok(hs_inner(&a.compose(&b)?, &target)? / hs_inner(&target, &target)?)
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let kf: Vec<f64> = k_values.iter().map(|&k| k as f64).collect();
    let fit = fit_inverse_powers(&kf, &samples, order)?;

    let f = FormalFourierSeries::constant(FourierFunction::mode(m1.clone()), 1);
    let g = FormalFourierSeries::constant(FourierFunction::mode(m2.clone()), 1);
    let moyal = moyal_product(&f, &g, 1)?.coefficient(1).coefficient(&sum);
    Ok(TrivializedStar {
        fitted: fit.coefficients[1],
        moyal,
        condition: fit.condition,
    })
}

/// The rescaled operator equals the Toeplitz operator of the heat-rescaled
/// mode; exposed for cross-checks.
pub fn rescaled_defect(p: &SiegelPoint, k: u32, m: &FourierMode) -> Result<f64> {
    heat_rescaled_toeplitz(p, k, m)?.max_entry_diff(&rescaled_toeplitz(p, k, m)?)
}
