//! Abelian Chern–Simons curve operators on a genus-`g` surface.
//!
//! The moduli space of flat `U(1)`-connections is the torus
//! `H¹(Σ,R)/H¹(Σ,Z)` of dimension `2g`, and a closed curve with homology
//! class `Σ r_i a_i + s_i b_i` has holonomy function `F_{r,s}`. Its curve
//! operator at level `k` is the Toeplitz operator of the heat-flowed
//! holonomy function, which is the unitary `U_{r,s}` of [`crate::toeplitz`].
//! Curves are modeled by homology class only.

use crate::fit::log_log_order;
use crate::formal::heat_rescaled_toeplitz;
use crate::fourier::{FourierFunction, FourierMode};
use crate::parallel::{map_slice, Execution};
use crate::siegel::SiegelPoint;
use crate::toeplitz::{hs_inner, toeplitz_function, OperatorMatrix, ToeplitzSource};
use crate::{Error, Result, C64};

/// A closed surface of genus `g ≥ 1` with a symplectic homology basis
/// `a_1..a_g, b_1..b_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceData {
    genus: usize,
}

impl SurfaceData {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidArgument("genus must be at least 1".into()));
        }
        Ok(Self { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Labels of the homology basis, `a1..ag` then `b1..bg`.
    pub fn basis_labels(&self) -> Vec<String> {
        (1..=self.genus)
            .map(|i| format!("a{i}"))
            .chain((1..=self.genus).map(|i| format!("b{i}")))
            .collect()
    }
}

/// Homology class `Σ r_i a_i + s_i b_i` of an oriented curve (or of a link,
/// summing over components).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveClass {
    r: Vec<i64>,
    s: Vec<i64>,
}

impl CurveClass {
    pub fn new(r: Vec<i64>, s: Vec<i64>) -> Result<Self> {
        if r.len() != s.len() || r.is_empty() {
            return Err(Error::InvalidArgument(
                "curve coefficients need equal, nonzero lengths".into(),
            ));
        }
        Ok(Self { r, s })
    }

    pub fn empty(surface: &SurfaceData) -> Self {
        let g = surface.genus();
        Self {
            r: vec![0; g],
            s: vec![0; g],
        }
    }

    /// The cycle `a_i` (zero-based `i`).
    pub fn a_cycle(surface: &SurfaceData, i: usize) -> Result<Self> {
        let mut c = Self::empty(surface);
        *c.r.get_mut(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no cycle a{}", i + 1)))? = 1;
        Ok(c)
    }

    /// The cycle `b_i` (zero-based `i`).
    pub fn b_cycle(surface: &SurfaceData, i: usize) -> Result<Self> {
        let mut c = Self::empty(surface);
        *c.s.get_mut(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no cycle b{}", i + 1)))? = 1;
        Ok(c)
    }

    pub fn genus(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.iter().chain(&self.s).all(|&v| v == 0)
    }

    /// Opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            r: self.r.iter().map(|v| -v).collect(),
            s: self.s.iter().map(|v| -v).collect(),
        }
    }

    /// Disjoint union: holonomy functions multiply, so classes add. Only the
    /// homology class survives; linking between components is not modeled.
    pub fn union(&self, other: &CurveClass) -> Result<Self> {
        if other.genus() != self.genus() {
            return Err(Error::DimensionMismatch {
                expected: self.genus(),
                got: other.genus(),
            });
        }
        Ok(Self {
            r: self.r.iter().zip(&other.r).map(|(a, b)| a + b).collect(),
            s: self.s.iter().zip(&other.s).map(|(a, b)| a + b).collect(),
        })
    }
}

/// `h_γ = F_{r,s}`.
pub fn holonomy_mode(c: &CurveClass) -> FourierMode {
    FourierMode::new(c.r.clone(), c.s.clone())
}

/// `Z^{(k)}(γ) = T_{E_I(h_γ)}` with `E_I` evaluated at `h = 1/k`.
pub fn curve_operator(p: &SiegelPoint, k: u32, c: &CurveClass) -> Result<OperatorMatrix> {
    if c.genus() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: c.genus(),
        });
    }
    heat_rescaled_toeplitz(p, k, &holonomy_mode(c))
}

/// `k^{-g} ⟨Z^{(k)}(γ₁), Z^{(k)}(γ₂)⟩`.
pub fn curve_pairing(p: &SiegelPoint, k: u32, c1: &CurveClass, c2: &CurveClass) -> Result<C64> {
    let a = curve_operator(p, k, c1)?;
    let b = curve_operator(p, k, c2)?;
    Ok(hs_inner(&a, &b)? / (k as f64).powi(p.dim() as i32))
}

/// `Z^{(k)}(Σ × S¹, γ₁ ∪ γ₂*) = tr(Z^{(k)}(γ₁) Z^{(k)}(γ₂)*)`; a missing curve
/// is the empty one.
pub fn mapping_torus_invariant(
    p: &SiegelPoint,
    k: u32,
    c1: Option<&CurveClass>,
    c2: Option<&CurveClass>,
) -> Result<C64> {
    let surface = SurfaceData::new(p.dim())?;
    let empty = CurveClass::empty(&surface);
    let a = curve_operator(p, k, c1.unwrap_or(&empty))?;
    let b = curve_operator(p, k, c2.unwrap_or(&empty))?;
    hs_inner(&a, &b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingRow {
    pub k: u32,
    /// `k^{-n} ⟨T_f, T_g⟩`
    pub value: C64,
    /// `⟨f, g⟩ = Σ λ μ̄`
    pub parseval: C64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingLimit {
    pub rows: Vec<PairingRow>,
    /// Log-log order of the errors; `None` when they vanish.
    pub order: Option<f64>,
}

/// `k^{-n} ⟨T_f, T_g⟩ → ⟨f, g⟩` over a level sweep.
pub fn pairing_limit_experiment(
    p: &SiegelPoint,
    f: &FourierFunction,
    g: &FourierFunction,
    k_values: &[u32],
    exec: Execution,
) -> Result<PairingLimit> {
    let parseval = f.l2_inner(g);
    let rows = map_slice(exec, k_values, |&k| {
        let tf = toeplitz_function(p, k, f, ToeplitzSource::ClosedForm)?;
        let tg = toeplitz_function(p, k, g, ToeplitzSource::ClosedForm)?;
        let value = hs_inner(&tf, &tg)? / (k as f64).powi(p.dim() as i32);
        Ok(PairingRow {
            k,
            value,
            parseval,
            error: (value - parseval).norm(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    Ok(PairingLimit {
        order: log_log_order(&ks, &errors),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::toeplitz::rescaled_toeplitz;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn torus() -> SurfaceData {
        SurfaceData::new(1).unwrap()
    }

    #[test]
    fn holonomy_modes() {
        let s = torus();
        assert_eq!(
            holonomy_mode(&CurveClass::a_cycle(&s, 0).unwrap()),
            FourierMode::scalar(1, 0)
        );
        assert_eq!(
            holonomy_mode(&CurveClass::b_cycle(&s, 0).unwrap()),
            FourierMode::scalar(0, 1)
        );
        assert_eq!(
            holonomy_mode(&CurveClass::a_cycle(&s, 0).unwrap().reversed()),
            FourierMode::scalar(-1, 0)
        );
        assert!(CurveClass::a_cycle(&s, 1).is_err());
        assert!(SurfaceData::new(0).is_err());
        assert_eq!(
            SurfaceData::new(2).unwrap().basis_labels(),
            vec!["a1", "a2", "b1", "b2"]
        );
    }

    #[test]
    fn curve_operators_are_rescaled_shifts() {
        let s = torus();
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let q = SiegelPoint::scalar(c(1.0, 2.0)).unwrap();
        let empty = curve_operator(&p, 3, &CurveClass::empty(&s)).unwrap();
        assert!(max_abs_diff(empty.entries(), &crate::linalg::CMatrix::identity(3, 3)) < 1e-15);
        let a = CurveClass::a_cycle(&s, 0).unwrap();
        let shift = curve_operator(&p, 2, &a).unwrap();
        let expected = crate::linalg::CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        assert!(max_abs_diff(shift.entries(), &expected) < 1e-12);
        for k in 1..=6 {
            for class in [a.clone(), CurveClass::new(vec![2], vec![-1]).unwrap()] {
                let x = curve_operator(&p, k, &class).unwrap();
                let y = curve_operator(&q, k, &class).unwrap();
                assert!(x.max_entry_diff(&y).unwrap() < 1e-9);
                let u = rescaled_toeplitz(&p, k, &holonomy_mode(&class)).unwrap();
                assert!(x.max_entry_diff(&u).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn pairings_and_invariants() {
        let s = torus();
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let a = CurveClass::a_cycle(&s, 0).unwrap();
        let b = CurveClass::b_cycle(&s, 0).unwrap();
        for k in [1, 2, 5, 8] {
            assert!((curve_pairing(&p, k, &a, &a).unwrap() - 1.0).norm() < 1e-12);
            assert!(
                (mapping_torus_invariant(&p, k, Some(&a), Some(&a)).unwrap() - k as f64).norm()
                    < 1e-10
            );
        }
        assert!(curve_pairing(&p, 2, &a, &b).unwrap().norm() < 1e-15);
        assert!(
            mapping_torus_invariant(&p, 2, Some(&a), Some(&b))
                .unwrap()
                .norm()
                < 1e-15
        );
        assert_eq!(
            mapping_torus_invariant(&p, 5, None, None).unwrap(),
            c(5.0, 0.0)
        );
        let p2 = SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        for k in 1..=8 {
            assert_eq!(
                mapping_torus_invariant(&p2, k, None, None).unwrap(),
                c((k * k) as f64, 0.0)
            );
        }
        let union = a.union(&b).unwrap();
        assert_eq!(holonomy_mode(&union), FourierMode::scalar(1, 1));
    }

    #[test]
    fn pairing_limit_closed_form() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let f = FourierFunction::mode(FourierMode::scalar(1, 0));
        let ks = [8, 16, 32, 64, 128];
        let out = pairing_limit_experiment(&p, &f, &f, &ks, Execution::Parallel).unwrap();
        for row in &out.rows {
            let expected = 1.0 - (-PI / row.k as f64).exp();
            assert!((row.error - expected).abs() < 1e-10);
        }
        let g = FourierFunction::mode(FourierMode::scalar(0, 1));
        let out = pairing_limit_experiment(&p, &f, &g, &[2, 3, 4], Execution::Sequential).unwrap();
        assert!(out
            .rows
            .iter()
            .all(|r| r.value == c(0.0, 0.0) && r.error == 0.0));
        assert!(out.order.is_none());
        let one = FourierFunction::constant(1, c(1.0, 0.0));
        let out = pairing_limit_experiment(&p, &one, &one, &[1, 2], Execution::Sequential).unwrap();
        assert!(out.rows.iter().all(|r| r.error < 1e-15));
    }
}
