//! Pure phases and finite Fourier series on the torus `Rⁿ×Rⁿ / Zⁿ×Zⁿ`.
//!
//! The mode `(r, s)` is the function `F_{r,s}(x, y) = exp(2πi(x·r + s·y))`.
//! With the symplectic form `ω = Σ dx_i ∧ dy_i` the Poisson bracket of two
//! modes is again a mode:
//!
//! ```text
//! {F_{r,s}, F_{t,u}} = -4π² (r·u - s·t) F_{r+t, s+u}
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Integer frequency pair `(r, s) ∈ Zⁿ × Zⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourierMode {
    r: Vec<i64>,
    s: Vec<i64>,
}

impl FourierMode {
    /// # Panics
    /// If `r` and `s` have different lengths.
    pub fn new(r: Vec<i64>, s: Vec<i64>) -> Self {
        assert_eq!(r.len(), s.len(), "r and s must have the same length");
        Self { r, s }
    }

    /// One-dimensional mode `(r, s)`.
    pub fn scalar(r: i64, s: i64) -> Self {
        Self::new(vec![r], vec![s])
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n], vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[i64] {
        &self.r
    }

    pub fn s(&self) -> &[i64] {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().chain(&self.s).all(|&v| v == 0)
    }

    /// `r·u - s·t` for `self = (r, s)` and `other = (t, u)`.
    pub fn symplectic_pairing(&self, other: &FourierMode) -> i64 {
        assert_eq!(self.dim(), other.dim());
        let ru: i64 = self.r.iter().zip(&other.s).map(|(a, b)| a * b).sum();
        let st: i64 = self.s.iter().zip(&other.r).map(|(a, b)| a * b).sum();
        ru - st
    }

    /// Largest absolute entry of `r` and `s`.
    pub fn max_abs_entry(&self) -> u64 {
        self.r
            .iter()
            .chain(&self.s)
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn r_f64(&self) -> Vec<f64> {
        self.r.iter().map(|&v| v as f64).collect()
    }

    pub fn s_f64(&self) -> Vec<f64> {
        self.s.iter().map(|&v| v as f64).collect()
    }

    /// `F_{r,s}(x, y)`.
    pub fn phase(&self, x: &[f64], y: &[f64]) -> C64 {
        let t: f64 = self
            .r
            .iter()
            .zip(x)
            .map(|(&r, x)| r as f64 * x)
            .sum::<f64>()
            + self
                .s
                .iter()
                .zip(y)
                .map(|(&s, y)| s as f64 * y)
                .sum::<f64>();
        // Reduce before scaling so large coordinates keep their periodicity.
        C64::from_polar(1.0, 2.0 * PI * (t - t.round()))
    }

    /// All modes with every entry in `-bound..=bound`, in lexicographic order.
    pub fn all_within(n: usize, bound: i64) -> Vec<FourierMode> {
        let width = (2 * bound + 1) as usize;
        let total = width.pow(2 * n as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut entries = vec![0i64; 2 * n];
            for e in entries.iter_mut().rev() {
                *e = (rest % width) as i64 - bound;
                rest /= width;
            }
            let s = entries.split_off(n);
            out.push(FourierMode::new(entries, s));
        }
        out
    }
}

impl Add for &FourierMode {
    type Output = FourierMode;

    fn add(self, rhs: &FourierMode) -> FourierMode {
        assert_eq!(self.dim(), rhs.dim());
        FourierMode {
            r: self.r.iter().zip(&rhs.r).map(|(a, b)| a + b).collect(),
            s: self.s.iter().zip(&rhs.s).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Neg for &FourierMode {
    type Output = FourierMode;

    fn neg(self) -> FourierMode {
        FourierMode {
            r: self.r.iter().map(|v| -v).collect(),
            s: self.s.iter().map(|v| -v).collect(),
        }
    }
}

impl fmt::Display for FourierMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "({}; {})", join(&self.r), join(&self.s))
    }
}

/// Finite combination `Σ λ_{r,s} F_{r,s}`.
///
/// Terms are kept in a `BTreeMap` so iteration order, and hence every sum
/// built from it, is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFunction {
    n: usize,
    terms: BTreeMap<FourierMode, C64>,
}

impl FourierFunction {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut f = Self::zero(n);
        f.add_term(FourierMode::zero(n), c);
        f
    }

    pub fn mode(m: FourierMode) -> Self {
        let mut f = Self::zero(m.dim());
        f.add_term(m, C64::new(1.0, 0.0));
        f
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (FourierMode, C64)>,
    {
        let mut f = Self::zero(n);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    /// `2 cos(2π x_i)` style helper: `F_m + F_{-m}`.
    pub fn cosine(m: &FourierMode) -> Self {
        let one = C64::new(1.0, 0.0);
        Self::from_terms(m.dim(), [(m.clone(), one), (-m, one)])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `c` to the coefficient of `m`; exact zeros are dropped.
    pub fn add_term(&mut self, m: FourierMode, c: C64) {
        assert_eq!(m.dim(), self.n, "mode dimension mismatch");
        let entry = self.terms.entry(m).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FourierMode, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &FourierMode) -> C64 {
        self.terms.get(m).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops coefficients with magnitude at or below `threshold`.
    pub fn pruned(mut self, threshold: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > threshold);
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
        .pruned(0.0)
    }

    /// Pointwise complex conjugate: `conj(λ_{r,s}) F_{-r,-s}`.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (-m, v.conj())).collect(),
        }
    }

    /// Real-valued iff `λ_{-r,-s} = conj(λ_{r,s})` for every stored mode.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|(m, v)| (self.coefficient(&-m) - v.conj()).norm() <= tol)
    }

    pub fn max_mode_entry(&self) -> u64 {
        self.terms
            .keys()
            .map(FourierMode::max_abs_entry)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        self.terms.iter().map(|(m, c)| c * m.phase(x, y)).sum()
    }

    /// `Σ λ_{r,s} conj(μ_{r,s})`, the normalized `L²` pairing on the torus.
    pub fn l2_inner(&self, other: &FourierFunction) -> C64 {
        self.terms
            .iter()
            .map(|(m, c)| c * other.coefficient(m).conj())
            .sum()
    }

    /// Coefficient-wise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &FourierFunction, tol: f64) -> bool {
        self.n == other.n
            && self
                .terms
                .keys()
                .chain(other.terms.keys())
                .all(|m| (self.coefficient(m) - other.coefficient(m)).norm() <= tol)
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_coefficient_diff(&self, other: &FourierFunction) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|m| (self.coefficient(m) - other.coefficient(m)).norm())
            .fold(0.0, f64::max)
    }

    /// `sup |f|` over the uniform grid with `points` nodes per coordinate
    /// on `[0,1)^{2n}`.
    ///
    /// Phases are looked up in a table of `points`-th roots of unity, so the
    /// evaluation is exact up to rounding for every mode.
    pub fn sup_abs_on_grid(&self, points: usize) -> f64 {
        assert!(points > 0);
        let roots: Vec<C64> = (0..points)
            .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64))
            .collect();
        let n = self.n;
        // Coordinates that no mode depends on can be fixed at zero.
        let active: Vec<usize> = (0..2 * n)
            .filter(|&d| {
                self.terms
                    .keys()
                    .any(|m| if d < n { m.r[d] != 0 } else { m.s[d - n] != 0 })
            })
            .collect();
        let nodes = points.pow(active.len() as u32);
        let terms: Vec<(Vec<i64>, C64)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let freq: Vec<i64> = active
                    .iter()
                    .map(|&d| if d < n { m.r[d] } else { m.s[d - n] })
                    .collect();
                (freq, *c)
            })
            .collect();
        let mut sup = 0.0f64;
        let mut idx = vec![0usize; active.len()];
        for _ in 0..nodes {
            let mut v = C64::new(0.0, 0.0);
            for (freq, c) in &terms {
                let mut phase = 0i64;
                for (f, &i) in freq.iter().zip(&idx) {
                    phase += f * i as i64;
                }
                v += c * roots[phase.rem_euclid(points as i64) as usize];
            }
            sup = sup.max(v.norm());
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < points {
                    break;
                }
                *slot = 0;
            }
        }
        sup
    }
}

impl Add for &FourierFunction {
    type Output = FourierFunction;

    fn add(self, rhs: &FourierFunction) -> FourierFunction {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &FourierFunction {
    type Output = FourierFunction;

    fn sub(self, rhs: &FourierFunction) -> FourierFunction {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

/// Pointwise product (convolution of coefficients).
impl Mul for &FourierFunction {
    type Output = FourierFunction;

    fn mul(self, rhs: &FourierFunction) -> FourierFunction {
        assert_eq!(self.n, rhs.n);
        let mut out = FourierFunction::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1 + m2, c1 * c2);
            }
        }
        out
    }
}

/// Poisson bracket for `ω = Σ dx_i ∧ dy_i`, i.e. `{f,g} = Σ ∂x f ∂y g - ∂y f ∂x g`.
pub fn poisson_bracket(f: &FourierFunction, g: &FourierFunction) -> FourierFunction {
    assert_eq!(f.dim(), g.dim());
    let mut out = FourierFunction::zero(f.dim());
    for (m1, c1) in f.terms() {
        for (m2, c2) in g.terms() {
            let w = m1.symplectic_pairing(m2);
            if w != 0 {
                out.add_term(m1 + m2, c1 * c2 * (-4.0 * PI * PI * w as f64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_evaluates_to_one() {
        let f = FourierFunction::constant(2, c(1.0, 0.0));
        assert_eq!(f.eval(&[0.3, 0.7], &[0.1, 0.9]), c(1.0, 0.0));
    }

    #[test]
    fn quarter_turn_is_i() {
        let f = FourierFunction::mode(FourierMode::scalar(1, 0));
        let v = f.eval(&[0.25], &[0.77]);
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn periodic_in_each_coordinate() {
        let f = FourierFunction::from_terms(
            1,
            [
                (FourierMode::scalar(3, -2), c(0.5, 0.1)),
                (FourierMode::scalar(-1, 4), c(-0.2, 1.0)),
            ],
        );
        let a = f.eval(&[0.123], &[0.456]);
        assert!((f.eval(&[1.123], &[0.456]) - a).norm() < 1e-14);
        assert!((f.eval(&[0.123], &[1.456]) - a).norm() < 1e-14);
    }

    #[test]
    fn bracket_of_basic_modes() {
        let f = FourierFunction::mode(FourierMode::scalar(1, 0));
        let g = FourierFunction::mode(FourierMode::scalar(0, 1));
        let b = poisson_bracket(&f, &g);
        let expected =
            FourierFunction::from_terms(1, [(FourierMode::scalar(1, 1), c(-4.0 * PI * PI, 0.0))]);
        assert!(b.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn bracket_vanishes_on_parallel_modes() {
        let f = FourierFunction::mode(FourierMode::scalar(1, 2));
        let g = FourierFunction::mode(FourierMode::scalar(2, 4));
        assert!(poisson_bracket(&f, &g).is_empty());
    }

    #[test]
    fn bracket_matches_derivatives_pointwise() {
        // {f,g} = f_x g_y - f_y g_x, with derivatives by central differences.
        let f = FourierFunction::from_terms(1, [(FourierMode::scalar(1, 2), c(0.3, -0.4))]);
        let g = FourierFunction::from_terms(1, [(FourierMode::scalar(-2, 1), c(1.1, 0.2))]);
        let (x, y, h) = (0.31, 0.67, 1e-5);
        let dx =
            |q: &FourierFunction| (q.eval(&[x + h], &[y]) - q.eval(&[x - h], &[y])) / (2.0 * h);
        let dy =
            |q: &FourierFunction| (q.eval(&[x], &[y + h]) - q.eval(&[x], &[y - h])) / (2.0 * h);
        let fd = dx(&f) * dy(&g) - dy(&f) * dx(&g);
        let exact = poisson_bracket(&f, &g).eval(&[x], &[y]);
        assert!((fd - exact).norm() < 1e-5 * exact.norm());
    }

    #[test]
    fn sup_of_cosine() {
        let f = FourierFunction::cosine(&FourierMode::scalar(1, 0));
        assert!((f.sup_abs_on_grid(2048) - 2.0).abs() < 1e-6);
        assert!(f.is_real(0.0));
    }

    #[test]
    fn prune_and_conj() {
        let f = FourierFunction::from_terms(
            1,
            [
                (FourierMode::scalar(1, 0), c(1e-20, 0.0)),
                (FourierMode::scalar(0, 1), c(0.0, 2.0)),
            ],
        )
        .pruned(1e-15);
        assert_eq!(f.len(), 1);
        assert_eq!(
            f.conj().coefficient(&FourierMode::scalar(0, -1)),
            c(0.0, -2.0)
        );
        assert!(!f.is_real(1e-12));
    }

    fn mode_strategy() -> impl Strategy<Value = FourierMode> {
        (-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2)
            .prop_map(|(a, b, c, d)| FourierMode::new(vec![a, b], vec![c, d]))
    }

    proptest! {
        #[test]
        fn bracket_is_antisymmetric(m1 in mode_strategy(), m2 in mode_strategy()) {
            let f = FourierFunction::mode(m1);
            let g = FourierFunction::mode(m2);
            let sum = &poisson_bracket(&f, &g) + &poisson_bracket(&g, &f);
            prop_assert!(sum.approx_eq(&FourierFunction::zero(2), 1e-10));
        }

        #[test]
        fn bracket_satisfies_jacobi(m1 in mode_strategy(), m2 in mode_strategy(), m3 in mode_strategy()) {
            let (f, g, h) = (FourierFunction::mode(m1), FourierFunction::mode(m2), FourierFunction::mode(m3));
            let j = &(&poisson_bracket(&f, &poisson_bracket(&g, &h))
                + &poisson_bracket(&g, &poisson_bracket(&h, &f)))
                + &poisson_bracket(&h, &poisson_bracket(&f, &g));
            // Terms are O((4π²·8)²) ≈ 1e5; Jacobi cancels them exactly up to rounding.
            prop_assert!(j.approx_eq(&FourierFunction::zero(2), 1e-10 * 1e5));
        }

        #[test]
        fn product_is_pointwise(m1 in mode_strategy(), m2 in mode_strategy(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let f = FourierFunction::from_terms(2, [(m1, c(0.5, 0.25))]);
            let g = FourierFunction::from_terms(2, [(m2, c(-1.0, 2.0))]);
            let pt = ([x, 1.0 - x], [y, 0.5 * y]);
            let lhs = (&f * &g).eval(&pt.0, &pt.1);
            let rhs = f.eval(&pt.0, &pt.1) * g.eval(&pt.0, &pt.1);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
