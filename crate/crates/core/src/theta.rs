//! Level-`k` theta functions
//!
//! ```text
//! θ_α(z, Z) = Σ_{l ∈ Zⁿ} exp(πik (l+α)·Z(l+α) + 2πik (l+α)·z),   α ∈ (1/k)Zⁿ/Zⁿ
//! ```
//!
//! evaluated by truncated lattice sums. Writing `y = Y⁻¹ Im z`, the modulus
//! of the term at `m = l + α` is
//!
//! ```text
//! exp(πk y·Yy) · exp(-πk (m+y)·Y(m+y))
//! ```
//!
//! so the sum is centered at `m = -y` and cut at `|m + y| ≤ R`. The tail
//! bound is stated relative to the envelope `exp(πk y·Yy)`, which is also the
//! natural scale of `|θ|` (it is exactly cancelled by the Hermitian weight
//! `h^{k/2}`).

use std::f64::consts::PI;

use crate::siegel::SiegelPoint;
use crate::{Error, Result, C64};

/// `α = a / k` with `0 ≤ a_i < k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaLabel {
    k: u32,
    a: Vec<u32>,
}

impl ThetaLabel {
    pub fn new(k: u32, a: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLevel);
        }
        if let Some(&bad) = a.iter().find(|&&v| v >= k) {
            return Err(Error::InvalidArgument(format!(
                "label entry {bad} out of range 0..{k}"
            )));
        }
        Ok(Self { k, a })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn numerators(&self) -> &[u32] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn alpha(&self) -> Vec<f64> {
        self.a.iter().map(|&v| v as f64 / self.k as f64).collect()
    }

    /// Position in [`theta_basis`] order.
    pub fn index(&self) -> usize {
        self.a
            .iter()
            .fold(0usize, |acc, &v| acc * self.k as usize + v as usize)
    }

    pub fn from_index(k: u32, n: usize, mut index: usize) -> Self {
        let mut a = vec![0u32; n];
        for slot in a.iter_mut().rev() {
            *slot = (index % k as usize) as u32;
            index /= k as usize;
        }
        Self { k, a }
    }
}

/// The `kⁿ` labels in lexicographic order of `a`.
pub fn theta_basis(k: u32, n: usize) -> Result<Vec<ThetaLabel>> {
    if k == 0 {
        return Err(Error::InvalidLevel);
    }
    let dim = frame_dimension(k, n)?;
    Ok((0..dim).map(|i| ThetaLabel::from_index(k, n, i)).collect())
}

/// `kⁿ`, refusing sizes beyond the dense limit.
pub fn frame_dimension(k: u32, n: usize) -> Result<usize> {
    let dim = (k as usize)
        .checked_pow(n as u32)
        .ok_or(Error::TooLarge(usize::MAX))?;
    if dim > crate::linalg::MAX_DENSE_DIM {
        return Err(Error::TooLarge(dim));
    }
    Ok(dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeSelector {
    Value,
    /// `∂/∂z_i`
    Dz(usize),
    /// `∂²/∂z_i∂z_j`
    Dz2(usize, usize),
    /// `∂/∂Z_ij`, symmetric convention (`Z_ij` and `Z_ji` move together).
    DZ(usize, usize),
}

impl DerivativeSelector {
    /// Degree of the polynomial factor in `m` that the derivative brings down.
    fn degree(&self) -> u32 {
        match self {
            DerivativeSelector::Value => 0,
            DerivativeSelector::Dz(_) => 1,
            DerivativeSelector::Dz2(..) | DerivativeSelector::DZ(..) => 2,
        }
    }

    fn max_index(&self) -> Option<usize> {
        match *self {
            DerivativeSelector::Value => None,
            DerivativeSelector::Dz(i) => Some(i),
            DerivativeSelector::Dz2(i, j) | DerivativeSelector::DZ(i, j) => Some(i.max(j)),
        }
    }

    fn multiplier(&self, k: f64, m: &[f64]) -> C64 {
        let ik = C64::new(0.0, PI * k);
        match *self {
            DerivativeSelector::Value => C64::new(1.0, 0.0),
            DerivativeSelector::Dz(i) => ik * 2.0 * m[i],
            DerivativeSelector::Dz2(i, j) => ik * ik * 4.0 * m[i] * m[j],
            DerivativeSelector::DZ(i, j) => {
                let sym = if i == j { 1.0 } else { 2.0 };
                ik * m[i] * m[j] * sym
            }
        }
    }
}

/// Certified truncation of the lattice sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolicy {
    /// Tail bound relative to the envelope `exp(πk y·Yy)`.
    pub epsilon: f64,
    /// Cut-off on `|m + y|`.
    pub radius: f64,
    pub k: u32,
    pub n: usize,
    /// `λ_min(Y)` the bound was computed for; any point with at least this
    /// smallest eigenvalue is covered.
    pub lambda_min: f64,
    degree: u32,
}

/// Bound on `|y|` assumed by the polynomial factor of derivative tails:
/// the fundamental domain and its immediate lattice neighbours.
fn y_bound(n: usize) -> f64 {
    2.0 * (n as f64).sqrt()
}

/// Upper bound on `Σ_{|m+y| > R} |m|^d exp(-πkλ|m+y|²)` over the shifted
/// lattice `(1/k)`-cosets.
///
/// Lattice points with `|m + y| ∈ [ρ, ρ+1)` number at most `(2ρ + 3)ⁿ` for a
/// unit lattice, and each contributes at most `(ρ + 1 + |y|)^d e^{-πkλρ²}`.
fn tail_bound(n: usize, k: u32, lambda_min: f64, degree: u32, radius: f64) -> f64 {
    let decay = PI * k as f64 * lambda_min;
    let mut total = 0.0;
    for j in 0..10_000 {
        let rho = radius + j as f64;
        let count = (2.0 * rho + 3.0).powi(n as i32);
        let poly = (rho + 1.0 + y_bound(n)).powi(degree as i32);
        let term = count * poly * (-decay * rho * rho).exp();
        total += term;
        if term < 1e-300 || (j > 0 && term < total * 1e-17) {
            break;
        }
    }
    total
}

/// Smallest radius (on a `1/40` grid) whose tail bound is below `epsilon`.
pub fn truncation_radius(
    p: &SiegelPoint,
    k: u32,
    epsilon: f64,
    sel: DerivativeSelector,
) -> Result<TruncationPolicy> {
    if k == 0 {
        return Err(Error::InvalidLevel);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let n = p.dim();
    let degree = sel.degree();
    let lambda_min = p.lambda_min();
    let mut radius = 0.25;
    while tail_bound(n, k, lambda_min, degree, radius) >= epsilon {
        radius += 0.025;
    }
    Ok(TruncationPolicy {
        epsilon,
        radius,
        k,
        n,
        lambda_min,
        degree,
    })
}

impl TruncationPolicy {
    fn check(&self, p: &SiegelPoint, k: u32, sel: &DerivativeSelector) -> Result<()> {
        if self.k != k {
            return Err(Error::PolicyMismatch(format!(
                "policy level {} used at level {k}",
                self.k
            )));
        }
        if self.n != p.dim() {
            return Err(Error::PolicyMismatch(format!(
                "policy dimension {} used at dimension {}",
                self.n,
                p.dim()
            )));
        }
        if p.lambda_min() < self.lambda_min * (1.0 - 1e-12) {
            return Err(Error::PolicyMismatch(format!(
                "policy certified for λ_min(Y) ≥ {}, point has {}",
                self.lambda_min,
                p.lambda_min()
            )));
        }
        if sel.degree() > self.degree {
            return Err(Error::PolicyMismatch(
                "policy does not cover this derivative order".into(),
            ));
        }
        if let Some(i) = sel.max_index() {
            if i >= p.dim() {
                return Err(Error::InvalidArgument(format!(
                    "derivative index {} out of range",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Integer vectors `j` with `|j/k + y| ≤ radius`, lexicographic.
pub(crate) fn lattice_window(k: u32, y: &[f64], radius: f64) -> Vec<Vec<i64>> {
    let kf = k as f64;
    let ranges: Vec<(i64, i64)> = y
        .iter()
        .map(|&yi| {
            (
                (kf * (-yi - radius)).ceil() as i64,
                (kf * (-yi + radius)).floor() as i64,
            )
        })
        .collect();
    let mut out = Vec::new();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return out;
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let r2 = radius * radius;
    loop {
        let d2: f64 = cur
            .iter()
            .zip(y)
            .map(|(&j, &yi)| (j as f64 / kf + yi).powi(2))
            .sum();
        if d2 <= r2 {
            out.push(cur.clone());
        }
        let mut d = cur.len();
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            if cur[d] < ranges[d].1 {
                cur[d] += 1;
                break;
            }
            cur[d] = ranges[d].0;
        }
    }
}

/// `exp(πik m·Zm + 2πik m·z - shift)`.
pub(crate) fn lattice_term(p: &SiegelPoint, k: f64, m: &[f64], z: &[C64], shift: f64) -> C64 {
    let n = m.len();
    let zm = p.z();
    let mut quad = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            quad += zm[(i, j)] * (m[i] * m[j]);
        }
    }
    let lin: C64 = m.iter().zip(z).map(|(mi, zi)| zi * *mi).sum();
    let expo = C64::new(0.0, PI * k) * (quad + lin * 2.0) - shift;
    expo.exp()
}

fn check_point(p: &SiegelPoint, label: &ThetaLabel, z: &[C64]) -> Result<()> {
    if label.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: label.dim(),
        });
    }
    if z.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: z.len(),
        });
    }
    Ok(())
}

/// Terms `(m, term)` of the truncated sum for one label, in lattice order.
fn label_terms(
    p: &SiegelPoint,
    label: &ThetaLabel,
    z: &[C64],
    radius: f64,
) -> Vec<(Vec<f64>, C64)> {
    let k = label.k();
    let y = p.y_coordinates(z);
    let kf = k as f64;
    lattice_window(k, &y, radius)
        .into_iter()
        .filter(|j| {
            j.iter()
                .zip(label.numerators())
                .all(|(&ji, &a)| ji.rem_euclid(k as i64) == a as i64)
        })
        .map(|j| {
            let m: Vec<f64> = j.iter().map(|&v| v as f64 / kf).collect();
            let t = lattice_term(p, kf, &m, z, 0.0);
            (m, t)
        })
        .collect()
}

/// `θ_α^{(k)}` or one of its derivatives at `z`.
pub fn theta_eval(
    p: &SiegelPoint,
    label: &ThetaLabel,
    z: &[C64],
    sel: DerivativeSelector,
    policy: &TruncationPolicy,
) -> Result<C64> {
    check_point(p, label, z)?;
    policy.check(p, label.k(), &sel)?;
    let kf = label.k() as f64;
    Ok(label_terms(p, label, z, policy.radius)
        .iter()
        .map(|(m, t)| t * sel.multiplier(kf, m))
        .sum())
}

/// Values of every frame element at `z`, in [`theta_basis`] order.
pub fn theta_frame(
    p: &SiegelPoint,
    k: u32,
    z: &[C64],
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    let n = p.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    policy.check(p, k, &DerivativeSelector::Value)?;
    let dim = frame_dimension(k, n)?;
    let y = p.y_coordinates(z);
    let kf = k as f64;
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for j in lattice_window(k, &y, policy.radius) {
        let m: Vec<f64> = j.iter().map(|&v| v as f64 / kf).collect();
        let idx = j.iter().fold(0usize, |acc, &v| {
            acc * k as usize + v.rem_euclid(k as i64) as usize
        });
        out[idx] += lattice_term(p, kf, &m, z, 0.0);
    }
    Ok(out)
}

/// A residual together with the magnitude it should be judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            self.value
        }
    }
}

/// Heat-equation factor `(2 - δ_ij) / (4πik)` relating `∂²/∂z_i∂z_j` to the
/// symmetric `∂/∂Z_ij`.
fn heat_factor(k: f64, i: usize, j: usize) -> C64 {
    let sym = if i == j { 1.0 } else { 2.0 };
    C64::new(sym, 0.0) / C64::new(0.0, 4.0 * PI * k)
}

/// `|∂θ/∂Z_ij - ((2-δ_ij)/4πik) ∂²θ/∂z_i∂z_j|` on one truncation set.
///
/// The scale is `Σ |terms of ∂θ/∂Z_ij|`, the size of what cancels.
pub fn heat_residual(
    p: &SiegelPoint,
    label: &ThetaLabel,
    z: &[C64],
    i: usize,
    j: usize,
    policy: &TruncationPolicy,
) -> Result<Residual> {
    check_point(p, label, z)?;
    let d_big = DerivativeSelector::DZ(i, j);
    let d_small = DerivativeSelector::Dz2(i, j);
    policy.check(p, label.k(), &d_big)?;
    let kf = label.k() as f64;
    let factor = heat_factor(kf, i, j);
    let mut lhs = C64::new(0.0, 0.0);
    let mut rhs = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (m, t) in label_terms(p, label, z, policy.radius) {
        let a = t * d_big.multiplier(kf, &m);
        lhs += a;
        rhs += t * d_small.multiplier(kf, &m) * factor;
        scale += a.norm();
    }
    Ok(Residual {
        value: (lhs - rhs).norm(),
        scale,
    })
}

/// Heat residual with `∂/∂Z_ij` replaced by the five-point central
/// difference of step `step` along the real direction `Δ_ij` (θ is
/// holomorphic in `Z`). The scale sums `|θ term| + |∂_Z term|`.
pub fn heat_residual_fd(
    p: &SiegelPoint,
    label: &ThetaLabel,
    z: &[C64],
    i: usize,
    j: usize,
    policy: &TruncationPolicy,
    step: f64,
) -> Result<Residual> {
    check_point(p, label, z)?;
    let sel = DerivativeSelector::Dz2(i, j);
    policy.check(p, label.k(), &sel)?;
    let value_at = |t: f64| -> Result<C64> {
        let q = p.perturbed(i, j, C64::new(t, 0.0))?;
        let pol = truncation_radius(&q, label.k(), policy.epsilon, DerivativeSelector::Value)?;
        theta_eval(&q, label, z, DerivativeSelector::Value, &pol)
    };
    let fd = (value_at(-2.0 * step)? - value_at(2.0 * step)?
        + (value_at(step)? - value_at(-step)?) * 8.0)
        / (12.0 * step);
    let kf = label.k() as f64;
    let rhs = theta_eval(p, label, z, sel, policy)? * heat_factor(kf, i, j);
    // Rounding in the stencil scales with |θ|/h, so θ's own terms enter the
    // scale next to the derivative terms.
    let big = DerivativeSelector::DZ(i, j);
    let scale: f64 = label_terms(p, label, z, policy.radius)
        .iter()
        .map(|(m, t)| (t * big.multiplier(kf, m)).norm() + t.norm())
        .sum();
    Ok(Residual {
        value: (fd - rhs).norm(),
        scale,
    })
}

/// Quasi-periodicity under the lattice generator `lattice_index`
/// (`0..n`: `e_i`; `n..2n`: `Z e_{i-n}`):
///
/// ```text
/// θ(z + e_i)   = θ(z)
/// θ(z + Z e_i) = exp(-2πi z_i - πi Z_ii)^k θ(z)
/// ```
pub fn quasi_periodicity_residual(
    p: &SiegelPoint,
    label: &ThetaLabel,
    z: &[C64],
    lattice_index: usize,
    policy: &TruncationPolicy,
) -> Result<Residual> {
    check_point(p, label, z)?;
    let n = p.dim();
    if lattice_index >= 2 * n {
        return Err(Error::InvalidArgument(format!(
            "lattice index {lattice_index} out of range 0..{}",
            2 * n
        )));
    }
    let sel = DerivativeSelector::Value;
    let base = theta_eval(p, label, z, sel, policy)?;
    let (shifted, rhs) = if lattice_index < n {
        let mut zs = z.to_vec();
        zs[lattice_index] += 1.0;
        (theta_eval(p, label, &zs, sel, policy)?, base)
    } else {
        let i = lattice_index - n;
        let zs: Vec<C64> = (0..n).map(|a| z[a] + p.z()[(a, i)]).collect();
        let mult = (C64::new(0.0, -2.0 * PI) * z[i] - C64::new(0.0, PI) * p.z()[(i, i)])
            * label.k() as f64;
        (theta_eval(p, label, &zs, sel, policy)?, mult.exp() * base)
    };
    Ok(Residual {
        value: (shifted - rhs).norm(),
        scale: shifted.norm().max(rhs.norm()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent oracle: plain one-dimensional sum over |l| ≤ 20 with
    /// Neumaier compensation.
    fn oracle_1d(k: f64, alpha: f64, z: C64, tau: C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        let mut comp = C64::new(0.0, 0.0);
        for l in -20..=20 {
            let m = l as f64 + alpha;
            let t = (C64::new(0.0, PI * k) * (tau * m * m + z * 2.0 * m)).exp();
            let s = sum + t;
            for (part_s, part_sum, part_t) in
                [(&mut comp.re, sum.re, t.re), (&mut comp.im, sum.im, t.im)]
            {
                let total = if part_sum.abs() >= part_t.abs() {
                    (part_sum - (part_sum + part_t)) + part_t
                } else {
                    (part_t - (part_sum + part_t)) + part_sum
                };
                *part_s += total;
            }
            sum = s;
        }
        sum + comp
    }

    fn policy(p: &SiegelPoint, k: u32, sel: DerivativeSelector) -> TruncationPolicy {
        truncation_radius(p, k, 1e-15, sel).unwrap()
    }

    #[test]
    fn jacobi_theta3_at_i() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let label = ThetaLabel::new(1, vec![0]).unwrap();
        let v = theta_eval(
            &p,
            &label,
            &[c(0.0, 0.0)],
            DerivativeSelector::Value,
            &policy(&p, 1, DerivativeSelector::Value),
        )
        .unwrap();
        // θ₃(0|i) = π^{1/4}/Γ(3/4)
        assert!((v - c(1.086434811213308, 0.0)).norm() < 1e-14);
        assert!((v - oracle_1d(1.0, 0.0, c(0.0, 0.0), c(0.0, 1.0))).norm() < 1e-14);
    }

    #[test]
    fn large_imaginary_part_leaves_constant_term() {
        let p = SiegelPoint::scalar(c(0.0, 50.0)).unwrap();
        let label = ThetaLabel::new(1, vec![0]).unwrap();
        let v = theta_eval(
            &p,
            &label,
            &[c(0.0, 0.0)],
            DerivativeSelector::Value,
            &policy(&p, 1, DerivativeSelector::Value),
        )
        .unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn level_two_half_characteristic() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let label = ThetaLabel::new(2, vec![1]).unwrap();
        let v = theta_eval(
            &p,
            &label,
            &[c(0.0, 0.0)],
            DerivativeSelector::Value,
            &policy(&p, 2, DerivativeSelector::Value),
        )
        .unwrap();
        let oracle = oracle_1d(2.0, 0.5, c(0.0, 0.0), c(0.0, 1.0));
        assert!(
            (oracle.re - 0.415_760_602_596_027).abs() < 1e-14,
            "{oracle}"
        );
        assert!((v - oracle).norm() < 1e-14);
    }

    #[test]
    fn agrees_with_oracle_off_axis() {
        let p = SiegelPoint::scalar(c(0.4, 0.7)).unwrap();
        for k in [1u32, 2, 3, 5] {
            for a in 0..k {
                let label = ThetaLabel::new(k, vec![a]).unwrap();
                let z = c(0.31, 0.45);
                let sel = DerivativeSelector::Value;
                let v = theta_eval(&p, &label, &[z], sel, &policy(&p, k, sel)).unwrap();
                let o = oracle_1d(k as f64, a as f64 / k as f64, z, c(0.4, 0.7));
                assert!((v - o).norm() < 1e-13 * o.norm().max(1.0), "k={k} a={a}");
            }
        }
    }

    #[test]
    fn radius_examples() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let pol = truncation_radius(&p, 1, 1e-14, DerivativeSelector::Value).unwrap();
        assert!((3.0..=4.5).contains(&pol.radius), "radius {}", pol.radius);
        let mut last = f64::INFINITY;
        for k in 1..10 {
            let r = truncation_radius(&p, k, 1e-14, DerivativeSelector::Value)
                .unwrap()
                .radius;
            assert!(r <= last);
            last = r;
        }
        let r1 = truncation_radius(&p, 3, 1e-10, DerivativeSelector::Value)
            .unwrap()
            .radius;
        let r2 = truncation_radius(&p, 3, 0.5e-10, DerivativeSelector::Value)
            .unwrap()
            .radius;
        assert!(r2 >= r1);
    }

    #[test]
    fn explicit_tail_is_below_bound() {
        // Direct summation of the discarded terms for Y = 1, k = 1, y = 0.
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let pol = truncation_radius(&p, 1, 1e-14, DerivativeSelector::Value).unwrap();
        let tail: f64 = (-60i64..=60)
            .map(|l| l as f64)
            .filter(|m| m.abs() > pol.radius)
            .map(|m| (-PI * m * m).exp())
            .sum();
        assert!(tail < 1e-14);
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(theta_basis(1, 1).unwrap().len(), 1);
        let b = theta_basis(3, 1).unwrap();
        assert_eq!(
            b.iter().map(|l| l.alpha()[0]).collect::<Vec<_>>(),
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0]
        );
        let b = theta_basis(2, 2).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[1].numerators(), &[0, 1]);
        for (i, l) in b.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
        assert!(matches!(theta_basis(0, 1), Err(Error::InvalidLevel)));
        assert!(matches!(theta_basis(65, 2), Err(Error::TooLarge(_))));
    }

    #[test]
    fn frame_matches_individual_labels() {
        let p = SiegelPoint::diagonal(&[c(0.2, 1.0), c(0.0, 1.5)]).unwrap();
        let k = 3;
        let pol = policy(&p, k, DerivativeSelector::Value);
        let z = [c(0.1, 0.4), c(-0.3, 0.9)];
        let frame = theta_frame(&p, k, &z, &pol).unwrap();
        for label in theta_basis(k, 2).unwrap() {
            let v = theta_eval(&p, &label, &z, DerivativeSelector::Value, &pol).unwrap();
            assert!((frame[label.index()] - v).norm() < 1e-13 * v.norm().max(1.0));
        }
    }

    #[test]
    fn policy_mismatch_is_refused() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let pol = policy(&p, 2, DerivativeSelector::Value);
        let label = ThetaLabel::new(3, vec![0]).unwrap();
        assert!(matches!(
            theta_eval(&p, &label, &[c(0.0, 0.0)], DerivativeSelector::Value, &pol),
            Err(Error::PolicyMismatch(_))
        ));
        let label = ThetaLabel::new(2, vec![0]).unwrap();
        let narrower = SiegelPoint::scalar(c(0.0, 0.5)).unwrap();
        assert!(theta_eval(
            &narrower,
            &label,
            &[c(0.0, 0.0)],
            DerivativeSelector::Value,
            &pol
        )
        .is_err());
        assert!(theta_eval(&p, &label, &[c(0.0, 0.0)], DerivativeSelector::Dz(0), &pol).is_err());
    }

    #[test]
    fn heat_identity_diagonal_and_off_diagonal() {
        let p = SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        let z = [c(0.2, 0.3), c(0.7, 0.1)];
        let pol = policy(&p, 2, DerivativeSelector::DZ(0, 1));
        for label in theta_basis(2, 2).unwrap() {
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                let r = heat_residual(&p, &label, &z, i, j, &pol).unwrap();
                assert!(r.relative() < 1e-12, "{r:?}");
            }
        }
    }

    #[test]
    fn heat_identity_by_finite_differences() {
        let p = SiegelPoint::scalar(c(0.3, 1.1)).unwrap();
        let pol = policy(&p, 3, DerivativeSelector::DZ(0, 0));
        let label = ThetaLabel::new(3, vec![1]).unwrap();
        let r = heat_residual_fd(&p, &label, &[c(0.4, 0.2)], 0, 0, &pol, 1e-4).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
    }

    #[test]
    fn quasi_periodicity() {
        let p = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let pol = policy(&p, 1, DerivativeSelector::Value);
        let label = ThetaLabel::new(1, vec![0]).unwrap();
        let z = [c(0.3, 0.2)];
        assert!(
            quasi_periodicity_residual(&p, &label, &z, 0, &pol)
                .unwrap()
                .relative()
                < 1e-12
        );
        assert!(
            quasi_periodicity_residual(&p, &label, &z, 1, &pol)
                .unwrap()
                .relative()
                < 1e-10
        );
        let pol3 = policy(&p, 3, DerivativeSelector::Value);
        for a in 0..3 {
            let label = ThetaLabel::new(3, vec![a]).unwrap();
            assert!(
                quasi_periodicity_residual(&p, &label, &z, 1, &pol3)
                    .unwrap()
                    .relative()
                    < 1e-10
            );
        }
    }

    #[test]
    fn holomorphic_in_z() {
        let p = SiegelPoint::scalar(c(0.5, 0.7)).unwrap();
        let pol = policy(&p, 2, DerivativeSelector::Value);
        let label = ThetaLabel::new(2, vec![1]).unwrap();
        let f = |z: C64| theta_eval(&p, &label, &[z], DerivativeSelector::Value, &pol).unwrap();
        let (z0, h) = (c(0.21, 0.33), 1e-4);
        let dx = (f(z0 + h) - f(z0 - h)) / (2.0 * h);
        let dy = (f(z0 + c(0.0, h)) - f(z0 - c(0.0, h))) / (2.0 * h);
        // ∂/∂z̄ = ½(∂x + i∂y) must vanish.
        let cr = (dx + c(0.0, 1.0) * dy) * 0.5;
        assert!(cr.norm() < 1e-6 * dx.norm().max(1.0));
    }
}
