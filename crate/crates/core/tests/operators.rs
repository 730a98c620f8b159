use std::f64::consts::PI;

use agq_core::linalg::max_abs_diff;
use agq_core::quantization::QuadratureGrid;
use agq_core::theta::{
    quasi_periodicity_residual, theta_basis, truncation_radius, DerivativeSelector,
};
use agq_core::toeplitz::{
    bms_experiment, rescaled_toeplitz, toeplitz_function, toeplitz_mode_closed_form,
    toeplitz_mode_quadrature, ToeplitzSource,
};
use agq_core::tqft::{curve_pairing, mapping_torus_invariant, CurveClass};
use agq_core::{Execution, FourierFunction, FourierMode, SiegelPoint, C64};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = SiegelPoint> {
    (-1.0f64..1.0, 0.6f64..2.0).prop_map(|(x, y)| SiegelPoint::scalar(C64::new(x, y)).unwrap())
}

fn mode(bound: i64) -> impl Strategy<Value = FourierMode> {
    (-bound..=bound, -bound..=bound).prop_map(|(r, s)| FourierMode::scalar(r, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_relation(k in 1u32..8, m1 in mode(3), m2 in mode(3)) {
        let p = SiegelPoint::scalar(C64::new(0.0, 1.0)).unwrap();
        let lhs = rescaled_toeplitz(&p, k, &m1).unwrap().compose(&rescaled_toeplitz(&p, k, &m2).unwrap()).unwrap();
        // Oracle: U_m U_m' = e^{πi(r u - s t)/k} U_{m+m'}, from composing weighted shifts by hand.
        let omega = (m1.r()[0] * m2.s()[0] - m1.s()[0] * m2.r()[0]) as f64;
        let phase = C64::from_polar(1.0, PI * omega / k as f64);
        let rhs = rescaled_toeplitz(&p, k, &(&m1 + &m2)).unwrap().scale(phase);
        prop_assert!(lhs.max_entry_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature(p in point(), k in 1u32..5, m in mode(2)) {
        let grid = QuadratureGrid::for_level(&p, k, 2).unwrap();
        let a = toeplitz_mode_closed_form(&p, k, &m).unwrap();
        let b = toeplitz_mode_quadrature(&p, k, &m, &grid).unwrap();
        prop_assert!(a.max_entry_diff(&b).unwrap() < 1e-8);
    }

    #[test]
    fn theta_quasi_periodic(p in point(), k in 1u32..6, x in 0.0f64..1.0, y in 0.0f64..1.0, shift in 0usize..2) {
        let z = p.complex_point(&[x], &[y]);
        let pol = truncation_radius(&p, k, 1e-15, DerivativeSelector::Value).unwrap();
        for label in theta_basis(k, 1).unwrap() {
            let r = quasi_periodicity_residual(&p, &label, &z, shift, &pol).unwrap();
            prop_assert!(r.relative() < 1e-11, "{:?}", r);
        }
    }
}

#[test]
fn real_symbol_gives_hermitian_operator() {
    let p = SiegelPoint::scalar(C64::new(0.3, 1.1)).unwrap();
    let f = &FourierFunction::cosine(&FourierMode::scalar(1, 2))
        + &FourierFunction::constant(1, C64::new(0.5, 0.0));
    for k in [1, 3, 6] {
        let t = toeplitz_function(&p, k, &f, ToeplitzSource::ClosedForm).unwrap();
        assert!(max_abs_diff(t.entries(), t.adjoint().entries()) < 1e-14);
    }
}

#[test]
fn level_sweep_identical_on_both_paths() {
    let p = SiegelPoint::scalar(C64::new(0.5, 0.7)).unwrap();
    let f = FourierFunction::cosine(&FourierMode::scalar(0, 1));
    let ks = [4, 8, 16];
    let seq = bms_experiment(&p, &f, &ks, Execution::Sequential).unwrap();
    let par = bms_experiment(&p, &f, &ks, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn empty_link_counts_states() {
    let p = SiegelPoint::diagonal(&[C64::new(0.0, 1.0), C64::new(0.2, 1.4)]).unwrap();
    for k in 1..=5u32 {
        let v = mapping_torus_invariant(&p, k, None, None).unwrap();
        assert!((v - (k * k) as f64).norm() < 1e-10);
    }
}

#[test]
fn non_congruent_curves_pair_to_zero() {
    let p = SiegelPoint::scalar(C64::new(0.0, 1.0)).unwrap();
    let a = CurveClass::new(vec![1], vec![0]).unwrap();
    let b = CurveClass::new(vec![0], vec![1]).unwrap();
    for k in 2..=6 {
        assert!(curve_pairing(&p, k, &a, &b).unwrap().norm() < 1e-14);
    }
}
