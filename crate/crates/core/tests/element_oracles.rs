mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sgtbeam::fem_element::{element_coupling, shape_eval, ElementMatrices};
use sgtbeam::model_params::{Laminate, NondimScales};

use common::{element_oracle, hermite_at, hermite_monomials, rel_frobenius};

fn reference_coefficients() -> sgtbeam::model_params::LumpedCoefficients {
    let lam = Laminate::reference();
    NondimScales::for_laminate(&lam, 1.0e7).scale_coefficients(&lam.lumped().unwrap())
}

proptest! {
    #[test]
    fn shape_functions_match_monomial_route(le in 0.01f64..2.0, s in 0.0f64..=1.0) {
        let x = s * le;
        let lib = shape_eval(x, le).unwrap();
        let [h, dh, d2h] = hermite_at(&hermite_monomials(le), x);
        for i in 0..4 {
            prop_assert!((lib.h[i] - h[i]).abs() <= 1e-12 * (1.0 + h[i].abs()));
            prop_assert!((lib.dh[i] - dh[i]).abs() <= 1e-10 * (1.0 + dh[i].abs()));
            prop_assert!((lib.d2h[i] - d2h[i]).abs() <= 1e-9 * (1.0 + d2h[i].abs()) / le);
        }
    }
}

#[test]
fn reference_element_matches_simpson() {
    let c = reference_coefficients();
    for le in [1.0, 0.1, 1.0 / 64.0] {
        let lib = ElementMatrices::compute(le, &c, 4).unwrap();
        let oracle = element_oracle(le, &c, 10_001);
        let m = DMatrix::from_iterator(8, 8, lib.mass.iter().copied());
        let k = DMatrix::from_iterator(8, 8, lib.stiffness.iter().copied());
        let f = DVector::from_iterator(8, lib.coupling.iter().copied());
        assert!(rel_frobenius(&m, &oracle.mass) < 1e-12, "mass at le = {le}");
        assert!(rel_frobenius(&k, &oracle.stiffness) < 1e-12, "stiffness at le = {le}");
        assert!((&f - &oracle.coupling).norm() < 1e-12 * oracle.coupling.norm());
    }
}

#[test]
fn quadrature_order_beyond_four_changes_nothing() {
    let c = reference_coefficients();
    let base = ElementMatrices::compute(0.3, &c, 4).unwrap();
    for order in 5..=10 {
        let other = ElementMatrices::compute(0.3, &c, order).unwrap();
        assert!((other.mass - base.mass).norm() <= 1e-14 * base.mass.norm());
        assert!((other.stiffness - base.stiffness).norm() <= 1e-13 * base.stiffness.norm());
    }
}

#[test]
fn underintegration_is_visible() {
    // Products of cubics are degree six; two Gauss points are not enough.
    let c = reference_coefficients();
    let exact = ElementMatrices::compute(0.3, &c, 4).unwrap();
    let low = ElementMatrices::compute(0.3, &c, 2).unwrap();
    assert!((low.mass - exact.mass).norm() > 1e-6 * exact.mass.norm());
}

#[test]
fn coupling_acts_only_on_end_rotations() {
    let f = element_coupling(0.25, 0.8, 4).unwrap();
    for (i, v) in f.iter().enumerate() {
        match i {
            2 => assert!((v - 0.4).abs() < 1e-15),
            6 => assert!((v + 0.4).abs() < 1e-15),
            _ => assert!(v.abs() < 1e-15, "entry {i} = {v}"),
        }
    }
}
