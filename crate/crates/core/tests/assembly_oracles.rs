mod common;

use nalgebra::{DMatrix, DVector};
use sgtbeam::assembly::{assemble, GlobalSystem, Mesh};
use sgtbeam::model_params::{Laminate, LumpedCoefficients, NondimScales, StrainGradientScales};

use common::{element_oracle, rel_frobenius};

fn reference_coefficients() -> LumpedCoefficients {
    let lam = Laminate::reference();
    NondimScales::for_laminate(&lam, 1.0e7).scale_coefficients(&lam.lumped().unwrap())
}

#[test]
fn global_matrices_match_oracle_assembly() {
    let c = reference_coefficients();
    let mesh = Mesh::from_lengths(vec![0.1, 0.35, 0.2, 0.05, 0.3]).unwrap();
    let sys = assemble(&mesh, &mesh.element_matrices(&c, 4).unwrap()).unwrap();

    let n = 4 * mesh.n_nodes();
    let mut m = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    let mut f = DVector::zeros(n);
    for (e, &le) in mesh.element_lengths().iter().enumerate() {
        let o = element_oracle(le, &c, 4001);
        let at = 4 * e;
        let mut mv = m.view_mut((at, at), (8, 8));
        mv += &o.mass;
        let mut kv = k.view_mut((at, at), (8, 8));
        kv += &o.stiffness;
        let mut fv = f.rows_mut(at, 8);
        fv += &o.coupling;
    }
    assert!(rel_frobenius(&sys.mass, &m) < 1e-12);
    assert!(rel_frobenius(&sys.stiffness, &k) < 1e-12);
    assert!((&sys.coupling - &f).norm() < 1e-12 * f.norm());
}

#[test]
fn clamped_matrices_stay_positive_definite_on_fine_meshes() {
    let c = reference_coefficients();
    for n in [1, 64, 512] {
        let sys = GlobalSystem::cantilever(&Mesh::uniform(1.0, n).unwrap(), &c, 4).unwrap();
        assert_eq!(sys.n_dofs(), 4 * n);
        assert!(sys.mass.clone().cholesky().is_some(), "M at {n} elements");
        assert!(sys.stiffness.clone().cholesky().is_some(), "K at {n} elements");
    }
}

/// Effective stiffness of the free-end DOFs after static condensation of
/// every other DOF.
fn tip_stiffness(sys: &GlobalSystem) -> DMatrix<f64> {
    let n = sys.n_dofs();
    let (i, t) = (n - 4, 4);
    let k = &sys.stiffness;
    let kii = k.view((0, 0), (i, i)).into_owned();
    let kit = k.view((0, i), (i, t)).into_owned();
    let ktt = k.view((i, i), (t, t)).into_owned();
    if i == 0 {
        return ktt;
    }
    let x = kii.cholesky().unwrap().solve(&kit);
    ktt - kit.transpose() * x
}

#[test]
fn refinement_softens_the_condensed_stiffness() {
    // Nested spaces: the two-element model can only lower the energy needed
    // to reach any tip state, so K1 − K2 is positive semidefinite.
    let c = reference_coefficients();
    let one = GlobalSystem::cantilever(&Mesh::uniform(1.0, 1).unwrap(), &c, 4).unwrap();
    let two = GlobalSystem::cantilever(&Mesh::uniform(1.0, 2).unwrap(), &c, 4).unwrap();
    let diff = tip_stiffness(&one) - tip_stiffness(&two);
    let min = diff.clone().symmetric_eigen().eigenvalues.min();
    assert!(min >= -1e-10 * tip_stiffness(&one).norm(), "min eigenvalue {min}");
    assert!(diff.norm() > 1e-8 * tip_stiffness(&one).norm(), "no softening at all");
}

#[test]
fn classical_static_tip_deflection_converges_at_first_order() {
    // With no gradient stiffness the extra root constraints on v_x and α_x
    // leave a boundary layer one element wide, so the error halves with h.
    let mut lam = Laminate::reference();
    lam.scales = StrainGradientScales::CLASSICAL;
    let c = NondimScales::for_laminate(&lam, 1.0e7).scale_coefficients(&lam.lumped().unwrap());
    let exact = 1.0 / (3.0 * c.d) + 1.0 / c.g;
    let mut errors = Vec::new();
    for n in [32, 64, 128] {
        let sys = GlobalSystem::cantilever(&Mesh::uniform(1.0, n).unwrap(), &c, 4).unwrap();
        let tip = sys.tip_deflection_index();
        let mut load = DVector::zeros(sys.n_dofs());
        load[tip] = 1.0;
        let q = sys.stiffness.clone().cholesky().unwrap().solve(&load);
        assert!(q[tip] < exact, "constrained model must be stiffer");
        errors.push((exact - q[tip]) / exact);
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
    }
}
