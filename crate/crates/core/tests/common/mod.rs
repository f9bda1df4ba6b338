//! Reference computations shared by the integration tests. Nothing here
//! calls into the element kernels: shape functions come from inverting the
//! cubic interpolation conditions and integrals use composite Simpson.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix4};
use sgtbeam::model_params::{LumpedCoefficients, MaterialLayer};

/// Cubic coefficients of the four Hermite functions on `[0, le]`, found by
/// solving the interpolation conditions `p(0), p'(0), p(le), p'(le)`.
/// Row `i` holds `[c0, c1, c2, c3]` of the function carrying DOF `i`.
pub fn hermite_monomials(le: f64) -> Matrix4<f64> {
    // Conditions applied to the monomial basis 1, x, x², x³.
    let g = Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, le, le * le, le * le * le, //
        0.0, 1.0, 2.0 * le, 3.0 * le * le,
    );
    // Column j of g⁻¹ interpolates the j-th unit condition.
    g.try_inverse().expect("interpolation matrix is invertible").transpose()
}

/// Value and first two derivatives of every Hermite function at `x`.
pub fn hermite_at(coef: &Matrix4<f64>, x: f64) -> [[f64; 4]; 3] {
    let mut out = [[0.0; 4]; 3];
    for i in 0..4 {
        let c = coef.row(i);
        out[0][i] = c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        out[1][i] = c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
        out[2][i] = 2.0 * c[2] + 6.0 * c[3] * x;
    }
    out
}

/// Places the four Hermite values on the v or α slots of an 8-vector.
fn spread(h: [f64; 4], alpha: bool) -> DVector<f64> {
    let off = if alpha { 2 } else { 0 };
    let mut r = DVector::zeros(8);
    r[off] = h[0];
    r[off + 1] = h[1];
    r[off + 4] = h[2];
    r[off + 5] = h[3];
    r
}

/// Composite Simpson weights for `n_points` (odd) nodes on `[0, le]`.
pub fn simpson(le: f64, n_points: usize) -> Vec<(f64, f64)> {
    assert!(n_points >= 3 && n_points % 2 == 1);
    let step = le / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            let w = if i == 0 || i == n_points - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (i as f64 * step, w * step / 3.0)
        })
        .collect()
}

pub struct ElementOracle {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub coupling: DVector<f64>,
}

/// Element energy integrals written out from the field definitions.
pub fn element_oracle(le: f64, c: &LumpedCoefficients, n_points: usize) -> ElementOracle {
    let coef = hermite_monomials(le);
    let mut mass = DMatrix::zeros(8, 8);
    let mut stiffness = DMatrix::zeros(8, 8);
    let mut coupling = DVector::zeros(8);
    for (x, w) in simpson(le, n_points) {
        let [h, dh, d2h] = hermite_at(&coef, x);
        let v = spread(h, false);
        let a = spread(h, true);
        let vx = spread(dh, false);
        let ax = spread(dh, true);
        let vxx = spread(d2h, false);
        let axx = spread(d2h, true);
        mass += (&v * v.transpose() * c.a + &a * a.transpose() * c.b) * w;
        let terms = [
            (c.c, axx.clone()),
            (c.d, ax.clone()),
            (c.e, &vxx + &ax),
            (c.f, &ax * 2.0 - &vxx),
            (c.g, &vx - &a),
        ];
        for (k, row) in terms {
            stiffness += &row * row.transpose() * (k * w);
        }
        coupling -= ax * (0.5 * c.h * w);
    }
    ElementOracle {
        mass,
        stiffness,
        coupling,
    }
}

/// Section constants of one layer from raw material data.
pub struct Section {
    pub rho_a: f64,
    pub rho_i: f64,
    /// Bending stiffness `I (k + 4μ/3)`.
    pub bending: f64,
    /// Shear stiffness `k_s μ A`.
    pub shear: f64,
}

pub fn section(layer: &MaterialLayer) -> Section {
    let (e, nu) = (layer.young_modulus, layer.poisson_ratio);
    let bulk = e / (3.0 * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    let ks = (5.0 + 5.0 * nu) / (6.0 + 5.0 * nu);
    let area = layer.width * layer.thickness;
    let inertia = layer.width * layer.thickness.powi(3) / 12.0;
    Section {
        rho_a: layer.density * area,
        rho_i: layer.density * inertia,
        bending: inertia * (bulk + 4.0 * mu / 3.0),
        shear: ks * mu * area,
    }
}

pub fn laminate_section(layers: &[&MaterialLayer]) -> Section {
    layers.iter().map(|l| section(l)).fold(
        Section {
            rho_a: 0.0,
            rho_i: 0.0,
            bending: 0.0,
            shear: 0.0,
        },
        |acc, s| Section {
            rho_a: acc.rho_a + s.rho_a,
            rho_i: acc.rho_i + s.rho_i,
            bending: acc.bending + s.bending,
            shear: acc.shear + s.shear,
        },
    )
}

/// Classical Timoshenko cantilever (clamped at 0, free at `length`):
/// the boundary determinant at frequency `omega`, from RK4 shooting of
///
/// ```text
/// κGA (v'' − α') + ω² ρA v = 0
/// EI α'' + κGA (v' − α) + ω² ρI α = 0
/// ```
fn timoshenko_determinant(s: &Section, length: f64, omega: f64, steps: usize) -> f64 {
    let w2 = omega * omega;
    let rhs = |y: [f64; 4]| -> [f64; 4] {
        let [v, vp, a, ap] = y;
        let vpp = ap - w2 * s.rho_a * v / s.shear;
        let app = -(s.shear * (vp - a) + w2 * s.rho_i * a) / s.bending;
        [vp, vpp, ap, app]
    };
    let h = length / steps as f64;
    let shoot = |y0: [f64; 4]| -> [f64; 4] {
        let mut y = y0;
        for _ in 0..steps {
            let add = |y: [f64; 4], k: [f64; 4], f: f64| {
                [y[0] + f * k[0], y[1] + f * k[1], y[2] + f * k[2], y[3] + f * k[3]]
            };
            let k1 = rhs(y);
            let k2 = rhs(add(y, k1, h / 2.0));
            let k3 = rhs(add(y, k2, h / 2.0));
            let k4 = rhs(add(y, k3, h));
            for i in 0..4 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    };
    // Clamped end fixes v and α; the free slopes span the solutions.
    let y1 = shoot([0.0, 1.0, 0.0, 0.0]);
    let y2 = shoot([0.0, 0.0, 0.0, 1.0]);
    // Free end: zero moment (α') and zero shear force (v' − α).
    let m = [[y1[3], y2[3]], [y1[1] - y1[2], y2[1] - y2[2]]];
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Lowest root of the Timoshenko cantilever frequency equation, in rad/s.
pub fn timoshenko_first_frequency(s: &Section, length: f64) -> f64 {
    let steps = 4000;
    // Euler-Bernoulli estimate brackets the root from above.
    let eb = 1.875104068711961_f64.powi(2) * (s.bending / (s.rho_a * length.powi(4))).sqrt();
    let (mut lo, mut hi) = (0.05 * eb, 0.05 * eb);
    let mut f_lo = timoshenko_determinant(s, length, lo, steps);
    loop {
        hi += 0.01 * eb;
        let f_hi = timoshenko_determinant(s, length, hi, steps);
        if f_hi.signum() != f_lo.signum() {
            break;
        }
        lo = hi;
        f_lo = f_hi;
        assert!(hi < 2.0 * eb, "no sign change below 2x the Euler-Bernoulli estimate");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = timoshenko_determinant(s, length, mid, steps);
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
