//! Two-node strain-gradient Timoshenko beam element.
//!
//! Both the deflection `v` and the rotation `α` are cubic Hermite
//! interpolants, so each node carries four DOFs. The local DOF vector is
//! ordered
//!
//! ```text
//! q = (v1, v1x, α1, α1x, v2, v2x, α2, α2x)
//! ```
//!
//! and every matrix in this module is laid out against that order.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model_params::LumpedCoefficients;

pub const DOFS_PER_NODE: usize = 4;
pub const DOFS_PER_ELEMENT: usize = 8;

/// Gauss points used by default; exact for the degree-6 mass integrand.
pub const DEFAULT_QUADRATURE_ORDER: usize = 4;

pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type Vector8 = SVector<f64, 8>;
pub type Row8 = SMatrix<f64, 1, 8>;
pub type ShapeMatrix = SMatrix<f64, 4, 8>;

/// Position of a DOF within a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodalDof {
    V = 0,
    Vx = 1,
    Alpha = 2,
    AlphaX = 3,
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::invalid("quadrature_order", "must be >= 1"));
    }
    let n = order;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok((points, weights))
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Maps a Gauss rule onto [0, le].
fn element_rule(le: f64, order: usize) -> Result<impl Iterator<Item = (f64, f64)>> {
    let (xi, w) = gauss_legendre(order)?;
    let half = 0.5 * le;
    Ok(xi.into_iter().zip(w).map(move |(s, w)| (half * (s + 1.0), half * w)))
}

/// Hermite cubic basis and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub h: [f64; 4],
    pub dh: [f64; 4],
    pub d2h: [f64; 4],
}

pub fn shape_eval(x: f64, le: f64) -> Result<ShapeEval> {
    check_length(le)?;
    if !(0.0..=le).contains(&x) {
        return Err(Error::invalid("x", format!("{x} outside element [0, {le}]")));
    }
    let (l2, l3) = (le * le, le * le * le);
    let (x2, x3) = (x * x, x * x * x);
    Ok(ShapeEval {
        h: [
            2.0 * x3 / l3 - 3.0 * x2 / l2 + 1.0,
            x - 2.0 * x2 / le + x3 / l2,
            3.0 * x2 / l2 - 2.0 * x3 / l3,
            x3 / l2 - x2 / le,
        ],
        dh: [
            6.0 * x2 / l3 - 6.0 * x / l2,
            1.0 - 4.0 * x / le + 3.0 * x2 / l2,
            6.0 * x / l2 - 6.0 * x2 / l3,
            3.0 * x2 / l2 - 2.0 * x / le,
        ],
        d2h: [
            12.0 * x / l3 - 6.0 / l2,
            -4.0 / le + 6.0 * x / l2,
            6.0 / l2 - 12.0 * x / l3,
            6.0 * x / l2 - 2.0 / le,
        ],
    })
}

fn check_length(le: f64) -> Result<()> {
    if le > 0.0 && le.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("element length", format!("must be > 0, got {le}")))
    }
}

const V_COLS: [usize; 4] = [0, 1, 4, 5];
const ALPHA_COLS: [usize; 4] = [2, 3, 6, 7];

fn row_from(cols: [usize; 4], vals: [f64; 4]) -> Row8 {
    let mut r = Row8::zeros();
    for (c, v) in cols.into_iter().zip(vals) {
        r[c] = v;
    }
    r
}

/// Interpolation matrix whose rows give `(v, v_x, α, α_x)` at `x`.
pub fn shape_matrix(x: f64, le: f64) -> Result<ShapeMatrix> {
    let s = shape_eval(x, le)?;
    let mut n = ShapeMatrix::zeros();
    n.set_row(0, &row_from(V_COLS, s.h));
    n.set_row(1, &row_from(V_COLS, s.dh));
    n.set_row(2, &row_from(ALPHA_COLS, s.h));
    n.set_row(3, &row_from(ALPHA_COLS, s.dh));
    Ok(n)
}

/// Kinematic operator rows at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorRows {
    /// v
    pub d1: Row8,
    /// α
    pub d2: Row8,
    /// α_xx
    pub b1: Row8,
    /// α_x
    pub b2: Row8,
    /// v_xx + α_x
    pub b3: Row8,
    /// 2α_x − v_xx
    pub b4: Row8,
    /// v_x − α
    pub b5: Row8,
}

pub fn operator_rows(x: f64, le: f64) -> Result<OperatorRows> {
    let s = shape_eval(x, le)?;
    let v = row_from(V_COLS, s.h);
    let vx = row_from(V_COLS, s.dh);
    let vxx = row_from(V_COLS, s.d2h);
    let a = row_from(ALPHA_COLS, s.h);
    let ax = row_from(ALPHA_COLS, s.dh);
    let axx = row_from(ALPHA_COLS, s.d2h);
    Ok(OperatorRows {
        d1: v,
        d2: a,
        b1: axx,
        b2: ax,
        b3: vxx + ax,
        b4: ax * 2.0 - vxx,
        b5: vx - a,
    })
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

/// Consistent mass matrix `∫ (A D1ᵀD1 + B D2ᵀD2) dx`.
pub fn element_mass(le: f64, a: f64, b: f64, quadrature_order: usize) -> Result<Matrix8> {
    check_length(le)?;
    nonnegative("A", a)?;
    nonnegative("B", b)?;
    let mut m = Matrix8::zeros();
    for (x, w) in element_rule(le, quadrature_order)? {
        let r = operator_rows(x, le)?;
        m += (r.d1.transpose() * r.d1 * a + r.d2.transpose() * r.d2 * b) * w;
    }
    Ok(m)
}

/// Stiffness matrix `∫ (C B1ᵀB1 + D B2ᵀB2 + E B3ᵀB3 + F B4ᵀB4 + G B5ᵀB5) dx`.
/// Only the `c..g` fields of `coeffs` are read.
pub fn element_stiffness(
    le: f64,
    coeffs: &LumpedCoefficients,
    quadrature_order: usize,
) -> Result<Matrix8> {
    check_length(le)?;
    let LumpedCoefficients { c, d, e, f, g, .. } = *coeffs;
    for (name, v) in [("C", c), ("D", d), ("E", e), ("F", f), ("G", g)] {
        nonnegative(name, v)?;
    }
    let mut k = Matrix8::zeros();
    for (x, w) in element_rule(le, quadrature_order)? {
        let r = operator_rows(x, le)?;
        k += (r.b1.transpose() * r.b1 * c
            + r.b2.transpose() * r.b2 * d
            + r.b3.transpose() * r.b3 * e
            + r.b4.transpose() * r.b4 * f
            + r.b5.transpose() * r.b5 * g)
            * w;
    }
    Ok(k)
}

/// Voltage coupling vector `f_e = −½ ∫ H B2ᵀ dx`; the element load under a
/// piezo voltage `u` is `f_e u`.
///
/// Only the α and α_x entries can be nonzero. Since `B2` is the derivative
/// of the α interpolant, the integral telescopes to `+H/2` on α1 and `−H/2`
/// on α2.
pub fn element_coupling(le: f64, h: f64, quadrature_order: usize) -> Result<Vector8> {
    check_length(le)?;
    if !h.is_finite() {
        return Err(Error::invalid("H", "must be finite"));
    }
    let mut fe = Vector8::zeros();
    for (x, w) in element_rule(le, quadrature_order)? {
        let r = operator_rows(x, le)?;
        fe -= r.b2.transpose() * (0.5 * h * w);
    }
    Ok(fe)
}

/// Mass, stiffness and coupling of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices {
    pub mass: Matrix8,
    pub stiffness: Matrix8,
    pub coupling: Vector8,
}

impl ElementMatrices {
    pub fn compute(le: f64, coeffs: &LumpedCoefficients, quadrature_order: usize) -> Result<Self> {
        Ok(ElementMatrices {
            mass: element_mass(le, coeffs.a, coeffs.b, quadrature_order)?,
            stiffness: element_stiffness(le, coeffs, quadrature_order)?,
            coupling: element_coupling(le, coeffs.h, quadrature_order)?,
        })
    }
}
