//! Global assembly and the clamped boundary condition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem_element::{ElementMatrices, NodalDof, DOFS_PER_ELEMENT, DOFS_PER_NODE};
use crate::model_params::LumpedCoefficients;

/// One-dimensional mesh of `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    element_lengths: Vec<f64>,
    node_positions: Vec<f64>,
}

impl Mesh {
    pub fn uniform(length: f64, n_elements: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::invalid("mesh.n_elements", "must be >= 1"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("geometry.length", format!("must be > 0, got {length}")));
        }
        let le = length / n_elements as f64;
        let node_positions = (0..=n_elements)
            .map(|i| if i == n_elements { length } else { i as f64 * le })
            .collect();
        Ok(Mesh {
            element_lengths: vec![le; n_elements],
            node_positions,
        })
    }

    pub fn from_lengths(element_lengths: Vec<f64>) -> Result<Self> {
        if element_lengths.is_empty() {
            return Err(Error::invalid("mesh.n_elements", "must be >= 1"));
        }
        if let Some(bad) = element_lengths.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("element length", format!("must be > 0, got {bad}")));
        }
        let mut node_positions = Vec::with_capacity(element_lengths.len() + 1);
        let mut x = 0.0;
        node_positions.push(x);
        for le in &element_lengths {
            x += le;
            node_positions.push(x);
        }
        Ok(Mesh {
            element_lengths,
            node_positions,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.element_lengths.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.node_positions.len()
    }

    pub fn element_lengths(&self) -> &[f64] {
        &self.element_lengths
    }

    pub fn node_positions(&self) -> &[f64] {
        &self.node_positions
    }

    pub fn length(&self) -> f64 {
        *self.node_positions.last().expect("mesh has nodes")
    }

    /// Element matrices for a uniform lamination.
    pub fn element_matrices(
        &self,
        coeffs: &LumpedCoefficients,
        quadrature_order: usize,
    ) -> Result<Vec<ElementMatrices>> {
        self.element_lengths
            .iter()
            .map(|&le| ElementMatrices::compute(le, coeffs, quadrature_order))
            .collect()
    }
}

/// Assembled semidiscrete system `M q̈ + K q = f u(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSystem {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub coupling: DVector<f64>,
    n_nodes: usize,
    clamped: bool,
}

impl GlobalSystem {
    /// Wraps raw matrices laid out as a clamped system with `n_nodes` nodes
    /// (`4 (n_nodes − 1)` DOFs). Used for small hand-built fixtures.
    pub fn from_clamped_matrices(
        mass: DMatrix<f64>,
        stiffness: DMatrix<f64>,
        coupling: DVector<f64>,
    ) -> Result<Self> {
        let n = mass.nrows();
        if n == 0 || n % DOFS_PER_NODE != 0 {
            return Err(Error::DimensionMismatch {
                context: "clamped system size (multiple of 4)",
                expected: DOFS_PER_NODE * (n / DOFS_PER_NODE).max(1),
                actual: n,
            });
        }
        for (ctx, actual) in [
            ("mass columns", mass.ncols()),
            ("stiffness rows", stiffness.nrows()),
            ("stiffness columns", stiffness.ncols()),
            ("coupling length", coupling.len()),
        ] {
            if actual != n {
                return Err(Error::DimensionMismatch {
                    context: ctx,
                    expected: n,
                    actual,
                });
            }
        }
        Ok(GlobalSystem {
            mass,
            stiffness,
            coupling,
            n_nodes: n / DOFS_PER_NODE + 1,
            clamped: true,
        })
    }

    /// Assembles and clamps in one step.
    pub fn cantilever(
        mesh: &Mesh,
        coeffs: &LumpedCoefficients,
        quadrature_order: usize,
    ) -> Result<Self> {
        let elements = mesh.element_matrices(coeffs, quadrature_order)?;
        assemble(mesh, &elements)?.apply_clamp()
    }

    pub fn n_dofs(&self) -> usize {
        self.mass.nrows()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn is_clamped(&self) -> bool {
        self.clamped
    }

    /// Global index of `dof` at `node`, or `None` when clamped out.
    pub fn dof_index(&self, node: usize, dof: NodalDof) -> Option<usize> {
        if node >= self.n_nodes {
            return None;
        }
        let full = DOFS_PER_NODE * node + dof as usize;
        if self.clamped {
            full.checked_sub(DOFS_PER_NODE)
        } else {
            Some(full)
        }
    }

    /// Global indices of the eight local DOFs of `element`.
    pub fn dof_map(&self, element: usize) -> [Option<usize>; DOFS_PER_ELEMENT] {
        let mut map = [None; DOFS_PER_ELEMENT];
        for (local, slot) in map.iter_mut().enumerate() {
            let node = element + local / DOFS_PER_NODE;
            let dof = [NodalDof::V, NodalDof::Vx, NodalDof::Alpha, NodalDof::AlphaX]
                [local % DOFS_PER_NODE];
            *slot = self.dof_index(node, dof);
        }
        map
    }

    pub fn tip_index(&self, dof: NodalDof) -> usize {
        self.dof_index(self.n_nodes - 1, dof)
            .expect("tip node is never clamped")
    }

    /// Index of the tip rotation; its velocity drives the feedback.
    pub fn tip_alpha_index(&self) -> usize {
        self.tip_index(NodalDof::Alpha)
    }

    pub fn tip_deflection_index(&self) -> usize {
        self.tip_index(NodalDof::V)
    }

    /// Expands a vector over the system DOFs to all mesh DOFs, inserting
    /// the zero clamped values at node 0.
    pub fn full_vector(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.n_dofs() {
            return Err(Error::DimensionMismatch {
                context: "state vector",
                expected: self.n_dofs(),
                actual: q.len(),
            });
        }
        if !self.clamped {
            return Ok(q.clone());
        }
        let mut full = DVector::zeros(q.len() + DOFS_PER_NODE);
        full.rows_mut(DOFS_PER_NODE, q.len()).copy_from(q);
        Ok(full)
    }

    /// Removes the four DOFs of node 0 (v = v_x = α = α_x = 0).
    pub fn apply_clamp(self) -> Result<Self> {
        if self.clamped {
            return Err(Error::AlreadyClamped);
        }
        let keep = self.n_dofs() - DOFS_PER_NODE;
        let cut = |m: &DMatrix<f64>| m.view((DOFS_PER_NODE, DOFS_PER_NODE), (keep, keep)).into_owned();
        Ok(GlobalSystem {
            mass: cut(&self.mass),
            stiffness: cut(&self.stiffness),
            coupling: self.coupling.rows(DOFS_PER_NODE, keep).into_owned(),
            n_nodes: self.n_nodes,
            clamped: true,
        })
    }
}

/// Sums element contributions into the unclamped global system.
pub fn assemble(mesh: &Mesh, per_element: &[ElementMatrices]) -> Result<GlobalSystem> {
    if per_element.len() != mesh.n_elements() {
        return Err(Error::DimensionMismatch {
            context: "element matrices per mesh element",
            expected: mesh.n_elements(),
            actual: per_element.len(),
        });
    }
    let n = DOFS_PER_NODE * mesh.n_nodes();
    let mut mass = DMatrix::zeros(n, n);
    let mut stiffness = DMatrix::zeros(n, n);
    let mut coupling = DVector::zeros(n);
    for (e, em) in per_element.iter().enumerate() {
        let base = DOFS_PER_NODE * e;
        let mut m = mass.view_mut((base, base), (DOFS_PER_ELEMENT, DOFS_PER_ELEMENT));
        m += em.mass;
        let mut k = stiffness.view_mut((base, base), (DOFS_PER_ELEMENT, DOFS_PER_ELEMENT));
        k += em.stiffness;
        let mut f = coupling.rows_mut(base, DOFS_PER_ELEMENT);
        f += em.coupling;
    }
    Ok(GlobalSystem {
        mass,
        stiffness,
        coupling,
        n_nodes: mesh.n_nodes(),
        clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem_element::DEFAULT_QUADRATURE_ORDER;

    fn coeffs() -> LumpedCoefficients {
        LumpedCoefficients {
            a: 0.17,
            b: 0.001,
            c: 1e-4,
            d: 0.013,
            e: 0.004,
            f: 0.008,
            g: 4.7,
            h: 0.037,
        }
    }

    fn unclamped(n: usize) -> GlobalSystem {
        let mesh = Mesh::uniform(1.0, n).unwrap();
        let els = mesh.element_matrices(&coeffs(), DEFAULT_QUADRATURE_ORDER).unwrap();
        assemble(&mesh, &els).unwrap()
    }

    #[test]
    fn uniform_mesh_sums_to_length() {
        let mesh = Mesh::uniform(2.5, 7).unwrap();
        let total: f64 = mesh.element_lengths().iter().sum();
        assert!((total - 2.5).abs() < 1e-14);
        assert_eq!(mesh.n_nodes(), 8);
        assert_eq!(mesh.length(), 2.5);
        assert!(Mesh::uniform(1.0, 0).is_err());
        assert!(Mesh::from_lengths(vec![0.5, -0.1]).is_err());
    }

    #[test]
    fn single_element_is_identity_assembly() {
        let mesh = Mesh::uniform(0.8, 1).unwrap();
        let els = mesh.element_matrices(&coeffs(), 4).unwrap();
        let sys = assemble(&mesh, &els).unwrap();
        assert_eq!(sys.mass, DMatrix::from_column_slice(8, 8, els[0].mass.as_slice()));
        assert_eq!(sys.stiffness, DMatrix::from_column_slice(8, 8, els[0].stiffness.as_slice()));
        let red = sys.apply_clamp().unwrap();
        assert_eq!(red.n_dofs(), 4);
        assert_eq!(red.tip_alpha_index(), 2);
    }

    #[test]
    fn element_count_mismatch() {
        let mesh = Mesh::uniform(1.0, 3).unwrap();
        let els = Mesh::uniform(1.0, 2).unwrap().element_matrices(&coeffs(), 4).unwrap();
        assert!(matches!(assemble(&mesh, &els), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn clamping_twice_is_an_error() {
        let sys = unclamped(2).apply_clamp().unwrap();
        assert!(matches!(sys.apply_clamp(), Err(Error::AlreadyClamped)));
    }

    #[test]
    fn order_independent() {
        let mesh = Mesh::from_lengths(vec![0.1, 0.3, 0.25, 0.35]).unwrap();
        let els = mesh.element_matrices(&coeffs(), 4).unwrap();
        let fwd = assemble(&mesh, &els).unwrap();
        // Re-accumulate in reverse element order.
        let n = fwd.n_dofs();
        let mut k = DMatrix::zeros(n, n);
        for (e, em) in els.iter().enumerate().rev() {
            let mut v = k.view_mut((4 * e, 4 * e), (8, 8));
            v += em.stiffness;
        }
        assert_eq!(k, fwd.stiffness);
    }

    #[test]
    fn free_free_nullspace_dimension_two() {
        let sys = unclamped(4);
        let eig = sys.stiffness.clone().symmetric_eigen();
        let norm = sys.stiffness.norm();
        let zeros = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-10 * norm).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn clamped_matrices_are_positive_definite() {
        let sys = unclamped(10).apply_clamp().unwrap();
        assert_eq!(sys.n_dofs(), 40);
        assert!(sys.mass.clone().cholesky().is_some());
        let eig = sys.stiffness.clone().symmetric_eigen();
        assert!(eig.eigenvalues.min() > 0.0);
    }

    #[test]
    fn coupling_telescopes_to_tip_rotation() {
        let c = coeffs();
        let full = unclamped(10);
        assert!((full.coupling[2] - 0.5 * c.h).abs() < 1e-15);
        let sys = full.apply_clamp().unwrap();
        let tip = sys.tip_alpha_index();
        for (i, v) in sys.coupling.iter().enumerate() {
            if i == tip {
                assert!((v + 0.5 * c.h).abs() < 1e-15);
            } else {
                assert!(v.abs() < 1e-15, "entry {i} = {v}");
            }
        }
    }

    #[test]
    fn dof_map_after_clamp() {
        let sys = unclamped(3).apply_clamp().unwrap();
        assert_eq!(sys.dof_map(0)[..4], [None; 4]);
        assert_eq!(sys.dof_map(0)[4..], [Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(sys.dof_map(2)[7], Some(11));
        assert_eq!(sys.tip_deflection_index(), 8);
        let q = DVector::from_element(12, 1.0);
        let full = sys.full_vector(&q).unwrap();
        assert_eq!(full.len(), 16);
        assert_eq!(full.rows(0, 4).sum(), 0.0);
    }
}
