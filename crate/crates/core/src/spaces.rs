//! P1 nodal spaces and their DOF substructures.
//!
//! One space type covers all the discrete spaces of the extended system:
//! the full space (`Y_h`, `X_h`), the zero-trace subspace (interior DOFs),
//! the boundary complement `Ξ_h` (boundary DOFs, taken as a nodal-index
//! complement) and the zero-mean subspace `M_h` (a linear constraint, see
//! [`ZeroMeanConstraint`]).
//!
//! Vector spaces use a component-blocked layout: DOF `c * n_nodes + node`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point, PointLocator};

/// Selects a subset of the nodal DOFs of a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Restriction {
    Full,
    Interior,
    Boundary,
}

#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    components: usize,
    interior_nodes: Vec<usize>,
    boundary_nodes: Vec<usize>,
}

impl FeSpace {
    /// Continuous piecewise-linear space with one DOF per node and component.
    pub fn p1(mesh: Arc<Mesh>, components: usize) -> Result<Arc<Self>> {
        if components == 0 {
            return Err(Error::InvalidArgument("a space needs at least one component".into()));
        }
        let interior_nodes = (0..mesh.n_nodes()).filter(|&i| !mesh.is_boundary(i)).collect();
        let boundary_nodes = mesh.boundary_nodes().to_vec();
        Ok(Arc::new(Self {
            mesh,
            components,
            interior_nodes,
            boundary_nodes,
        }))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    /// Total number of coefficients (`n_nodes * components`).
    pub fn n_dofs(&self) -> usize {
        self.mesh.n_nodes() * self.components
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn dof(&self, component: usize, node: usize) -> usize {
        component * self.n_nodes() + node
    }

    /// Global DOF indices selected by `r`, component-blocked and ascending
    /// within each component.
    pub fn dofs(&self, r: Restriction) -> Vec<usize> {
        let nodes: Vec<usize> = match r {
            Restriction::Full => (0..self.n_nodes()).collect(),
            Restriction::Interior => self.interior_nodes.clone(),
            Restriction::Boundary => self.boundary_nodes.clone(),
        };
        (0..self.components)
            .flat_map(|c| nodes.iter().map(move |&n| self.dof(c, n)))
            .collect()
    }

    pub fn interior_dofs(&self) -> Vec<usize> {
        self.dofs(Restriction::Interior)
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        self.dofs(Restriction::Boundary)
    }

    pub fn same_mesh(&self, other: &FeSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }
}

/// Weights `w` with `w · v = ∫_Ω v_h` for a scalar coefficient vector `v`.
#[derive(Debug, Clone)]
pub struct ZeroMeanConstraint {
    pub weights: Vec<f64>,
}

impl ZeroMeanConstraint {
    /// Row sums of the P1 mass matrix, i.e. `∫ φ_i = Σ_{K ∋ i} |K|/3`.
    pub fn new(space: &FeSpace) -> Result<Self> {
        if space.components() != 1 {
            return Err(Error::InvalidArgument(
                "the zero-mean constraint is defined on scalar spaces".into(),
            ));
        }
        let mesh = space.mesh();
        let mut weights = vec![0.0; space.n_dofs()];
        for t in 0..mesh.n_triangles() {
            let area = mesh.element_geometry(t)?.area;
            for &v in &mesh.triangles()[t] {
                weights[v] += area / 3.0;
            }
        }
        Ok(Self { weights })
    }

    pub fn integral(&self, coeffs: &[f64]) -> f64 {
        self.weights.iter().zip(coeffs).map(|(w, v)| w * v).sum()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Subtracts the mean: `v ← v − (w·v / |Ω|) 1`.
    pub fn project(&self, coeffs: &mut [f64]) {
        let mean = self.integral(coeffs) / self.measure();
        coeffs.iter_mut().for_each(|v| *v -= mean);
    }
}

pub fn zero_mean_constraint(space: &FeSpace) -> Result<ZeroMeanConstraint> {
    ZeroMeanConstraint::new(space)
}

/// Coefficients of a finite element function in a given space.
#[derive(Debug, Clone)]
pub struct Field {
    space: Arc<FeSpace>,
    coeffs: Vec<f64>,
}

impl Field {
    pub fn new(space: Arc<FeSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(Error::InvalidArgument(format!(
                "field has {} coefficients, space expects {}",
                coeffs.len(),
                space.n_dofs()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let coeffs = vec![0.0; space.n_dofs()];
        Self { space, coeffs }
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate(space: Arc<FeSpace>, f: impl Fn(Point) -> f64) -> Result<Self> {
        if space.components() != 1 {
            return Err(Error::InvalidArgument("scalar interpolation into a vector space".into()));
        }
        let coeffs = space.mesh().nodes().iter().map(|&p| f(p)).collect();
        Ok(Self { space, coeffs })
    }

    /// Nodal interpolant of a 2-vector function.
    pub fn interpolate_vector(space: Arc<FeSpace>, f: impl Fn(Point) -> [f64; 2]) -> Result<Self> {
        if space.components() != 2 {
            return Err(Error::InvalidArgument("vector interpolation needs a 2-component space".into()));
        }
        let n = space.n_nodes();
        let mut coeffs = vec![0.0; 2 * n];
        for (i, &p) in space.mesh().nodes().iter().enumerate() {
            let v = f(p);
            coeffs[i] = v[0];
            coeffs[n + i] = v[1];
        }
        Ok(Self { space, coeffs })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.space.n_nodes();
        &self.coeffs[c * n..(c + 1) * n]
    }

    /// Values of all components at `node`.
    pub fn node_values(&self, node: usize) -> Vec<f64> {
        (0..self.space.components())
            .map(|c| self.coeffs[self.space.dof(c, node)])
            .collect()
    }

    /// Values of all components at an arbitrary point, or `None` outside
    /// the mesh. `locator` must be built on this field's mesh.
    pub fn evaluate(&self, locator: &PointLocator, p: Point) -> Option<Vec<f64>> {
        let mesh = self.space.mesh();
        let (t, b) = locator.locate(mesh, p)?;
        let tri = mesh.triangles()[t];
        Some(
            (0..self.space.components())
                .map(|c| (0..3).map(|a| b[a] * self.coeffs[self.space.dof(c, tri[a])]).sum())
                .collect(),
        )
    }

    /// Values of all components at barycentric coordinates `bary` of
    /// triangle `t`.
    pub fn evaluate_in(&self, t: usize, bary: &[f64; 3]) -> Vec<f64> {
        let tri = self.space.mesh().triangles()[t];
        (0..self.space.components())
            .map(|c| (0..3).map(|a| bary[a] * self.coeffs[self.space.dof(c, tri[a])]).sum())
            .collect()
    }

    pub fn gather(&self, dofs: &[usize]) -> Vec<f64> {
        dofs.iter().map(|&d| self.coeffs[d]).collect()
    }

    /// Field that is `values` on `dofs` and zero elsewhere.
    pub fn scatter(space: Arc<FeSpace>, dofs: &[usize], values: &[f64]) -> Self {
        let mut f = Self::zeros(space);
        for (&d, &v) in dofs.iter().zip(values) {
            f.coeffs[d] = v;
        }
        f
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|v| a * v).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Self> {
        if !Arc::ptr_eq(&self.space, &other.space) && self.space.n_dofs() != other.space.n_dofs() {
            return Err(Error::InvalidArgument("fields live in different spaces".into()));
        }
        Ok(Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + a * y).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with columns `node,x,y,value[,value2]`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let header = match self.space.components() {
            1 => "node,x,y,value",
            _ => "node,x,y,value,value2",
        };
        let _ = writeln!(s, "{header}");
        self.write_rows(&mut s, None);
        s
    }

    pub(crate) fn write_rows(&self, s: &mut String, prefix: Option<&str>) {
        for (i, p) in self.space.mesh().nodes().iter().enumerate() {
            if let Some(name) = prefix {
                let _ = write!(s, "{name},");
            }
            let _ = write!(s, "{i},{},{}", p[0], p[1]);
            for v in self.node_values(i) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};

    fn space(n: usize, c: usize) -> Arc<FeSpace> {
        FeSpace::p1(Arc::new(build_structured_mesh(n, Domain::UnitSquare).unwrap()), c).unwrap()
    }

    #[test]
    fn dof_counts() {
        let s = space(2, 1);
        assert_eq!(s.n_dofs(), 9);
        assert_eq!(s.interior_dofs(), vec![4]);
        assert_eq!(space(2, 2).n_dofs(), 18);
        assert!(space(1, 1).interior_dofs().is_empty());
    }

    #[test]
    fn interior_and_boundary_partition() {
        let s = space(5, 2);
        let mut all = s.interior_dofs();
        all.extend(s.boundary_dofs());
        all.sort_unstable();
        assert_eq!(all, (0..s.n_dofs()).collect::<Vec<_>>());
        assert_eq!(s.dofs(Restriction::Boundary).len(), 2 * s.mesh().boundary_nodes().len());
    }

    #[test]
    fn constant_integrates_to_area() {
        let s = space(7, 1);
        let w = zero_mean_constraint(&s).unwrap();
        assert!((w.integral(&vec![1.0; s.n_dofs()]) - 1.0).abs() < 1e-12);
        assert!(w.weights.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sine_interpolant_has_small_mean() {
        let s = space(32, 1);
        let w = zero_mean_constraint(&s).unwrap();
        let f = Field::interpolate(s, |p| (2.0 * std::f64::consts::PI * p[0]).sin()).unwrap();
        assert!(w.integral(f.coeffs()).abs() <= 1e-3);
    }

    #[test]
    fn projection_removes_mean() {
        let s = space(6, 1);
        let w = zero_mean_constraint(&s).unwrap();
        let mut v: Vec<f64> = s.mesh().nodes().iter().map(|p| (p[0] * 3.0).exp() + p[1]).collect();
        w.project(&mut v);
        assert!(w.integral(&v).abs() < 1e-14);
    }

    #[test]
    fn vector_space_rejects_mean_constraint() {
        assert!(matches!(
            zero_mean_constraint(&space(3, 2)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn constant_interpolation() {
        let f = Field::interpolate(space(4, 1), |_| 2.5).unwrap();
        assert!(f.coeffs().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn csv_layout() {
        let f = Field::interpolate_vector(space(1, 2), |p| [p[0], p[1]]).unwrap();
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("node,x,y,value,value2"));
        assert_eq!(lines.next(), Some("0,0,0,0,0"));
        assert_eq!(csv.lines().count(), 5);
    }
}
