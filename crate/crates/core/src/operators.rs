//! Discrete solution operators: Dirichlet Poisson solves (scalar and
//! vector), Helmholtz solves with natural boundary conditions (full and
//! zero-mean), L² projections onto `X_h` and `X_0h`, the discrete Laplacian
//! and a discrete H⁻¹ norm.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{
    assemble_helmholtz, assemble_mass, assemble_stiffness, load_vector, load_vector_vec,
};
use crate::linalg::SparseLu;
use crate::mesh::{build_structured_mesh, Domain, Mesh, Point, PointLocator};
use crate::quadrature::{map_point, TriangleRule};
use crate::spaces::{zero_mean_constraint, FeSpace, Field, Restriction, ZeroMeanConstraint};
use crate::sparse::{dot, BlockBuilder, SparseOperator};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// A right-hand side functional `⟨ψ, φ_i⟩`.
#[derive(Clone)]
pub enum RhsFunctional {
    /// Scalar L² density, integrated with the edge-midpoint rule.
    Scalar(ScalarFn),
    /// Vector L² density, integrated with the edge-midpoint rule.
    Vector(VectorFn),
    /// A finite element function used as a density (exact mass product).
    Field(Field),
    /// A precomputed load vector over all DOFs of the target space.
    Load(Vec<f64>),
}

impl std::fmt::Debug for RhsFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Scalar(_) => f.write_str("Scalar(..)"),
            Self::Vector(_) => f.write_str("Vector(..)"),
            Self::Field(x) => f.debug_tuple("Field").field(&x.coeffs().len()).finish(),
            Self::Load(v) => f.debug_tuple("Load").field(&v.len()).finish(),
        }
    }
}

impl RhsFunctional {
    pub fn scalar(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::Scalar(Arc::new(f))
    }

    pub fn vector(f: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self::Vector(Arc::new(f))
    }

    /// Load vector over all DOFs of `space`.
    pub fn load(&self, space: &FeSpace) -> Result<Vec<f64>> {
        match self {
            Self::Scalar(f) => load_vector(space, f.as_ref()),
            Self::Vector(f) => load_vector_vec(space, f.as_ref()),
            Self::Field(x) => {
                if x.space().n_dofs() != space.n_dofs() || !x.space().same_mesh(space) {
                    return Err(Error::MeshMismatch);
                }
                assemble_mass(space, Restriction::Full)?.mul_vec(x.coeffs())
            }
            Self::Load(v) => {
                if v.len() != space.n_dofs() {
                    return Err(Error::InvalidArgument(format!(
                        "load vector has length {}, space has {} DOFs",
                        v.len(),
                        space.n_dofs()
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    PoissonDirichletScalar,
    PoissonDirichletVector,
    Helmholtz,
    HelmholtzZeroMean,
    L2ProjectionFull,
    L2ProjectionInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelmholtzVariant {
    Full,
    ZeroMean,
}

/// A factorized elliptic operator on a subset of the DOFs of a space.
#[derive(Debug)]
pub struct EllipticSolver {
    kind: SolverKind,
    space: Arc<FeSpace>,
    active: Vec<usize>,
    matrix: SparseOperator,
    lu: SparseLu,
    constraint: Option<ZeroMeanConstraint>,
}

/// Relative residual required of every elliptic solve.
pub const ELLIPTIC_RESIDUAL: f64 = 1e-10;

impl EllipticSolver {
    pub fn new(kind: SolverKind, space: Arc<FeSpace>) -> Result<Self> {
        use SolverKind::*;
        let expect_components = |c: usize| {
            if space.components() == c {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{kind:?} needs a {c}-component space, got {}",
                    space.components()
                )))
            }
        };
        match kind {
            PoissonDirichletScalar | Helmholtz | HelmholtzZeroMean => expect_components(1)?,
            PoissonDirichletVector => expect_components(2)?,
            L2ProjectionFull | L2ProjectionInterior => {}
        }
        let interior = matches!(kind, PoissonDirichletScalar | PoissonDirichletVector | L2ProjectionInterior);
        let active = if interior {
            space.interior_dofs()
        } else {
            space.dofs(Restriction::Full)
        };
        if active.is_empty() {
            return Err(Error::DegenerateSpace(format!("{kind:?} has no active DOFs")));
        }
        let mut constraint = None;
        let matrix = match kind {
            PoissonDirichletScalar | PoissonDirichletVector => assemble_stiffness(&space, Restriction::Interior)?,
            Helmholtz => assemble_helmholtz(&space)?,
            HelmholtzZeroMean => {
                let h = assemble_helmholtz(&space)?;
                let w = zero_mean_constraint(&space)?;
                let n = h.rows();
                let mut b = BlockBuilder::new(&[n, 1], &[n, 1]);
                b.add(0, 0, &h, 1.0)?;
                b.add_column(0, 1, 0, &w.weights, 1.0);
                b.add_row(1, 0, 0, &w.weights, 1.0);
                constraint = Some(w);
                b.build()?
            }
            L2ProjectionFull => assemble_mass(&space, Restriction::Full)?,
            L2ProjectionInterior => assemble_mass(&space, Restriction::Interior)?,
        };
        let lu = SparseLu::new(&matrix, &format!("{kind:?}"))?.with_tolerance(ELLIPTIC_RESIDUAL);
        Ok(Self {
            kind,
            space,
            active,
            matrix,
            lu,
            constraint,
        })
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    /// The factorized matrix (including the multiplier row if present).
    pub fn matrix(&self) -> &SparseOperator {
        &self.matrix
    }

    /// Solves with a load vector given over all DOFs of the space; entries
    /// on inactive DOFs are ignored and the result vanishes there.
    pub fn solve_load(&self, load: &[f64]) -> Result<Field> {
        if load.len() != self.space.n_dofs() {
            return Err(Error::InvalidArgument(format!(
                "load has length {}, space has {} DOFs",
                load.len(),
                self.space.n_dofs()
            )));
        }
        let mut b: Vec<f64> = self.active.iter().map(|&d| load[d]).collect();
        if self.constraint.is_some() {
            b.push(0.0);
        }
        let x = self.lu.solve(&b)?;
        Ok(Field::scatter(self.space.clone(), &self.active, &x[..self.active.len()]))
    }

    pub fn solve(&self, rhs: &RhsFunctional) -> Result<Field> {
        self.solve_load(&rhs.load(&self.space)?)
    }
}

/// Dirichlet Poisson solve `(grad q_h, grad λ_h) = ⟨ψ, λ_h⟩` over the
/// zero-trace subspace; scalar or vector depending on the space.
pub fn solve_poisson_dirichlet(rhs: &RhsFunctional, space: Arc<FeSpace>) -> Result<Field> {
    let kind = if space.components() == 1 {
        SolverKind::PoissonDirichletScalar
    } else {
        SolverKind::PoissonDirichletVector
    };
    EllipticSolver::new(kind, space)?.solve(rhs)
}

/// Helmholtz solve `(grad φ_h, grad μ_h) + (φ_h, μ_h) = ⟨ψ, μ_h⟩` over the
/// full space or its zero-mean subspace.
pub fn solve_helmholtz(rhs: &RhsFunctional, space: Arc<FeSpace>, variant: HelmholtzVariant) -> Result<Field> {
    let kind = match variant {
        HelmholtzVariant::Full => SolverKind::Helmholtz,
        HelmholtzVariant::ZeroMean => SolverKind::HelmholtzZeroMean,
    };
    EllipticSolver::new(kind, space)?.solve(rhs)
}

/// L² projection onto the full space (`Full`) or onto the zero-trace
/// subspace (`Interior`).
pub fn l2_project(rhs: &RhsFunctional, space: Arc<FeSpace>, variant: Restriction) -> Result<Field> {
    let kind = match variant {
        Restriction::Full => SolverKind::L2ProjectionFull,
        Restriction::Interior => SolverKind::L2ProjectionInterior,
        Restriction::Boundary => return Err(Error::InvalidRestriction(variant)),
    };
    EllipticSolver::new(kind, space)?.solve(rhs)
}

/// The discrete Laplacian `ξ_h ∈ X_0h` with `(ξ_h, w_h) = (grad u, grad w_h)`
/// for every zero-trace `w_h`. `u` itself may have nonzero boundary values.
pub fn discrete_laplacian(u: &Field) -> Result<Field> {
    let space = u.space().clone();
    let a = assemble_stiffness(&space, Restriction::Full)?;
    let load = a.mul_vec(u.coeffs())?;
    EllipticSolver::new(SolverKind::L2ProjectionInterior, space)?.solve_load(&load)
}

/// Discrete H⁻¹ norm of a load functional over the zero-trace subspace:
/// solves `(grad w, grad v) = ⟨g, v⟩` and returns `√⟨g, w⟩`.
fn riesz_dual_norm(space: Arc<FeSpace>, load: &[f64]) -> Result<f64> {
    let w = EllipticSolver::new(
        if space.components() == 1 {
            SolverKind::PoissonDirichletScalar
        } else {
            SolverKind::PoissonDirichletVector
        },
        space,
    )?
    .solve_load(load)?;
    Ok(dot(load, w.coeffs()).max(0.0).sqrt())
}

/// Discrete H⁻¹ norm of a field `g ∈ X_h`, measured with the stiffness
/// seminorm on the zero-trace subspace of the same mesh.
pub fn dual_norm_surrogate(g: &Field) -> Result<f64> {
    let space = g.space().clone();
    let load = assemble_mass(&space, Restriction::Full)?.mul_vec(g.coeffs())?;
    riesz_dual_norm(space, &load)
}

/// Discrete H⁻¹ norm of `f − g_h` measured on a nested refinement of the
/// structured mesh of `g_h` (`refine` subdivisions per cell).
///
/// `f` is integrated with the seven-point rule on the fine triangles and
/// `g_h` is evaluated exactly there. Unlike [`dual_norm_surrogate`] this sees
/// the part of `f − g_h` that is orthogonal to the coarse test space.
pub fn dual_norm_surrogate_refined(f: &dyn Fn(Point) -> Vec<f64>, g: &Field, n: usize, refine: usize) -> Result<f64> {
    if refine == 0 {
        return Err(Error::InvalidArgument("refinement factor must be at least 1".into()));
    }
    let coarse = g.space().mesh();
    let fine: Arc<Mesh> = Arc::new(build_structured_mesh(n * refine, Domain::UnitSquare)?);
    let comps = g.space().components();
    let fspace = FeSpace::p1(fine.clone(), comps)?;
    let locator = PointLocator::new(coarse);
    let rule = TriangleRule::seven_point();
    let mut load = vec![0.0; fspace.n_dofs()];
    for t in 0..fine.n_triangles() {
        let geo = fine.element_geometry(t)?;
        let v = fine.vertices(t);
        let tri = fine.triangles()[t];
        // All quadrature points of a fine triangle lie in one coarse triangle.
        let centroid = map_point(&v, &[1.0 / 3.0; 3]);
        let (ct, _) = locator
            .locate(coarse, centroid)
            .ok_or_else(|| Error::InvalidMesh("refined mesh leaves the coarse mesh".into()))?;
        let cg = coarse.element_geometry(ct)?;
        let c0 = coarse.nodes()[coarse.triangles()[ct][0]];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = map_point(&v, bary);
            let d = [x[0] - c0[0], x[1] - c0[1]];
            let l1 = cg.grad_bary[1][0] * d[0] + cg.grad_bary[1][1] * d[1];
            let l2 = cg.grad_bary[2][0] * d[0] + cg.grad_bary[2][1] * d[1];
            let gx = g.evaluate_in(ct, &[1.0 - l1 - l2, l1, l2]);
            let fx = f(x);
            for c in 0..comps {
                let r = fx[c] - gx[c];
                for a in 0..3 {
                    load[fspace.dof(c, tri[a])] += geo.area * w * r * bary[a];
                }
            }
        }
    }
    riesz_dual_norm(fspace, &load)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::assemble_stiffness;
    use crate::sparse::max_abs;
    use std::f64::consts::PI;

    fn space(n: usize, c: usize) -> Arc<FeSpace> {
        FeSpace::p1(Arc::new(build_structured_mesh(n, Domain::UnitSquare).unwrap()), c).unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        let q = solve_poisson_dirichlet(&RhsFunctional::scalar(|_| 0.0), space(4, 1)).unwrap();
        assert_eq!(q.max_abs(), 0.0);
        let xi = discrete_laplacian(&Field::zeros(space(4, 2))).unwrap();
        assert_eq!(xi.max_abs(), 0.0);
        assert_eq!(dual_norm_surrogate(&Field::zeros(space(4, 2))).unwrap(), 0.0);
    }

    #[test]
    fn empty_interior_is_degenerate() {
        assert!(matches!(
            solve_poisson_dirichlet(&RhsFunctional::scalar(|_| 1.0), space(1, 1)),
            Err(Error::DegenerateSpace(_))
        ));
    }

    #[test]
    fn poisson_is_linear() {
        let s = space(6, 1);
        let f1 = |p: Point| p[0] * p[1];
        let f2 = |p: Point| (3.0 * p[0]).cos();
        let a = solve_poisson_dirichlet(&RhsFunctional::scalar(f1), s.clone()).unwrap();
        let b = solve_poisson_dirichlet(&RhsFunctional::scalar(f2), s.clone()).unwrap();
        let c = solve_poisson_dirichlet(&RhsFunctional::scalar(move |p| 2.0 * f1(p) - 0.5 * f2(p)), s).unwrap();
        let combo = a.scaled(2.0).axpy(-0.5, &b).unwrap();
        assert!(c.coeffs().iter().zip(combo.coeffs()).all(|(x, y)| (x - y).abs() < 1e-11));
    }

    #[test]
    fn helmholtz_reproduces_constants() {
        let phi = solve_helmholtz(&RhsFunctional::scalar(|_| 1.0), space(5, 1), HelmholtzVariant::Full).unwrap();
        assert!(phi.coeffs().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_mean_helmholtz_has_zero_mean() {
        let s = space(16, 1);
        let rhs = RhsFunctional::scalar(|p| (1.0 + 2.0 * PI * PI) * (PI * p[0]).cos() * (PI * p[1]).cos());
        let full = solve_helmholtz(&rhs, s.clone(), HelmholtzVariant::Full).unwrap();
        let zm = solve_helmholtz(&rhs, s.clone(), HelmholtzVariant::ZeroMean).unwrap();
        let w = zero_mean_constraint(&s).unwrap();
        assert!(w.integral(zm.coeffs()).abs() < 1e-12);
        // The full solution has zero mean up to quadrature, so both agree closely.
        assert!(max_abs(&full.axpy(-1.0, &zm).unwrap().into_coeffs()) < 1e-3);
    }

    #[test]
    fn projection_is_idempotent() {
        let s = space(5, 2);
        let f = Field::interpolate_vector(s.clone(), |p| [p[0] * p[0], (p[1] * 4.0).sin()]).unwrap();
        let pf = l2_project(&RhsFunctional::Field(f.clone()), s.clone(), Restriction::Full).unwrap();
        assert!(f.coeffs().iter().zip(pf.coeffs()).all(|(a, b)| (a - b).abs() < 1e-12));
        let one = l2_project(&RhsFunctional::vector(|_| [1.0, 1.0]), s, Restriction::Full).unwrap();
        assert!(one.coeffs().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn interior_projection_vanishes_on_boundary() {
        let s = space(6, 2);
        let p = l2_project(&RhsFunctional::vector(|_| [1.0, 2.0]), s.clone(), Restriction::Interior).unwrap();
        assert!(s.boundary_dofs().iter().all(|&d| p.coeffs()[d] == 0.0));
    }

    #[test]
    fn discrete_laplacian_defining_equation() {
        let s = space(7, 2);
        let mut u = Field::interpolate_vector(s.clone(), |p| [p[0] * (1.0 - p[0]) * p[1], (p[0] + p[1]).sin()]).unwrap();
        for &d in &s.boundary_dofs() {
            u.coeffs_mut()[d] = 0.0;
        }
        let xi = discrete_laplacian(&u).unwrap();
        let m = assemble_mass(&s, Restriction::Full).unwrap();
        let a = assemble_stiffness(&s, Restriction::Full).unwrap();
        let lhs = m.mul_vec(xi.coeffs()).unwrap();
        let rhs = a.mul_vec(u.coeffs()).unwrap();
        let scale = max_abs(&rhs);
        for &d in &s.interior_dofs() {
            assert!((lhs[d] - rhs[d]).abs() <= 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn surrogate_is_homogeneous() {
        let s = space(8, 2);
        let g = Field::interpolate_vector(s, |p| [p[0].exp(), p[1] * p[0]]).unwrap();
        let a = dual_norm_surrogate(&g).unwrap();
        let b = dual_norm_surrogate(&g.scaled(-3.0)).unwrap();
        assert!((b - 3.0 * a).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn refined_surrogate_of_a_p1_field_is_zero() {
        let s = space(4, 1);
        let g = Field::interpolate(s, |p| 1.0 + p[0] - 2.0 * p[1]).unwrap();
        let v = dual_norm_surrogate_refined(&|p| vec![1.0 + p[0] - 2.0 * p[1]], &g, 4, 3).unwrap();
        assert!(v < 1e-13);
    }
}
