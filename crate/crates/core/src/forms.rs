//! Assembly of the bilinear forms and load vectors on P1 spaces.
//!
//! Boundary conditions are imposed by deleting rows and columns: an
//! `Interior` restriction keeps only interior DOFs of the space. For vector
//! spaces the component-blocked layout of [`FeSpace`] is used for both rows
//! and columns.

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Mesh, Point};
use crate::quadrature::{map_point, TriangleRule};
use crate::spaces::{FeSpace, Restriction};
use crate::sparse::SparseOperator;

type ElementKernel<'a> = dyn Fn(&ElementGeometry, usize, usize) -> f64 + 'a;

/// Assembles a componentwise-diagonal form `Σ_c ∫ k(φ_b, φ_a)` over the
/// full space.
fn assemble_diagonal(space: &FeSpace, kernel: &ElementKernel<'_>) -> Result<SparseOperator> {
    let mesh = space.mesh();
    let nc = space.components();
    let mut t = Vec::with_capacity(9 * nc * mesh.n_triangles());
    for e in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(e)?;
        let tri = mesh.triangles()[e];
        for a in 0..3 {
            for b in 0..3 {
                let v = kernel(&g, a, b);
                for c in 0..nc {
                    t.push((space.dof(c, tri[a]), space.dof(c, tri[b]), v));
                }
            }
        }
    }
    SparseOperator::from_triplets(space.n_dofs(), space.n_dofs(), &t)
}

fn restrict_square(space: &FeSpace, m: SparseOperator, r: Restriction) -> Result<SparseOperator> {
    match r {
        Restriction::Full => Ok(m),
        Restriction::Interior => {
            let d = space.interior_dofs();
            m.submatrix(&d, &d)
        }
        Restriction::Boundary => Err(Error::InvalidRestriction(r)),
    }
}

fn stiffness_kernel(g: &ElementGeometry, a: usize, b: usize) -> f64 {
    g.area * (g.grad_bary[a][0] * g.grad_bary[b][0] + g.grad_bary[a][1] * g.grad_bary[b][1])
}

fn mass_kernel(g: &ElementGeometry, a: usize, b: usize) -> f64 {
    g.area / 12.0 * if a == b { 2.0 } else { 1.0 }
}

/// `A[i][j] = ∫ grad φ_j · grad φ_i`, componentwise for vector spaces.
pub fn assemble_stiffness(space: &FeSpace, restrict: Restriction) -> Result<SparseOperator> {
    restrict_square(space, assemble_diagonal(space, &stiffness_kernel)?, restrict)
}

/// `M[i][j] = ∫ φ_j φ_i` with the exact P1 element matrix.
pub fn assemble_mass(space: &FeSpace, restrict: Restriction) -> Result<SparseOperator> {
    restrict_square(space, assemble_diagonal(space, &mass_kernel)?, restrict)
}

/// Stiffness plus mass on the full space (natural boundary conditions).
pub fn assemble_helmholtz(space: &FeSpace) -> Result<SparseOperator> {
    assemble_diagonal(space, &|g, a, b| stiffness_kernel(g, a, b) + mass_kernel(g, a, b))
}

fn check_pair(vspace: &FeSpace, sspace: &FeSpace) -> Result<()> {
    if !vspace.same_mesh(sspace) {
        return Err(Error::MeshMismatch);
    }
    if sspace.components() != 1 {
        return Err(Error::InvalidArgument("expected a scalar space".into()));
    }
    if vspace.components() != 2 {
        return Err(Error::InvalidArgument("expected a 2-component vector space".into()));
    }
    Ok(())
}

/// `C[λ_a][Φ_(c,b)] = ∫ φ_b ∂_c λ_a` over all scalar and vector DOFs.
fn grad_coupling_full(vspace: &FeSpace, sspace: &FeSpace) -> Result<SparseOperator> {
    check_pair(vspace, sspace)?;
    let mesh = sspace.mesh();
    let mut t = Vec::with_capacity(18 * mesh.n_triangles());
    for e in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(e)?;
        let tri = mesh.triangles()[e];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..2 {
                    t.push((tri[a], vspace.dof(c, tri[b]), g.area / 3.0 * g.grad_bary[a][c]));
                }
            }
        }
    }
    SparseOperator::from_triplets(sspace.n_dofs(), vspace.n_dofs(), &t)
}

/// `B[i][j] = ∫ φ_j div Φ_i`, rows on interior velocity DOFs, columns on
/// all pressure DOFs.
pub fn assemble_div_coupling(vspace: &FeSpace, pspace: &FeSpace) -> Result<SparseOperator> {
    check_pair(vspace, pspace)?;
    let mesh = pspace.mesh();
    let mut t = Vec::with_capacity(18 * mesh.n_triangles());
    for e in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(e)?;
        let tri = mesh.triangles()[e];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..2 {
                    t.push((vspace.dof(c, tri[a]), tri[b], g.area / 3.0 * g.grad_bary[a][c]));
                }
            }
        }
    }
    let full = SparseOperator::from_triplets(vspace.n_dofs(), pspace.n_dofs(), &t)?;
    let all_p: Vec<usize> = (0..pspace.n_dofs()).collect();
    full.submatrix(&vspace.interior_dofs(), &all_p)
}

/// `C[i][j] = ∫ Φ_j · grad λ_i`: rows on the test DOFs selected by
/// `restrict`, columns on all vector DOFs.
pub fn assemble_grad_coupling(
    vspace: &FeSpace,
    test_space: &FeSpace,
    restrict: Restriction,
) -> Result<SparseOperator> {
    let full = grad_coupling_full(vspace, test_space)?;
    let cols: Vec<usize> = (0..vspace.n_dofs()).collect();
    full.submatrix(&test_space.dofs(restrict), &cols)
}

fn check_scalar(space: &FeSpace) -> Result<()> {
    if space.components() != 1 {
        return Err(Error::InvalidArgument("expected a scalar space".into()));
    }
    Ok(())
}

fn check_vector(space: &FeSpace) -> Result<()> {
    if space.components() != 2 {
        return Err(Error::InvalidArgument("expected a 2-component vector space".into()));
    }
    Ok(())
}

/// Iterates `(element, area, quadrature point, barycentrics, weight)` for a
/// data rule over every triangle.
fn for_each_qp(
    mesh: &Mesh,
    rule: &TriangleRule,
    mut f: impl FnMut(usize, &ElementGeometry, Point, &[f64; 3], f64),
) -> Result<()> {
    for e in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(e)?;
        let v = mesh.vertices(e);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            f(e, &g, map_point(&v, bary), bary, *w);
        }
    }
    Ok(())
}

/// `b_i = ∫ f φ_i` with the edge-midpoint rule, over all DOFs.
pub fn load_vector(space: &FeSpace, f: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    check_scalar(space)?;
    let mesh = space.mesh();
    let mut b = vec![0.0; space.n_dofs()];
    for_each_qp(mesh, &TriangleRule::edge_midpoints(), |e, g, x, bary, w| {
        let fx = f(x);
        for (a, &node) in mesh.triangles()[e].iter().enumerate() {
            b[node] += g.area * w * fx * bary[a];
        }
    })?;
    Ok(b)
}

/// `b_(c,i) = ∫ f_c φ_i` with the edge-midpoint rule, over all DOFs.
pub fn load_vector_vec(space: &FeSpace, f: &dyn Fn(Point) -> [f64; 2]) -> Result<Vec<f64>> {
    check_vector(space)?;
    let mesh = space.mesh();
    let mut b = vec![0.0; space.n_dofs()];
    for_each_qp(mesh, &TriangleRule::edge_midpoints(), |e, g, x, bary, w| {
        let fx = f(x);
        for (a, &node) in mesh.triangles()[e].iter().enumerate() {
            for c in 0..2 {
                b[space.dof(c, node)] += g.area * w * fx[c] * bary[a];
            }
        }
    })?;
    Ok(b)
}

/// `b_i = ∫ f · grad φ_i` for a vector density `f`, over all scalar DOFs.
pub fn grad_load_vector(space: &FeSpace, f: &dyn Fn(Point) -> [f64; 2]) -> Result<Vec<f64>> {
    check_scalar(space)?;
    let mesh = space.mesh();
    let mut b = vec![0.0; space.n_dofs()];
    for_each_qp(mesh, &TriangleRule::edge_midpoints(), |e, g, x, _, w| {
        let fx = f(x);
        for (a, &node) in mesh.triangles()[e].iter().enumerate() {
            b[node] += g.area * w * (fx[0] * g.grad_bary[a][0] + fx[1] * g.grad_bary[a][1]);
        }
    })?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};
    use crate::sparse::dot;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn reference_mesh() -> Arc<Mesh> {
        Arc::new(Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![0, 1, 2]).unwrap())
    }

    fn square(n: usize) -> Arc<Mesh> {
        Arc::new(build_structured_mesh(n, Domain::UnitSquare).unwrap())
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn smallest_eigenvalue(m: &SparseOperator) -> f64 {
        let d = m.to_dense();
        let n = d.len();
        let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| d[i][j]);
        mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn reference_stiffness() {
        let s = FeSpace::p1(reference_mesh(), 1).unwrap();
        let a = assemble_stiffness(&s, Restriction::Full).unwrap();
        let expected = vec![vec![1.0, -0.5, -0.5], vec![-0.5, 0.5, 0.0], vec![-0.5, 0.0, 0.5]];
        assert!(close(&a.to_dense(), &expected, 1e-15));
    }

    #[test]
    fn reference_mass() {
        let s = FeSpace::p1(reference_mesh(), 1).unwrap();
        let m = assemble_mass(&s, Restriction::Full).unwrap();
        let expected: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 2.0 / 24.0 } else { 1.0 / 24.0 }).collect())
            .collect();
        assert!(close(&m.to_dense(), &expected, 1e-15));
    }

    #[test]
    fn stiffness_kernel_and_symmetry() {
        let s = FeSpace::p1(square(6), 1).unwrap();
        let a = assemble_stiffness(&s, Restriction::Full).unwrap();
        let ones = vec![1.0; s.n_dofs()];
        assert!(a.mul_vec(&ones).unwrap().iter().all(|v| v.abs() < 1e-13));
        assert!(a.symmetry_defect() < 1e-13);
    }

    #[test]
    fn five_point_stencil_at_single_interior_node() {
        let s = FeSpace::p1(square(2), 1).unwrap();
        let a = assemble_stiffness(&s, Restriction::Interior).unwrap();
        assert_eq!(a.rows(), 1);
        assert!((a.get(0, 0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_restriction_rejected() {
        let s = FeSpace::p1(square(2), 1).unwrap();
        assert!(matches!(
            assemble_stiffness(&s, Restriction::Boundary),
            Err(Error::InvalidRestriction(Restriction::Boundary))
        ));
    }

    #[test]
    fn mass_total_and_definiteness() {
        let s = FeSpace::p1(square(4), 1).unwrap();
        let m = assemble_mass(&s, Restriction::Full).unwrap();
        let ones = vec![1.0; s.n_dofs()];
        assert!((dot(&ones, &m.mul_vec(&ones).unwrap()) - 1.0).abs() < 1e-13);
        assert!(smallest_eigenvalue(&m) > 0.0);
        assert!(m.symmetry_defect() < 1e-13);
    }

    #[test]
    fn helmholtz_is_sum_and_spd() {
        let s = FeSpace::p1(square(4), 1).unwrap();
        let h = assemble_helmholtz(&s).unwrap();
        let sum = assemble_stiffness(&s, Restriction::Full)
            .unwrap()
            .linear_combination(1.0, &assemble_mass(&s, Restriction::Full).unwrap(), 1.0)
            .unwrap();
        assert!(close(&h.to_dense(), &sum.to_dense(), 1e-14));
        assert!(smallest_eigenvalue(&h) > 0.0);
    }

    #[test]
    fn green_identity_between_couplings() {
        let mesh = square(5);
        let v = FeSpace::p1(mesh.clone(), 2).unwrap();
        let p = FeSpace::p1(mesh, 1).unwrap();
        let b = assemble_div_coupling(&v, &p).unwrap();
        let c = assemble_grad_coupling(&v, &p, Restriction::Full).unwrap();
        let c_int = c.submatrix(&(0..p.n_dofs()).collect::<Vec<_>>(), &v.interior_dofs()).unwrap();
        let diff = b.linear_combination(1.0, &c_int.transpose(), 1.0).unwrap();
        assert!(diff.max_abs() < 1e-13);
    }

    #[test]
    fn constant_pressure_pairs_to_zero() {
        let mesh = square(6);
        let v = FeSpace::p1(mesh.clone(), 2).unwrap();
        let p = FeSpace::p1(mesh, 1).unwrap();
        let b = assemble_div_coupling(&v, &p).unwrap();
        let ones = vec![1.0; p.n_dofs()];
        assert!(b.mul_vec(&ones).unwrap().iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn constant_field_against_interior_gradients() {
        let mesh = square(6);
        let v = FeSpace::p1(mesh.clone(), 2).unwrap();
        let p = FeSpace::p1(mesh, 1).unwrap();
        let c = assemble_grad_coupling(&v, &p, Restriction::Interior).unwrap();
        let cb = assemble_grad_coupling(&v, &p, Restriction::Boundary).unwrap();
        assert_eq!(c.rows() + cb.rows(), p.n_dofs());
        let mut e1 = vec![0.0; v.n_dofs()];
        e1[..v.n_nodes()].iter_mut().for_each(|x| *x = 1.0);
        assert!(c.mul_vec(&e1).unwrap().iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn load_of_linear_function_is_exact() {
        let s = FeSpace::p1(square(3), 1).unwrap();
        let m = assemble_mass(&s, Restriction::Full).unwrap();
        let lin: Vec<f64> = s.mesh().nodes().iter().map(|p| 2.0 * p[0] - p[1] + 0.5).collect();
        let b = load_vector(&s, &|p| 2.0 * p[0] - p[1] + 0.5).unwrap();
        let mb = m.mul_vec(&lin).unwrap();
        assert!(b.iter().zip(&mb).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn grad_load_matches_coupling_on_p1_fields() {
        let mesh = square(4);
        let v = FeSpace::p1(mesh.clone(), 2).unwrap();
        let p = FeSpace::p1(mesh, 1).unwrap();
        let c = assemble_grad_coupling(&v, &p, Restriction::Full).unwrap();
        let f = |x: Point| [x[0] + 2.0 * x[1], 1.0 - x[0]];
        let coeffs: Vec<f64> = (0..2)
            .flat_map(|k| v.mesh().nodes().iter().map(move |&x| f(x)[k]))
            .collect();
        let direct = grad_load_vector(&p, &f).unwrap();
        let via_c = c.mul_vec(&coeffs).unwrap();
        assert!(direct.iter().zip(&via_c).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn mismatched_meshes_rejected() {
        let v = FeSpace::p1(square(2), 2).unwrap();
        let p = FeSpace::p1(square(2), 1).unwrap();
        assert!(matches!(assemble_div_coupling(&v, &p), Err(Error::MeshMismatch)));
    }

    proptest! {
        #[test]
        fn scaling_law(s in 0.1f64..10.0) {
            let mesh = square(3);
            let scaled = Arc::new(mesh.scaled(s).unwrap());
            let a = FeSpace::p1(mesh, 1).unwrap();
            let b = FeSpace::p1(scaled, 1).unwrap();
            let ka = assemble_stiffness(&a, Restriction::Full).unwrap();
            let kb = assemble_stiffness(&b, Restriction::Full).unwrap();
            prop_assert!(close(&ka.to_dense(), &kb.to_dense(), 1e-12));
            let ma = assemble_mass(&a, Restriction::Full).unwrap().scaled(s * s);
            let mb = assemble_mass(&b, Restriction::Full).unwrap();
            prop_assert!(close(&ma.to_dense(), &mb.to_dense(), 1e-12 * s * s));
        }

        #[test]
        fn discrete_green_identity(seed in proptest::collection::vec(-1.0f64..1.0, 64)) {
            let mesh = square(4);
            let v = FeSpace::p1(mesh.clone(), 2).unwrap();
            let p = FeSpace::p1(mesh, 1).unwrap();
            let b = assemble_div_coupling(&v, &p).unwrap();
            let c = assemble_grad_coupling(&v, &p, Restriction::Full).unwrap();
            let pbar: Vec<f64> = (0..p.n_dofs()).map(|i| seed[i % 64]).collect();
            let wint: Vec<f64> = (0..b.rows()).map(|i| seed[(7 * i + 3) % 64]).collect();
            let mut wfull = vec![0.0; v.n_dofs()];
            for (k, &d) in v.interior_dofs().iter().enumerate() { wfull[d] = wint[k]; }
            let lhs = dot(&wint, &b.mul_vec(&pbar).unwrap());
            let rhs = -dot(&pbar, &c.mul_vec(&wfull).unwrap());
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
