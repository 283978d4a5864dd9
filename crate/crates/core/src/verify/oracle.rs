//! Independent reference solver: equal-order P1/P1 Stokes with
//! Brezzi–Pitkäranta pressure stabilization.
//!
//! It shares only the mesh, space and form layers with the extended
//! system, so agreement between the two is evidence rather than
//! tautology. It is a cross-check, never ground truth.

use std::sync::Arc;

use crate::error::Result;
use crate::forms::{assemble_div_coupling, assemble_stiffness, load_vector_vec};
use crate::linalg::SparseLu;
use crate::mesh::{Mesh, Point};
use crate::spaces::{FeSpace, Field, Restriction};
use crate::sparse::{BlockBuilder, SparseOperator};

/// Stabilization weight `δ` in `δ h² (grad p, grad λ)`.
pub const ORACLE_DELTA: f64 = 0.05;

/// Oracle velocity and pressure.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub u: Field,
    pub p: Field,
    pub multiplier: f64,
    pub residual: f64,
}

/// The oracle saddle-point matrix
/// `[[A, −B, 0], [−Bᵀ, −δh²D, w], [0, wᵀ, 0]]` with stabilization weight
/// `delta` (zero gives the unstabilized equal-order matrix).
pub fn oracle_matrix(vspace: &FeSpace, pspace: &FeSpace, delta: f64) -> Result<SparseOperator> {
    let a = assemble_stiffness(vspace, Restriction::Interior)?;
    let b = assemble_div_coupling(vspace, pspace)?;
    let d = assemble_stiffness(pspace, Restriction::Full)?;
    let w = crate::spaces::zero_mean_constraint(pspace)?.weights;
    let h = pspace.mesh().h();
    let (nu, np) = (a.rows(), pspace.n_dofs());
    let mut bb = BlockBuilder::new(&[nu, np, 1], &[nu, np, 1]);
    bb.add(0, 0, &a, 1.0)?;
    bb.add(0, 1, &b, -1.0)?;
    bb.add(1, 0, &b.transpose(), -1.0)?;
    if delta != 0.0 {
        bb.add(1, 1, &d, -delta * h * h)?;
    }
    bb.add_column(1, 2, 0, &w, 1.0);
    bb.add_row(2, 1, 0, &w, 1.0);
    bb.build()
}

/// Solves the stabilized P1/P1 Stokes problem with forcing `f`,
/// homogeneous Dirichlet velocity and zero-mean pressure.
pub fn reference_oracle_solve(f: &dyn Fn(Point) -> [f64; 2], mesh: Arc<Mesh>) -> Result<OracleSolution> {
    let vspace = FeSpace::p1(mesh.clone(), 2)?;
    let pspace = FeSpace::p1(mesh, 1)?;
    let k = oracle_matrix(&vspace, &pspace, ORACLE_DELTA)?;
    let v_int = vspace.interior_dofs();
    let load = load_vector_vec(&vspace, f)?;
    let mut rhs = vec![0.0; k.rows()];
    for (slot, &i) in rhs.iter_mut().zip(&v_int) {
        *slot = load[i];
    }
    let lu = SparseLu::new(&k, "stabilized P1/P1 oracle")?.with_tolerance(1e-10);
    let x = lu.solve(&rhs)?;
    let residual = lu.relative_residual(&x, &rhs);
    let nu = v_int.len();
    let np = pspace.n_dofs();
    Ok(OracleSolution {
        u: Field::scatter(vspace, &v_int, &x[..nu]),
        p: Field::new(pspace, x[nu..nu + np].to_vec())?,
        multiplier: x[nu + np],
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};
    use crate::spaces::zero_mean_constraint;
    use crate::verify::cases::manufactured_stokes;
    use crate::verify::norms::error_norms;

    fn mesh(n: usize) -> Arc<Mesh> {
        Arc::new(build_structured_mesh(n, Domain::UnitSquare).unwrap())
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let s = reference_oracle_solve(&|_| [0.0, 0.0], mesh(6)).unwrap();
        assert_eq!(s.u.max_abs(), 0.0);
        assert_eq!(s.p.max_abs(), 0.0);
    }

    #[test]
    fn pressure_has_zero_mean() {
        let case = manufactured_stokes("stream4").unwrap();
        let s = reference_oracle_solve(&*case.f, mesh(8)).unwrap();
        let c = zero_mean_constraint(s.p.space()).unwrap();
        assert!(c.integral(s.p.coeffs()).abs() < 1e-10);
    }

    #[test]
    fn matrix_is_symmetric() {
        let m = mesh(4);
        let k = oracle_matrix(&FeSpace::p1(m.clone(), 2).unwrap(), &FeSpace::p1(m, 1).unwrap(), ORACLE_DELTA).unwrap();
        assert!(k.symmetry_defect() < 1e-14);
    }

    #[test]
    fn velocity_converges_at_first_order() {
        let case = manufactured_stokes("stream4").unwrap();
        let err = |n| {
            let s = reference_oracle_solve(&*case.f, mesh(n)).unwrap();
            let g = case.grad_u.clone();
            error_norms(&s.u, &|x| (case.u)(x).to_vec(), Some(&move |x| g(x).to_vec())).unwrap().h1()
        };
        let (e1, e2) = (err(16), err(32));
        assert!((e1 / e2).log2() > 0.9, "observed order {}", (e1 / e2).log2());
    }
}
