//! Builds a structured mesh of the unit square and the P1 spaces on it.
//!
//! Run with `cargo run --example mesh_and_spaces`.

use std::sync::Arc;

use stokes_ext::spaces::Restriction;
use stokes_ext::{build_structured_mesh, Domain, FeSpace, Field, ZeroMeanConstraint};

fn main() -> stokes_ext::Result<()> {
    let mesh = Arc::new(build_structured_mesh(4, Domain::UnitSquare)?);
    println!(
        "n=4: {} nodes, {} triangles, {} boundary nodes, h = {:.4}",
        mesh.n_nodes(),
        mesh.n_triangles(),
        mesh.boundary_nodes().len(),
        mesh.h()
    );

    let scalar = FeSpace::p1(mesh.clone(), 1)?;
    let vector = FeSpace::p1(mesh, 2)?;
    println!("scalar space: {} dofs, {} interior", scalar.n_dofs(), scalar.dofs(Restriction::Interior).len());
    println!("vector space: {} dofs, {} interior", vector.n_dofs(), vector.interior_dofs().len());

    // Zero-mean pressure normalization.
    let mut p = Field::interpolate(scalar.clone(), |x| x[0] + x[1])?;
    let c = ZeroMeanConstraint::new(&scalar)?;
    println!("mean before {:.6}", c.integral(p.coeffs()) / c.measure());
    c.project(p.coeffs_mut());
    println!("mean after  {:.2e}", c.integral(p.coeffs()) / c.measure());
    Ok(())
}
