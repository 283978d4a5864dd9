//! Solves the Stokes problem through the reduced 3-block system and through
//! the condensed 2-block system, and compares the two.
//!
//! Run with `cargo run --example reduced_condensed`.

use std::sync::Arc;

use stokes_ext::extended::{assemble_reduced_3block, condense_2block, solve_reduced, ExtendedSpaces, StokesData};
use stokes_ext::verify::manufactured_stokes;
use stokes_ext::{build_structured_mesh, Domain};

fn main() -> stokes_ext::Result<()> {
    let case = manufactured_stokes("bubble8")?;
    let spaces = ExtendedSpaces::new(Arc::new(build_structured_mesh(16, Domain::UnitSquare)?))?;
    let data = StokesData::stokes(case.f.clone(), 0.0)?;
    let sys = assemble_reduced_3block(&data, &spaces)?;
    print!("reduced layout:\n{}", sys.layout.describe());

    let direct = solve_reduced(&sys)?;
    let condensed = condense_2block(&sys)?.solve(1e-13)?;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("direct residual {:.2e}", direct.residual);
    println!("condensed residual {:.2e} after {} GMRES iterations", condensed.residual, condensed.iterations);
    println!(
        "max |u diff| {:.2e}, max |p diff| {:.2e}",
        diff(direct.u.coeffs(), condensed.u.coeffs()),
        diff(direct.p.coeffs(), condensed.p.coeffs())
    );
    Ok(())
}
