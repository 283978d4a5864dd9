//! Assembles and solves the ten-field extended system directly.
//!
//! Run with `cargo run --example monolithic`.

use std::sync::Arc;

use stokes_ext::extended::{assemble_monolithic, equation_residuals, solve_monolithic, ExtendedSpaces, StokesData, ZMode};
use stokes_ext::verify::manufactured_stokes;
use stokes_ext::{build_structured_mesh, Domain};

fn main() -> stokes_ext::Result<()> {
    let case = manufactured_stokes("stream4")?;
    let spaces = ExtendedSpaces::new(Arc::new(build_structured_mesh(4, Domain::UnitSquare)?))?;
    let data = StokesData::stokes(case.f.clone(), 0.0)?;
    let sys = assemble_monolithic(&data, &spaces, ZMode::Interior)?;
    println!("block layout (name offset size), {} unknowns, {} nonzeros:", sys.dim(), sys.matrix.nnz());
    print!("{}", sys.layout.describe());

    let (state, residual) = solve_monolithic(&sys)?;
    println!("relative residual {residual:.2e}");
    for e in equation_residuals(&state, &data, &spaces)? {
        println!("  {:<45} {:.2e}", e.equation, e.relative);
    }
    println!("max |r_h| = {:.3e}", state.r.max_abs());
    Ok(())
}
