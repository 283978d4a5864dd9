//! Recovers all ten fields from a reduced solve and checks each equation.
//!
//! Run with `cargo run --example recovery`.

use stokes_ext::verify::algebra::recovery_check;
use stokes_ext::verify::manufactured_stokes;

fn main() -> stokes_ext::Result<()> {
    let report = recovery_check(&manufactured_stokes("stream4")?, 0.0, 8)?;
    for e in &report.equations {
        println!(
            "{:<45} relative {:.2e} (interior tests {:.2e}, boundary tests {:.2e})",
            e.equation, e.relative, e.relative_interior_tests, e.relative_boundary_tests
        );
    }
    println!("max |r_h|            {:.2e}", report.r_max);
    println!("max |t_h - pi_h f|   {:.2e}", report.t_defect);
    println!("max |z_h| on boundary {:.2e}", report.z_boundary_max);
    println!("max |z_h + lap_h u_h| {:.2e}", report.z_laplacian_defect);
    Ok(())
}
