//! The discrete solution operators: Dirichlet Poisson, L² projections and
//! the discrete Laplacian.
//!
//! Run with `cargo run --example operators`.

use std::f64::consts::PI;
use std::sync::Arc;

use stokes_ext::operators::{discrete_laplacian, l2_project, solve_poisson_dirichlet, RhsFunctional};
use stokes_ext::spaces::Restriction;
use stokes_ext::verify::error_norms;
use stokes_ext::{build_structured_mesh, Domain, FeSpace, Field};

fn main() -> stokes_ext::Result<()> {
    let q = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    for n in [8, 16, 32] {
        let space = FeSpace::p1(Arc::new(build_structured_mesh(n, Domain::UnitSquare)?), 1)?;

        // −Δq = 2π² q with q = 0 on the boundary.
        let qh = solve_poisson_dirichlet(&RhsFunctional::scalar(move |x| 2.0 * PI * PI * q(x)), space.clone())?;
        let e = error_norms(&qh, &|x| vec![q(x)], None)?;

        // π_h and π_0h of a field that does not vanish on the boundary.
        let f = |x: [f64; 2]| x[0].exp() * (2.0 * x[1]).cos();
        let full = l2_project(&RhsFunctional::scalar(f), space.clone(), Restriction::Full)?;
        let interior = l2_project(&RhsFunctional::scalar(f), space.clone(), Restriction::Interior)?;

        // −Δʰ of the interpolant approximates 2π² q in the interior.
        let lap = discrete_laplacian(&Field::interpolate(space.clone(), q)?)?;
        let centre = (n / 2) * (n + 1) + n / 2;
        println!(
            "n={n:>2}: poisson L2 error {:.3e}, |pi_h f - pi_0h f|max {:.3e}, -lap_h q at centre {:.3} (exact {:.3})",
            e.l2,
            full.axpy(-1.0, &interior)?.max_abs(),
            lap.coeffs()[centre],
            2.0 * PI * PI
        );
    }
    Ok(())
}
