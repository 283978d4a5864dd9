//! Factorizes the extended system over a small (α, n, z-mode) grid and the
//! unstabilized equal-order saddle point for contrast.
//!
//! Run with `cargo run --release --example solvability`.

use stokes_ext::extended::ZMode;
use stokes_ext::verify::algebra::{negative_control, solvability_sweep};
use stokes_ext::verify::manufactured_stokes;

fn main() -> stokes_ext::Result<()> {
    let case = manufactured_stokes("stream4")?;
    let pts = solvability_sweep(&case, &[-1.0, 0.0, 0.5, 2.0], &[4, 8], &[ZMode::Interior, ZMode::Full])?;
    for p in &pts {
        println!(
            "{:<8} alpha={:>4} n={}: dim {:>4}, residual {:.1e}, sigma_min/sigma_max {:.1e}{}",
            p.mode.to_string(),
            p.alpha,
            p.n,
            p.dim,
            p.residual,
            p.sigma_ratio,
            if p.numerically_singular { " (singular)" } else { "" }
        );
    }
    let neg = negative_control(8, 1e-8)?;
    println!(
        "unstabilized P1/P1, n=8: sigma_min/sigma_max {:.1e}, {} null modes",
        neg.ratio, neg.null_dimension
    );
    Ok(())
}
