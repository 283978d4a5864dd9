//! Compares members of the α family on a sequence of meshes.
//!
//! Run with `cargo run --release --example alpha_family`.

use stokes_ext::verify::studies::AlphaSweep;
use stokes_ext::verify::{alpha_sweep, manufactured_stokes};

fn main() -> stokes_ext::Result<()> {
    let alphas = [-1.0, 0.0, 0.5, 2.0];
    let sweep = alpha_sweep(&manufactured_stokes("stream4")?, &[8, 16, 32], &alphas)?;
    for j in 1..alphas.len() {
        let d = sweep.p_pair(0, j);
        println!(
            "alpha {} vs {}: |p diff|_L2 = {:?}, reductions {:?}",
            alphas[0],
            alphas[j],
            d.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>(),
            AlphaSweep::reductions(&d).iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
