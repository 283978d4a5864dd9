//! Compares the extended system with a pressure-stabilized P1/P1 reference.
//!
//! Run with `cargo run --release --example oracle`.

use stokes_ext::verify::{manufactured_stokes, oracle_comparison};

fn main() -> stokes_ext::Result<()> {
    for name in ["stream4", "bubble8"] {
        for n in [8, 16, 32] {
            let c = oracle_comparison(&manufactured_stokes(name)?, 0.0, n)?;
            println!(
                "{name} n={n:>2}: extended u_H1 error {:.3e}, oracle {:.3e}, ratio {:.2}",
                c.extended_h1, c.oracle_h1, c.ratio
            );
        }
    }
    Ok(())
}
