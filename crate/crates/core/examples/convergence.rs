//! Mesh-refinement study of the extended system on manufactured solutions.
//!
//! Run with `cargo run --release --example convergence`.

use stokes_ext::extended::ZMode;
use stokes_ext::verify::{convergence_study, manufactured_stokes, CASE_NAMES};

fn main() -> stokes_ext::Result<()> {
    for name in CASE_NAMES {
        let table = convergence_study(&manufactured_stokes(name)?, 0.0, &[8, 16, 32, 64], ZMode::Interior)?;
        println!("case {name}:");
        print!("{}", table.to_csv());
        let r = &table.rates;
        let o = |f: Option<f64>| f.map_or("non-monotone".to_string(), |v| format!("{v:.2}"));
        println!(
            "orders: u_H1 {}, u_L2 {}, p_L2 {}, div_u {}\n",
            o(r.err_u_h1.order()),
            o(r.err_u_l2.order()),
            o(r.err_p_l2.order()),
            o(r.div_u_l2.order())
        );
    }
    Ok(())
}
