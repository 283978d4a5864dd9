//! The parameterized extended system for stationary Stokes.
//!
//! Three equivalent-looking algebraic forms are provided:
//!
//! * [`assemble_monolithic`]: all ten discrete equations in one matrix, for
//!   either choice of the `z_h` space ([`ZMode`]).
//! * [`assemble_reduced_3block`]: the `(u, z, p)` system obtained under
//!   Stokes data with `z_h ∈ X_0h` and `r_h = 0`.
//! * [`condense_2block`]: the 3-block system with `z` eliminated through the
//!   mass matrix, solved iteratively.
//!
//! [`recover_auxiliary`] rebuilds the remaining fields from `(u, z, p)` and
//! [`equation_residuals`] measures how well a state satisfies each of the
//! ten equations.

mod data;
mod monolithic;
mod reduced;
mod system;

pub use data::{check_alpha, StokesData, ZMode};
pub use monolithic::{
    assemble_monolithic, equation_residuals, monolithic_layout, pack_state, solve_monolithic, unpack_state,
    EquationResidual, ExtendedState, EQUATION_NAMES, MONOLITHIC_BLOCKS,
};
pub use reduced::{
    assemble_reduced_3block, condense_2block, recover_auxiliary, reduced_layout, solve_reduced, CondensedSystem,
    ReducedSolution,
};
pub use system::{
    BlockLayout, BlockSystem, DataLoads, ExtendedSpaces, Operators, SolvedSystem, SystemKind, BLOCK_RESIDUAL,
};
