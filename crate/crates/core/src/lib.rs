//! Equal-order P1 finite elements for the stationary Stokes problem,
//! solved through a parameterized extended system instead of the classical
//! velocity/pressure saddle point.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`] – structured triangulations of the unit square and a plain-text
//!   mesh format for arbitrary polygons.
//! * [`spaces`] – P1 nodal spaces with interior/boundary DOF splits, the
//!   zero-mean constraint and nodal interpolation.
//! * [`forms`] – sparse assembly of stiffness, mass, Helmholtz and
//!   divergence/gradient coupling operators.
//! * [`operators`] – the discrete solution operators (Dirichlet Poisson,
//!   Helmholtz, L² projections, discrete Laplacian, discrete H⁻¹ norm).
//! * [`extended`] – the ten-field extended system, its reduced 3-block form,
//!   the condensed 2-block form and recovery of auxiliary fields.
//! * [`verify`] – manufactured solutions, error norms, rate fitting, the
//!   stabilized reference oracle and the diagnostic studies.
//! * [`cli`] – configuration and batch driver behind the `stokes-ext` binary.

pub mod cli;
pub mod error;
pub mod extended;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod sparse;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use mesh::{build_structured_mesh, Domain, ElementGeometry, Mesh, Point};
pub use spaces::{FeSpace, Field, ZeroMeanConstraint};
pub use sparse::SparseOperator;
