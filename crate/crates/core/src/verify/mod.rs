//! Manufactured solutions, error norms, rate fitting, the stabilized
//! reference oracle and the diagnostic studies.

pub mod algebra;
pub mod cases;
pub mod norms;
pub mod oracle;
pub mod rates;
pub mod studies;
pub mod thresholds;

pub use cases::{manufactured_stokes, ManufacturedCase, CASE_NAMES};
pub use norms::{divergence_l2, error_norms, l2_norm, ErrorNorms};
pub use oracle::{reference_oracle_solve, OracleSolution};
pub use rates::{fit_rate, RateFit, RateRow, RateTable};
pub use studies::{alpha_sweep, convergence_study, dual_norm_study, operator_rate_study, oracle_comparison};
