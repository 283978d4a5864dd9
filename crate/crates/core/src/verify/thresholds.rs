//! Every pass/fail threshold used by the acceptance suite and the CLI,
//! in one versioned table.

/// Bumped whenever a threshold value changes.
pub const THRESHOLDS_VERSION: u32 = 1;

/// Operator solves (Dirichlet Poisson, Helmholtz): H¹ order floor.
pub const OPERATOR_H1_ORDER_MIN: f64 = 0.9;
/// L² projection onto the full space: L² order floor.
pub const PROJECTION_L2_ORDER_MIN: f64 = 1.8;
/// Dual-norm estimate of `I − π_0h`: admissible order window.
pub const DUAL_NORM_ORDER_MIN: f64 = 0.9;
pub const DUAL_NORM_ORDER_MAX: f64 = 1.3;
/// Relative residual of every direct solve of the extended system.
pub const SOLVE_RESIDUAL_MAX: f64 = 1e-10;
/// The negative control counts as singular when `σ_min/σ_max` is at most
/// this.
pub const NEGATIVE_CONTROL_RATIO_MAX: f64 = 1e-8;
/// Stokes convergence: order floor for every norm.
pub const STOKES_ORDER_MIN: f64 = 0.9;
/// Coefficient-wise agreement of the algebraic forms.
pub const EQUIVALENCE_MAX: f64 = 1e-9;
/// Pressure difference between two members of the α family at the
/// coarsest mesh must exceed this.
pub const ALPHA_DIFFERENCE_MIN: f64 = 1e-8;
/// Reduction factor per mesh doubling of the α-family difference.
pub const ALPHA_REDUCTION_MAX: f64 = 0.75;
/// Residual of each discrete equation for a recovered state.
pub const RECOVERY_RESIDUAL_MAX: f64 = 1e-9;
/// `t_h` against an independent L² projection of the forcing.
pub const PROJECTION_DEFECT_MAX: f64 = 1e-10;
/// Extended-system H¹ velocity error within this factor of the oracle's.
pub const ORACLE_BAND: f64 = 5.0;

/// `(key, relation, value)` rows of the table.
pub fn threshold_rows() -> Vec<(&'static str, &'static str, f64)> {
    vec![
        ("operator_h1_order", ">=", OPERATOR_H1_ORDER_MIN),
        ("projection_l2_order", ">=", PROJECTION_L2_ORDER_MIN),
        ("dual_norm_order_min", ">=", DUAL_NORM_ORDER_MIN),
        ("dual_norm_order_max", "<=", DUAL_NORM_ORDER_MAX),
        ("solve_residual", "<=", SOLVE_RESIDUAL_MAX),
        ("negative_control_sigma_ratio", "<=", NEGATIVE_CONTROL_RATIO_MAX),
        ("stokes_order", ">=", STOKES_ORDER_MIN),
        ("equivalence_max_abs", "<=", EQUIVALENCE_MAX),
        ("alpha_difference_coarse", ">", ALPHA_DIFFERENCE_MIN),
        ("alpha_reduction_per_doubling", "<=", ALPHA_REDUCTION_MAX),
        ("recovery_residual", "<=", RECOVERY_RESIDUAL_MAX),
        ("projection_defect", "<=", PROJECTION_DEFECT_MAX),
        ("oracle_band_factor", "<=", ORACLE_BAND),
    ]
}

/// Human-readable table, printed into every report.
pub fn thresholds_table() -> String {
    let mut s = format!("thresholds v{THRESHOLDS_VERSION}\n");
    for (k, rel, v) in threshold_rows() {
        s += &format!("  {k:<30} {rel:>2} {v:e}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lists_every_threshold_once() {
        let rows = threshold_rows();
        let mut keys: Vec<_> = rows.iter().map(|r| r.0).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), rows.len());
        assert_eq!(thresholds_table().lines().count(), rows.len() + 1);
    }
}
