//! Algebraic diagnostics of the extended system: solvability across the α
//! family, the equal-order negative control, agreement of the three
//! algebraic forms and the identities satisfied by a recovered state.

use rayon::prelude::*;
use serde::Serialize;

use super::cases::ManufacturedCase;
use super::oracle::oracle_matrix;
use super::studies::unit_square;
use super::thresholds::SOLVE_RESIDUAL_MAX;
use crate::error::Result;
use crate::extended::{
    assemble_monolithic, assemble_reduced_3block, condense_2block, equation_residuals, recover_auxiliary,
    solve_reduced, unpack_state, EquationResidual, ExtendedSpaces, StokesData, ZMode,
};
use crate::linalg::{condition_estimate_with, singular_values, SparseLu};
use crate::operators::{discrete_laplacian, l2_project, RhsFunctional};
use crate::spaces::{FeSpace, Restriction};

/// Iterations of the power and inverse iterations behind the condition
/// estimate.
pub const CONDITION_ITERATIONS: usize = 20;

/// GMRES tolerance for the condensed 2-block solve.
pub const CONDENSED_TOLERANCE: f64 = 1e-13;

/// Outcome of factorizing and solving the monolithic system at one
/// `(α, n, mode)`.
#[derive(Debug, Clone, Serialize)]
pub struct SolvabilityPoint {
    pub alpha: f64,
    pub n: usize,
    pub mode: ZMode,
    pub dim: usize,
    pub factorized: bool,
    pub residual: f64,
    /// Estimated `σ_min / σ_max`.
    pub sigma_ratio: f64,
    /// `σ_min / σ_max ≤ dim · ε`: the matrix is singular to working
    /// precision and a computed factorization is an artifact of rounding.
    pub numerically_singular: bool,
    pub error: Option<String>,
}

impl SolvabilityPoint {
    pub fn passed(&self) -> bool {
        self.factorized && self.residual <= SOLVE_RESIDUAL_MAX && !self.numerically_singular
    }
}

/// Factorizes and solves the monolithic system under the Stokes data of
/// `case`, and estimates its conditioning.
pub fn solvability_point(case: &ManufacturedCase, alpha: f64, n: usize, mode: ZMode) -> Result<SolvabilityPoint> {
    let sp = ExtendedSpaces::new(unit_square(n)?)?;
    let data = StokesData::stokes(case.f.clone(), alpha)?;
    let sys = assemble_monolithic(&data, &sp, mode)?;
    let dim = sys.dim();
    let mut point = SolvabilityPoint {
        alpha,
        n,
        mode,
        dim,
        factorized: false,
        residual: f64::INFINITY,
        sigma_ratio: 0.0,
        numerically_singular: true,
        error: None,
    };
    let lu = match SparseLu::new(&sys.matrix, &sp.context(alpha)) {
        Ok(lu) => lu,
        Err(e) => {
            point.error = Some(e.to_string());
            return Ok(point);
        }
    };
    point.factorized = true;
    let x = lu.solve_unchecked(&sys.rhs);
    point.residual = lu.relative_residual(&x, &sys.rhs);
    let c = condition_estimate_with(&sys.matrix, &lu, CONDITION_ITERATIONS)?;
    point.sigma_ratio = c.ratio();
    point.numerically_singular = point.sigma_ratio <= dim as f64 * f64::EPSILON;
    Ok(point)
}

/// [`solvability_point`] over the full grid `alphas × n_list × modes`.
pub fn solvability_sweep(
    case: &ManufacturedCase,
    alphas: &[f64],
    n_list: &[usize],
    modes: &[ZMode],
) -> Result<Vec<SolvabilityPoint>> {
    let grid: Vec<(ZMode, f64, usize)> = modes
        .iter()
        .flat_map(|&m| alphas.iter().flat_map(move |&a| n_list.iter().map(move |&n| (m, a, n))))
        .collect();
    grid.par_iter().map(|&(m, a, n)| solvability_point(case, a, n, m)).collect()
}

/// Spectrum summary of the unstabilized equal-order P1/P1 Stokes matrix.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeControl {
    pub n: usize,
    pub dim: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub ratio: f64,
    /// Singular values at most `threshold · σ_max`.
    pub null_dimension: usize,
}

/// Dense SVD of `[[A, −B, 0], [−Bᵀ, 0, w], [0, wᵀ, 0]]` on the `n × n`
/// mesh. `threshold` decides which singular values count as zero.
pub fn negative_control(n: usize, threshold: f64) -> Result<NegativeControl> {
    let mesh = unit_square(n)?;
    let k = oracle_matrix(&*FeSpace::p1(mesh.clone(), 2)?, &*FeSpace::p1(mesh, 1)?, 0.0)?;
    let s = singular_values(&k.to_dense());
    let (smax, smin) = (s[0], *s.last().expect("nonempty matrix"));
    Ok(NegativeControl {
        n,
        dim: k.rows(),
        sigma_max: smax,
        sigma_min: smin,
        ratio: smin / smax,
        null_dimension: s.iter().filter(|&&v| v <= threshold * smax).count(),
    })
}

/// Coefficient-wise agreement of the monolithic, reduced and condensed
/// forms under Stokes data with `z_h ∈ X_0h`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub alpha: f64,
    pub monolithic_residual: f64,
    pub reduced_residual: f64,
    pub condensed_residual: f64,
    pub condensed_iterations: usize,
    pub monolithic_vs_reduced_u: f64,
    pub monolithic_vs_reduced_p: f64,
    pub condensed_vs_reduced_u: f64,
    pub condensed_vs_reduced_p: f64,
    /// Largest coefficient of `r_h` in the monolithic solution.
    pub monolithic_r_max: f64,
}

impl EquivalenceReport {
    /// Largest of the four coefficient-wise differences.
    pub fn max_difference(&self) -> f64 {
        [
            self.monolithic_vs_reduced_u,
            self.monolithic_vs_reduced_p,
            self.condensed_vs_reduced_u,
            self.condensed_vs_reduced_p,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn equivalence_check(case: &ManufacturedCase, alpha: f64, n: usize) -> Result<EquivalenceReport> {
    let sp = ExtendedSpaces::new(unit_square(n)?)?;
    let data = StokesData::stokes(case.f.clone(), alpha)?;
    let reduced_sys = assemble_reduced_3block(&data, &sp)?;
    let reduced = solve_reduced(&reduced_sys)?;
    let condensed = condense_2block(&reduced_sys)?.solve(CONDENSED_TOLERANCE)?;
    let mono_sys = assemble_monolithic(&data, &sp, ZMode::Interior)?;
    let mono_sol = mono_sys.solve()?;
    let mono = unpack_state(&mono_sys, &mono_sol.x)?;
    Ok(EquivalenceReport {
        n,
        alpha,
        monolithic_residual: mono_sol.residual,
        reduced_residual: reduced.residual,
        condensed_residual: condensed.residual,
        condensed_iterations: condensed.iterations,
        monolithic_vs_reduced_u: max_diff(mono.u.coeffs(), reduced.u.coeffs()),
        monolithic_vs_reduced_p: max_diff(mono.p.coeffs(), reduced.p.coeffs()),
        condensed_vs_reduced_u: max_diff(condensed.u.coeffs(), reduced.u.coeffs()),
        condensed_vs_reduced_p: max_diff(condensed.p.coeffs(), reduced.p.coeffs()),
        monolithic_r_max: mono.r.max_abs(),
    })
}

/// Identities of a state recovered from the reduced solution.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub n: usize,
    pub alpha: f64,
    pub equations: Vec<EquationResidual>,
    pub r_max: f64,
    /// `max |t_h − π_h f|` against an independent projection.
    pub t_defect: f64,
    /// Largest boundary coefficient of `z_h`.
    pub z_boundary_max: f64,
    /// `max |z_h − (−Δʰ u_h)|`.
    pub z_laplacian_defect: f64,
}

impl RecoveryReport {
    pub fn max_equation_residual(&self) -> f64 {
        self.equations.iter().map(|e| e.relative).fold(0.0, f64::max)
    }
}

pub fn recovery_check(case: &ManufacturedCase, alpha: f64, n: usize) -> Result<RecoveryReport> {
    let sp = ExtendedSpaces::new(unit_square(n)?)?;
    let data = StokesData::stokes(case.f.clone(), alpha)?;
    let sol = solve_reduced(&assemble_reduced_3block(&data, &sp)?)?;
    let state = recover_auxiliary(&sol, &data, &sp)?;
    let f = case.f.clone();
    let pi_f = l2_project(&RhsFunctional::vector(move |x| f(x)), sp.vector.clone(), Restriction::Full)?;
    let xi = discrete_laplacian(&state.u)?;
    let bdry = sp.vector.boundary_dofs();
    Ok(RecoveryReport {
        n,
        alpha,
        equations: equation_residuals(&state, &data, &sp)?,
        r_max: state.r.max_abs(),
        t_defect: max_diff(state.t.coeffs(), pi_f.coeffs()),
        z_boundary_max: bdry.iter().map(|&i| state.z.coeffs()[i].abs()).fold(0.0, f64::max),
        z_laplacian_defect: max_diff(state.z.coeffs(), xi.coeffs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::cases::manufactured_stokes;

    #[test]
    fn negative_control_is_singular() {
        let c = negative_control(4, 1e-8).unwrap();
        assert!(c.ratio <= 1e-8);
        assert!(c.null_dimension >= 1);
    }

    #[test]
    fn stabilized_oracle_is_not() {
        let mesh = unit_square(4).unwrap();
        let k = oracle_matrix(&FeSpace::p1(mesh.clone(), 2).unwrap(), &FeSpace::p1(mesh, 1).unwrap(), 0.05).unwrap();
        let s = singular_values(&k.to_dense());
        assert!(s.last().unwrap() / s[0] > 1e-6);
    }

    #[test]
    fn interior_mode_point_is_solvable() {
        let case = manufactured_stokes("stream4").unwrap();
        let p = solvability_point(&case, 0.0, 4, ZMode::Interior).unwrap();
        assert!(p.passed(), "{p:?}");
    }

    #[test]
    fn reduced_and_condensed_forms_agree() {
        let case = manufactured_stokes("stream4").unwrap();
        let r = equivalence_check(&case, 0.5, 4).unwrap();
        assert!(r.condensed_vs_reduced_u <= 1e-9 && r.condensed_vs_reduced_p <= 1e-9, "{r:?}");
    }

    #[test]
    fn recovered_state_basic_identities() {
        let case = manufactured_stokes("stream4").unwrap();
        let r = recovery_check(&case, 0.0, 4).unwrap();
        assert_eq!(r.z_boundary_max, 0.0);
        assert!(r.z_laplacian_defect <= 1e-9);
        assert!(r.t_defect <= 1e-10);
        assert_eq!(r.r_max, 0.0);
    }
}
