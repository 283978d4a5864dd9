//! Mesh-refinement studies: Stokes convergence, the α family, the oracle
//! comparison and the rates of the underlying discrete operators.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::cases::ManufacturedCase;
use super::norms::{divergence_l2, error_norms};
use super::oracle::reference_oracle_solve;
use super::rates::{fit_rate, RateFit, RateRow, RateTable};
use crate::error::{Error, Result};
use crate::extended::{
    assemble_monolithic, assemble_reduced_3block, check_alpha, solve_monolithic, solve_reduced, ExtendedSpaces,
    StokesData, ZMode,
};
use crate::mesh::{build_structured_mesh, Domain, Mesh, Point};
use crate::operators::{
    dual_norm_surrogate, dual_norm_surrogate_refined, l2_project, solve_helmholtz, solve_poisson_dirichlet,
    HelmholtzVariant, RhsFunctional,
};
use crate::spaces::{FeSpace, Field, Restriction};

pub(crate) fn unit_square(n: usize) -> Result<Arc<Mesh>> {
    Ok(Arc::new(build_structured_mesh(n, Domain::UnitSquare)?))
}

/// `‖f‖₀` of a field.
fn l2(f: &Field) -> Result<f64> {
    let c = f.space().components();
    Ok(error_norms(f, &|_| vec![0.0; c], None)?.l2)
}

/// `‖f‖₁` of a field.
fn h1(f: &Field) -> Result<f64> {
    let c = f.space().components();
    Ok(error_norms(f, &|_| vec![0.0; c], Some(&|_| vec![[0.0; 2]; c]))?.h1())
}

/// Velocity and pressure of one extended-system solve.
#[derive(Debug, Clone)]
pub struct StokesSolution {
    pub u: Field,
    pub p: Field,
}

/// Solves the extended system under Stokes data: the reduced 3-block form
/// for [`ZMode::Interior`], the monolithic ten-field form for
/// [`ZMode::Full`].
pub fn solve_stokes(case: &ManufacturedCase, alpha: f64, n: usize, mode: ZMode) -> Result<StokesSolution> {
    let sp = ExtendedSpaces::new(unit_square(n)?)?;
    let data = StokesData::stokes(case.f.clone(), alpha)?;
    match mode {
        ZMode::Interior => {
            let s = solve_reduced(&assemble_reduced_3block(&data, &sp)?)?;
            Ok(StokesSolution { u: s.u, p: s.p })
        }
        ZMode::Full => {
            let (s, _) = solve_monolithic(&assemble_monolithic(&data, &sp, mode)?)?;
            Ok(StokesSolution { u: s.u, p: s.p })
        }
    }
}

/// Errors of a discrete solution against the exact pair of `case`.
pub fn stokes_errors(case: &ManufacturedCase, n: usize, u: &Field, p: &Field) -> Result<RateRow> {
    let g = case.grad_u.clone();
    let eu = error_norms(u, &|x| (case.u)(x).to_vec(), Some(&move |x| g(x).to_vec()))?;
    let ep = error_norms(p, &|x| vec![(case.p)(x)], None)?;
    Ok(RateRow {
        n,
        h: u.space().mesh().h(),
        err_u_h1: eu.h1(),
        err_u_l2: eu.l2,
        err_p_l2: ep.l2,
        div_u_l2: divergence_l2(u)?,
    })
}

/// Solves the extended system on every mesh of `n_list` and fits orders.
pub fn convergence_study(case: &ManufacturedCase, alpha: f64, n_list: &[usize], mode: ZMode) -> Result<RateTable> {
    check_alpha(alpha)?;
    if n_list.len() < 3 {
        return Err(Error::InvalidArgument("a convergence study needs at least three meshes".into()));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let s = solve_stokes(case, alpha, n, mode)?;
            stokes_errors(case, n, &s.u, &s.p)
        })
        .collect::<Result<Vec<_>>>()?;
    RateTable::new(rows)
}

/// Pairwise differences between members of the α family.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaSweep {
    pub n_list: Vec<usize>,
    pub alphas: Vec<f64>,
    /// `p_diff[k][i][j] = ‖p_h(αᵢ) − p_h(αⱼ)‖₀` on mesh `n_list[k]`.
    pub p_diff: Vec<Vec<Vec<f64>>>,
    /// `u_diff[k][i][j] = ‖u_h(αᵢ) − u_h(αⱼ)‖₁` on mesh `n_list[k]`.
    pub u_diff: Vec<Vec<Vec<f64>>>,
}

impl AlphaSweep {
    /// Pressure differences of the pair `(i, j)` over the meshes.
    pub fn p_pair(&self, i: usize, j: usize) -> Vec<f64> {
        self.p_diff.iter().map(|m| m[i][j]).collect()
    }

    pub fn u_pair(&self, i: usize, j: usize) -> Vec<f64> {
        self.u_diff.iter().map(|m| m[i][j]).collect()
    }

    /// Ratio of consecutive entries of a difference sequence.
    pub fn reductions(diffs: &[f64]) -> Vec<f64> {
        diffs.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Solves the reduced system for every `(n, α)` and tabulates pairwise
/// differences.
pub fn alpha_sweep(case: &ManufacturedCase, n_list: &[usize], alphas: &[f64]) -> Result<AlphaSweep> {
    for &a in alphas {
        check_alpha(a)?;
    }
    let grid: Vec<(usize, f64)> = n_list.iter().flat_map(|&n| alphas.iter().map(move |&a| (n, a))).collect();
    let sols = grid
        .par_iter()
        .map(|&(n, a)| solve_stokes(case, a, n, ZMode::Interior))
        .collect::<Result<Vec<_>>>()?;
    let m = alphas.len();
    let mut p_diff = Vec::with_capacity(n_list.len());
    let mut u_diff = Vec::with_capacity(n_list.len());
    for (k, _) in n_list.iter().enumerate() {
        let s = &sols[k * m..(k + 1) * m];
        let mut pd = vec![vec![0.0; m]; m];
        let mut ud = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..i {
                pd[i][j] = l2(&s[i].p.axpy(-1.0, &s[j].p)?)?;
                ud[i][j] = h1(&s[i].u.axpy(-1.0, &s[j].u)?)?;
                pd[j][i] = pd[i][j];
                ud[j][i] = ud[i][j];
            }
        }
        p_diff.push(pd);
        u_diff.push(ud);
    }
    Ok(AlphaSweep {
        n_list: n_list.to_vec(),
        alphas: alphas.to_vec(),
        p_diff,
        u_diff,
    })
}

/// H¹ velocity errors of the extended system and the stabilized oracle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleComparison {
    pub n: usize,
    pub extended_h1: f64,
    pub oracle_h1: f64,
    /// `extended_h1 / oracle_h1`.
    pub ratio: f64,
}

pub fn oracle_comparison(case: &ManufacturedCase, alpha: f64, n: usize) -> Result<OracleComparison> {
    let ext = solve_stokes(case, alpha, n, ZMode::Interior)?;
    let orc = reference_oracle_solve(&*case.f, unit_square(n)?)?;
    let e = stokes_errors(case, n, &ext.u, &ext.p)?.err_u_h1;
    let o = stokes_errors(case, n, &orc.u, &orc.p)?.err_u_h1;
    Ok(OracleComparison {
        n,
        extended_h1: e,
        oracle_h1: o,
        ratio: e / o,
    })
}

/// Errors of one discrete operator over a mesh sequence.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorRate {
    pub operator: &'static str,
    pub norm: &'static str,
    pub n_list: Vec<usize>,
    pub errors: Vec<f64>,
    pub fit: RateFit,
}

type ExactScalar = fn(Point) -> f64;

fn scalar_error(exact: ExactScalar, grad: fn(Point) -> [f64; 2], fh: &Field, h1_norm: bool) -> Result<f64> {
    let e = error_norms(fh, &|x| vec![exact(x)], Some(&|x| vec![grad(x)]))?;
    Ok(if h1_norm { e.h1_semi } else { e.l2 })
}

/// Rates of the Dirichlet Poisson solvers (scalar and vector, H¹
/// seminorm), the Helmholtz solver (H¹ norm) and the L² projection onto
/// the full space (L² norm), each against a smooth exact solution.
pub fn operator_rate_study(n_list: &[usize]) -> Result<Vec<OperatorRate>> {
    let per_mesh = n_list
        .par_iter()
        .map(|&n| -> Result<[f64; 4]> {
            let mesh = unit_square(n)?;
            let s1 = FeSpace::p1(mesh.clone(), 1)?;
            let s2 = FeSpace::p1(mesh, 2)?;
            // q = sin πx sin πy, −Δq = 2π² q.
            let q: ExactScalar = |x| (PI * x[0]).sin() * (PI * x[1]).sin();
            let gq = |x: Point| {
                [
                    PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                    PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                ]
            };
            let qh = solve_poisson_dirichlet(&RhsFunctional::scalar(move |x| 2.0 * PI * PI * q(x)), s1.clone())?;
            let e_pd = scalar_error(q, gq, &qh, true)?;
            // u = (sin πx sin πy, sin 2πx sin πy), −Δu = (2π² u₁, 5π² u₂).
            let u2 = |x: Point| (2.0 * PI * x[0]).sin() * (PI * x[1]).sin();
            let uh = solve_poisson_dirichlet(
                &RhsFunctional::vector(move |x| [2.0 * PI * PI * q(x), 5.0 * PI * PI * u2(x)]),
                s2.clone(),
            )?;
            let e_vpd = error_norms(
                &uh,
                &|x| vec![q(x), u2(x)],
                Some(&|x| {
                    vec![
                        gq(x),
                        [
                            2.0 * PI * (2.0 * PI * x[0]).cos() * (PI * x[1]).sin(),
                            PI * (2.0 * PI * x[0]).sin() * (PI * x[1]).cos(),
                        ],
                    ]
                }),
            )?
            .h1_semi;
            // φ = cos πx cos πy has zero normal derivative; −Δφ + φ = (2π² + 1) φ.
            let phi: ExactScalar = |x| (PI * x[0]).cos() * (PI * x[1]).cos();
            let gphi = |x: Point| {
                [
                    -PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                    -PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                ]
            };
            let ph = solve_helmholtz(
                &RhsFunctional::scalar(move |x| (2.0 * PI * PI + 1.0) * phi(x)),
                s1.clone(),
                HelmholtzVariant::Full,
            )?;
            let e_h = error_norms(&ph, &|x| vec![phi(x)], Some(&|x| vec![gphi(x)]))?.h1();
            // π_h of a smooth field that does not vanish on the boundary.
            let f: ExactScalar = |x| x[0].exp() * (2.0 * x[1]).cos();
            let fh = l2_project(&RhsFunctional::scalar(f), s1, Restriction::Full)?;
            let e_pi = error_norms(&fh, &|x| vec![f(x)], None)?.l2;
            Ok([e_pd, e_vpd, e_h, e_pi])
        })
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = n_list.iter().map(|&n| 2f64.sqrt() / n as f64).collect();
    let names = [
        ("dirichlet_poisson_scalar", "H1_semi"),
        ("dirichlet_poisson_vector", "H1_semi"),
        ("helmholtz", "H1"),
        ("l2_projection", "L2"),
    ];
    names
        .iter()
        .enumerate()
        .map(|(k, &(operator, norm))| {
            let errors: Vec<f64> = per_mesh.iter().map(|e| e[k]).collect();
            Ok(OperatorRate {
                operator,
                norm,
                n_list: n_list.to_vec(),
                fit: fit_rate(&h, &errors)?,
                errors,
            })
        })
        .collect()
}

/// Fine-mesh subdivisions per coarse cell for the dual-norm surrogate.
pub const DUAL_NORM_REFINEMENT: usize = 4;

/// `‖(I − π_0h) f‖₋₁ / ‖f‖₀` over a mesh sequence for one test field.
#[derive(Debug, Clone, Serialize)]
pub struct DualNormRate {
    pub field: &'static str,
    pub n_list: Vec<usize>,
    /// Measured on a nested refinement of each mesh.
    pub refined: Vec<f64>,
    /// Measured on the mesh itself; vanishes identically because `π_0h`
    /// is orthogonal to the test space of the surrogate.
    pub same_mesh: Vec<f64>,
    pub fit: RateFit,
}

/// The two smooth test fields of the dual-norm study.
pub fn dual_norm_fields() -> Vec<(&'static str, fn(Point) -> [f64; 2])> {
    vec![
        ("exp_trig", |x| [x[0].exp() * x[1].cos(), (x[0] + 2.0 * x[1]).sin()]),
        ("polynomial", |x| [1.0 + x[0] * x[1], x[0] * x[0] - x[1]]),
    ]
}

pub fn dual_norm_study(n_list: &[usize]) -> Result<Vec<DualNormRate>> {
    let h: Vec<f64> = n_list.iter().map(|&n| 2f64.sqrt() / n as f64).collect();
    dual_norm_fields()
        .into_iter()
        .map(|(name, f)| {
            let vals = n_list
                .par_iter()
                .map(|&n| -> Result<(f64, f64)> {
                    let space = FeSpace::p1(unit_square(n)?, 2)?;
                    let fv = |x: Point| f(x).to_vec();
                    let norm = error_norms(&Field::zeros(space.clone()), &fv, None)?.l2;
                    let p0 = l2_project(&RhsFunctional::vector(f), space.clone(), Restriction::Interior)?;
                    let pf = l2_project(&RhsFunctional::vector(f), space, Restriction::Full)?;
                    let refined = dual_norm_surrogate_refined(&fv, &p0, n, DUAL_NORM_REFINEMENT)? / norm;
                    let same = dual_norm_surrogate(&pf.axpy(-1.0, &p0)?)? / norm;
                    Ok((refined, same))
                })
                .collect::<Result<Vec<_>>>()?;
            let refined: Vec<f64> = vals.iter().map(|v| v.0).collect();
            Ok(DualNormRate {
                field: name,
                n_list: n_list.to_vec(),
                fit: fit_rate(&h, &refined)?,
                same_mesh: vals.iter().map(|v| v.1).collect(),
                refined,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::cases::manufactured_stokes;

    #[test]
    fn convergence_study_needs_three_meshes() {
        let case = manufactured_stokes("stream4").unwrap();
        assert!(convergence_study(&case, 0.0, &[4, 8], ZMode::Interior).is_err());
        assert!(matches!(
            convergence_study(&case, 1.0, &[4, 8, 16], ZMode::Interior),
            Err(Error::ParameterSingularity(_))
        ));
    }

    #[test]
    fn boundary_compatible_case_converges() {
        // Δu vanishes on the boundary, so z_h ∈ X_0h is consistent.
        let case = manufactured_stokes("bubble8").unwrap();
        let t = convergence_study(&case, 0.0, &[8, 16, 32], ZMode::Interior).unwrap();
        assert!(t.monotone());
        assert!(t.rates.err_u_h1.order().unwrap() > 0.9);
        assert!(t.rates.err_p_l2.order().unwrap() > 0.9);
    }

    #[test]
    fn identical_alphas_give_identical_solutions() {
        let case = manufactured_stokes("stream4").unwrap();
        let s = alpha_sweep(&case, &[4], &[0.5, 0.5]).unwrap();
        assert!(s.p_diff[0][0][1] <= 1e-12);
        assert!(s.u_diff[0][0][1] <= 1e-12);
    }

    #[test]
    fn alpha_one_rejected_by_sweep() {
        let case = manufactured_stokes("stream4").unwrap();
        assert!(alpha_sweep(&case, &[4], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn projection_study_rates() {
        let r = operator_rate_study(&[8, 16]).unwrap();
        let pi = r.iter().find(|r| r.operator == "l2_projection").unwrap();
        assert!(pi.fit.order().unwrap() > 1.8);
        for op in &r[..3] {
            assert!(op.fit.order().unwrap() > 0.9, "{} order {:?}", op.operator, op.fit);
        }
    }
}
