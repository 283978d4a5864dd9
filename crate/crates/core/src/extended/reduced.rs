//! The reduced `(u, z, p)` forms of the extended system under Stokes data
//! with `z_h ∈ X_0h`, and recovery of the remaining fields.
//!
//! Rows of the 3-block system (paper signs in brackets):
//!
//! ```text
//! A u − B p                        = F      [A u + B_hᵀ p = f̄]
//! A u − M z                        = 0      [A u + K_h z = 0]
//! [α C_int; C_bdry] z + D p + w μ  = ψ̄,  wᵀp = 0
//! ```
//!
//! where `ψ̄_i = (t_h, grad φ_i)` with `t_h = π_h f`, and `μ` is the
//! multiplier of the zero-mean constraint. The 2-block form eliminates
//! `z = M⁻¹ A u`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::data::{StokesData, ZMode};
use super::monolithic::ExtendedState;
use super::system::{gather, scatter_field, BlockLayout, BlockSystem, DataLoads, ExtendedSpaces, Operators, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{gmres, SparseLu};
use crate::operators::{EllipticSolver, SolverKind};
use crate::spaces::Field;
use crate::sparse::{BlockBuilder, SparseOperator};

/// `(u_h, z_h, p_h)` from a reduced solve.
#[derive(Debug, Clone)]
pub struct ReducedSolution {
    pub u: Field,
    pub z: Field,
    pub p: Field,
    /// Multiplier of the zero-mean constraint on `p`.
    pub multiplier: f64,
    /// Relative residual of the solve.
    pub residual: f64,
    /// GMRES iterations (zero for direct solves).
    pub iterations: usize,
}

/// `[α C_int; C_bdry]` restricted to interior `z` columns, rows in node
/// order.
fn stacked_coupling(ops: &Operators, sp: &ExtendedSpaces, alpha: f64) -> Result<SparseOperator> {
    let c = ops.c.submatrix(&sp.s_all, &sp.v_int)?;
    let mut interior = vec![false; sp.n_p()];
    for &i in &sp.s_int {
        interior[i] = true;
    }
    let t: Vec<_> = c
        .triplets()
        .map(|(i, j, v)| (i, j, if interior[i] { alpha * v } else { v }))
        .collect();
    SparseOperator::from_triplets(c.rows(), c.cols(), &t)
}

fn require_stokes(data: &StokesData) -> Result<()> {
    data.check()?;
    if !data.is_stokes_mode() {
        return Err(Error::UnsupportedMode(
            "the reduced forms need Stokes data (f_tri = f_hat = f, all other data zero)".into(),
        ));
    }
    Ok(())
}

/// `t_h = π_h f̂` over all vector DOFs.
pub(crate) fn project_t(ops: &Operators, loads: &DataLoads, sp: &ExtendedSpaces, alpha: f64) -> Result<Vec<f64>> {
    let lu = SparseLu::new(&ops.mass_v, &format!("vector mass ({})", sp.context(alpha)))?.with_tolerance(1e-10);
    lu.solve(&loads.f_hat)
}

pub fn reduced_layout(sp: &ExtendedSpaces) -> BlockLayout {
    BlockLayout::new(&[("u", 2 * sp.n_i()), ("z", 2 * sp.n_i()), ("p", sp.n_p() + 1)])
}

/// Assembles the 3-block `(u, z, p)` system. Requires Stokes data.
pub fn assemble_reduced_3block(data: &StokesData, spaces: &Arc<ExtendedSpaces>) -> Result<BlockSystem> {
    require_stokes(data)?;
    let sp = spaces.as_ref();
    let ops = Operators::assemble(sp)?;
    let loads = DataLoads::new(data, sp)?;
    let layout = reduced_layout(sp);
    let np = sp.n_p();
    let w = &sp.constraint.weights;
    let cz = stacked_coupling(&ops, sp, data.alpha)?;
    let t = project_t(&ops, &loads, sp, data.alpha)?;
    let psi_bar = ops.c.mul_vec(&t)?;

    let mut bb = BlockBuilder::new(&layout.sizes, &layout.sizes);
    bb.add(0, 0, &ops.a, 1.0)?;
    bb.add_at(0, 2, 0, 0, &ops.b, -1.0)?;
    bb.add(1, 0, &ops.a, 1.0)?;
    bb.add(1, 1, &ops.mass_vi, -1.0)?;
    bb.add_at(2, 1, 0, 0, &cz, 1.0)?;
    bb.add_at(2, 2, 0, 0, &ops.d, 1.0)?;
    bb.add_column(2, 2, np, w, 1.0);
    bb.add_row(2, 2, np, w, 1.0);
    let matrix = bb.build()?;

    let mut rhs = vec![0.0; layout.total()];
    let f_int = gather(&loads.f, &sp.v_int);
    rhs[..f_int.len()].copy_from_slice(&f_int);
    let o = layout.offset(2);
    rhs[o..o + np].copy_from_slice(&psi_bar);

    let mut blocks = BTreeMap::new();
    blocks.insert("A".into(), ops.a);
    blocks.insert("B".into(), ops.b);
    blocks.insert("K".into(), ops.mass_vi);
    blocks.insert("C_stack".into(), cz);
    blocks.insert("D".into(), ops.d);
    let mut named = BTreeMap::new();
    named.insert("f".into(), f_int);
    named.insert("psi_bar".into(), psi_bar);
    named.insert("t".into(), t);
    Ok(BlockSystem {
        kind: SystemKind::Reduced3Block,
        alpha: data.alpha,
        layout,
        matrix,
        rhs,
        blocks,
        loads: named,
        spaces: spaces.clone(),
        data: data.clone(),
    })
}

/// Direct solve of an assembled 3-block system.
pub fn solve_reduced(sys: &BlockSystem) -> Result<ReducedSolution> {
    if sys.kind != SystemKind::Reduced3Block {
        return Err(Error::UnsupportedMode("solve_reduced expects a 3-block system".into()));
    }
    let sol = sys.solve()?;
    let sp = &sys.spaces;
    let pb = sys.block(&sol.x, "p");
    Ok(ReducedSolution {
        u: scatter_field(&sp.vector, &sp.v_int, sys.block(&sol.x, "u")),
        z: scatter_field(&sp.vector, &sp.v_int, sys.block(&sol.x, "z")),
        p: scatter_field(&sp.scalar, &sp.s_all, &pb[..sp.n_p()]),
        multiplier: pb[sp.n_p()],
        residual: sol.residual,
        iterations: 0,
    })
}

/// The 2-block system `[[A, −B], [G(α), D̃]]` with
/// `G(α) u = [α C_int; C_bdry] M⁻¹ A u` applied without forming `G`.
/// `D̃` is `D` bordered by the zero-mean multiplier.
pub struct CondensedSystem {
    pub alpha: f64,
    spaces: Arc<ExtendedSpaces>,
    a: SparseOperator,
    b: SparseOperator,
    c_int: SparseOperator,
    c_bdry: SparseOperator,
    d_tilde: SparseOperator,
    a_lu: SparseLu,
    m_lu: SparseLu,
    d_lu: SparseLu,
    rhs_u: Vec<f64>,
    rhs_p: Vec<f64>,
}

impl std::fmt::Debug for CondensedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CondensedSystem")
            .field("alpha", &self.alpha)
            .field("n_u", &self.a.rows())
            .field("n_p", &self.d_tilde.rows())
            .finish_non_exhaustive()
    }
}

/// Eliminates `z` from a 3-block system.
pub fn condense_2block(sys: &BlockSystem) -> Result<CondensedSystem> {
    if sys.kind != SystemKind::Reduced3Block {
        return Err(Error::UnsupportedMode("condense_2block expects a 3-block system".into()));
    }
    let sp = sys.spaces.clone();
    let get = |k: &str| sys.blocks.get(k).cloned().expect("block assembled with the 3-block system");
    let (a, b, k, d) = (get("A"), get("B"), get("K"), get("D"));
    let c = get("C_stack");
    // Undo the α scaling on interior rows so that G can be evaluated for
    // any α from the same blocks.
    let c_full = Operators::assemble(&sp)?.c.submatrix(&sp.s_all, &sp.v_int)?;
    let c_int = c_full.submatrix(&sp.s_int, &(0..c_full.cols()).collect::<Vec<_>>())?;
    let c_bdry = c_full.submatrix(&sp.s_bdry, &(0..c_full.cols()).collect::<Vec<_>>())?;
    debug_assert_eq!(c.rows(), sp.n_p());
    let np = sp.n_p();
    let mut bb = BlockBuilder::new(&[np, 1], &[np, 1]);
    bb.add(0, 0, &d, 1.0)?;
    bb.add_column(0, 1, 0, &sp.constraint.weights, 1.0);
    bb.add_row(1, 0, 0, &sp.constraint.weights, 1.0);
    let d_tilde = bb.build()?;
    let ctx = sp.context(sys.alpha);
    let a_lu = SparseLu::new(&a, &format!("A ({ctx})"))?.with_tolerance(1e-10);
    let m_lu = SparseLu::new(&k, &format!("K ({ctx})"))?.with_tolerance(1e-10);
    let d_lu = SparseLu::new(&d_tilde, &format!("D with multiplier ({ctx})"))?.with_tolerance(1e-10);
    let nu = a.rows();
    Ok(CondensedSystem {
        alpha: sys.alpha,
        rhs_u: sys.rhs[..nu].to_vec(),
        rhs_p: sys.rhs[2 * nu..].to_vec(),
        spaces: sp,
        a,
        b,
        c_int,
        c_bdry,
        d_tilde,
        a_lu,
        m_lu,
        d_lu,
    })
}

impl CondensedSystem {
    /// `M⁻¹ A u` over interior vector DOFs.
    pub fn z_of(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.m_lu.solve(&self.a.mul_vec(u)?)
    }

    /// `G(α) u` in node order (length `n_p`).
    pub fn g_action(&self, alpha: f64, u: &[f64]) -> Result<Vec<f64>> {
        let z = self.z_of(u)?;
        let gi = self.c_int.mul_vec(&z)?;
        let gb = self.c_bdry.mul_vec(&z)?;
        let mut out = vec![0.0; self.spaces.n_p()];
        for (k, &i) in self.spaces.s_int.iter().enumerate() {
            out[i] = alpha * gi[k];
        }
        for (k, &i) in self.spaces.s_bdry.iter().enumerate() {
            out[i] = gb[k];
        }
        Ok(out)
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let nu = self.a.rows();
        let (u, p) = x.split_at(nu);
        let mut top = self.a.mul_vec(u)?;
        let bp = self.b.mul_vec(&p[..self.spaces.n_p()])?;
        top.iter_mut().zip(&bp).for_each(|(t, b)| *t -= b);
        let mut bottom = self.d_tilde.mul_vec(p)?;
        let g = self.g_action(self.alpha, u)?;
        bottom.iter_mut().zip(&g).for_each(|(t, g)| *t += g);
        top.extend(bottom);
        Ok(top)
    }

    /// Block lower-triangular preconditioner `[[A, 0], [G, D̃]]⁻¹`.
    fn precondition(&self, v: &[f64]) -> Result<Vec<f64>> {
        let nu = self.a.rows();
        let u = self.a_lu.solve_unchecked(&v[..nu]);
        let g = self.g_action(self.alpha, &u)?;
        let rhs: Vec<f64> = v[nu..]
            .iter()
            .zip(g.iter().chain(std::iter::once(&0.0)))
            .map(|(a, b)| a - b)
            .collect();
        let p = self.d_lu.solve_unchecked(&rhs);
        let mut out = u;
        out.extend(p);
        Ok(out)
    }

    /// Right-preconditioned GMRES to relative residual `tol`.
    pub fn solve(&self, tol: f64) -> Result<ReducedSolution> {
        let mut b = self.rhs_u.clone();
        b.extend_from_slice(&self.rhs_p);
        let out = gmres(|x| self.apply(x), |v| self.precondition(v), &b, tol, 60, 600)?;
        let nu = self.a.rows();
        let np = self.spaces.n_p();
        let (u, p) = out.solution.split_at(nu);
        let z = self.z_of(u)?;
        let sp = &self.spaces;
        Ok(ReducedSolution {
            u: scatter_field(&sp.vector, &sp.v_int, u),
            z: scatter_field(&sp.vector, &sp.v_int, &z),
            p: scatter_field(&sp.scalar, &sp.s_all, &p[..np]),
            multiplier: p[np],
            residual: out.relative_residual,
            iterations: out.iterations,
        })
    }
}

/// Completes a reduced solution to the full ten-field state using the
/// remaining equations: `t = π_h f̂`, `r` from the summed gradient and
/// `r` equations (zero under Stokes data), `q` from the `α` equation,
/// `q̂` from its Poisson equation, `p̂ = p − q − ĝ`, `p_S = p + ℓ_S` and
/// `y` from the divergence equation.
pub fn recover_auxiliary(sol: &ReducedSolution, data: &StokesData, spaces: &Arc<ExtendedSpaces>) -> Result<ExtendedState> {
    data.check()?;
    let sp = spaces.as_ref();
    let ops = Operators::assemble(sp)?;
    let loads = DataLoads::new(data, sp)?;
    let np = sp.n_p();
    let ctx = sp.context(data.alpha);

    let mass_v = SparseLu::new(&ops.mass_v, &format!("vector mass ({ctx})"))?.with_tolerance(1e-10);
    let t = mass_v.solve(&loads.f_hat)?;
    let f_tri_h = mass_v.solve(&loads.f_tri)?;

    // ⟨ψ̃_r, φ⟩ = (−f_Δ,h + f̂_h + grad ĝ, grad φ) + ⟨ϱ, φ⟩ + ⟨ϱ̂, φ⟩
    let diff: Vec<f64> = t.iter().zip(&f_tri_h).map(|(a, b)| a - b).collect();
    let mut psi_r = ops.c.mul_vec(&diff)?;
    let dg = ops.d.mul_vec(&loads.g_hat)?;
    for i in 0..np {
        psi_r[i] += dg[i] + loads.rho[i] + loads.rho_hat[i];
    }
    let r = if psi_r.iter().all(|&v| v == 0.0) {
        Field::zeros(sp.scalar.clone())
    } else {
        EllipticSolver::new(SolverKind::Helmholtz, sp.scalar.clone())?.solve_load(&psi_r)?
    };

    let d_ii = ops.d.submatrix(&sp.s_int, &sp.s_int)?;
    let d_lu = SparseLu::new(&d_ii, &format!("D interior ({ctx})"))?.with_tolerance(1e-10);
    let z_act = gather(sol.z.coeffs(), &sp.v_int);
    let cz = ops.c.submatrix(&sp.s_int, &sp.v_int)?.mul_vec(&z_act)?;
    let ct = ops.c.submatrix(&sp.s_int, &sp.v_all)?.mul_vec(&t)?;
    let psi_i = gather(&loads.psi, &sp.s_int);
    let rhs_q: Vec<f64> = (0..sp.n_i()).map(|k| psi_i[k] - data.alpha * cz[k] + ct[k]).collect();
    let q = scatter_field(&sp.scalar, &sp.s_int, &d_lu.solve(&rhs_q)?);

    let dp = ops.d.submatrix(&sp.s_int, &sp.s_all)?.mul_vec(sol.p.coeffs())?;
    let psi_hat_i = gather(&loads.psi_hat, &sp.s_int);
    let rhs_qh: Vec<f64> = (0..sp.n_i()).map(|k| psi_hat_i[k] - dp[k]).collect();
    let q_hat = scatter_field(&sp.scalar, &sp.s_int, &d_lu.solve(&rhs_qh)?);

    let p = sol.p.clone();
    let p_hat_c: Vec<f64> = (0..np).map(|i| p.coeffs()[i] - q.coeffs()[i] - loads.g_hat[i]).collect();
    let p_s_c: Vec<f64> = (0..np).map(|i| p.coeffs()[i] + loads.ell_s[i]).collect();

    // M y − w λ_y = Bᵀu − G,  wᵀy = 0
    let w = &sp.constraint.weights;
    let mut bb = BlockBuilder::new(&[np, 1], &[np, 1]);
    bb.add(0, 0, &ops.mass_s, 1.0)?;
    bb.add_column(0, 1, 0, w, -1.0);
    bb.add_row(1, 0, 0, w, 1.0);
    let my = bb.build()?;
    let u_act = gather(sol.u.coeffs(), &sp.v_int);
    let btu = ops.b.mul_vec_transpose(&u_act)?;
    let mut rhs_y: Vec<f64> = (0..np).map(|i| btu[i] - loads.g[i]).collect();
    rhs_y.push(0.0);
    let y_sol = SparseLu::new(&my, &format!("mass with multiplier ({ctx})"))?
        .with_tolerance(1e-10)
        .solve(&rhs_y)?;

    Ok(ExtendedState {
        p_hat: Field::new(sp.scalar.clone(), p_hat_c)?,
        p_s: Field::new(sp.scalar.clone(), p_s_c)?,
        y: Field::new(sp.scalar.clone(), y_sol[..np].to_vec())?,
        u: sol.u.clone(),
        q,
        q_hat,
        z: sol.z.clone(),
        p,
        r,
        t: Field::new(sp.vector.clone(), t)?,
        lambda_y: y_sol[np],
        lambda_p: sol.multiplier,
        z_mode: ZMode::Interior,
    })
}
