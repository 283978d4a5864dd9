//! The ten-field extended system as one square sparse matrix.
//!
//! Unknown blocks, each paired with the equation that occupies the same
//! block row:
//!
//! | block   | unknown            | equation                                                     |
//! |---------|--------------------|--------------------------------------------------------------|
//! | `p_hat` | `p̂ ∈ Y_h`          | `p − q − p̂ = ĝ` (nodal)                                      |
//! | `p_s`   | `p_S ∈ Y_h`        | `p_S − p = ℓ_S` (nodal)                                      |
//! | `y`     | `y ∈ M_h`, `λ_y`   | `(div u − y, μ) = (g, μ)` on `Y_h` with multiplier, `∫y = 0`  |
//! | `u`     | `u ∈ X_0h`         | `(grad u, grad w) − (p_S, div w) = ⟨f, w⟩` on `X_0h`          |
//! | `q`     | `q ∈ Y_0h`         | `α(z, grad λ) − (t, grad λ) + (grad q, grad λ) = ⟨ψ, λ⟩`       |
//! | `q_hat` | `q̂ ∈ Y_0h`         | `(grad q̂, grad λ) + (grad p, grad λ) = ⟨ψ̂, λ⟩`               |
//! | `z`     | `z ∈ X_h` / `X_0h` | `(z, w) + (grad p, w) = (f_Δ, w)` / `(z, w) − (p, div w) = …` |
//! | `p`     | `p ∈ M_h`, `λ_p`   | `(z − t + grad(p̂ − q̂) + grad r, grad φ) = ⟨ϱ, φ⟩` on `Y_h`    |
//! | `r`     | `r ∈ Y_h`          | `(r, φ) + (grad(q + q̂), grad φ) = ⟨ϱ̂, φ⟩` on `Y_h`           |
//! | `t`     | `t ∈ X_h`          | `(t, w) = (f̂, w)` on `X_h`                                   |
//!
//! The `α` equation uses `⟨S̃_z, λ⟩ = −(z, grad λ)`. The zero-mean
//! constraints on `y` and `p` are enforced by one multiplier each; the
//! multiplier of `p` enters the gradient equation over `Y_h`, whose rows
//! are linearly dependent through the constant test function.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::data::{StokesData, ZMode};
use super::system::{gather, scatter_field, BlockLayout, BlockSystem, DataLoads, ExtendedSpaces, Operators, SystemKind};
use crate::error::{Error, Result};
use crate::spaces::Field;
use crate::sparse::{BlockBuilder, SparseOperator};

/// Block names of the monolithic layout, in order.
pub const MONOLITHIC_BLOCKS: [&str; 10] = ["p_hat", "p_s", "y", "u", "q", "q_hat", "z", "p", "r", "t"];

/// Human-readable equation labels, aligned with [`MONOLITHIC_BLOCKS`].
pub const EQUATION_NAMES: [&str; 10] = [
    "pressure identity p - q - p_hat = g_hat",
    "pressure shift p_S - p = ell_S",
    "divergence (div u - y, mu) = (g, mu)",
    "momentum",
    "alpha equation for q",
    "q_hat equation",
    "z equation",
    "gradient equation over Y_h",
    "r equation",
    "t projection",
];

pub fn monolithic_layout(sp: &ExtendedSpaces, mode: ZMode) -> BlockLayout {
    let (np, ni, nz) = (sp.n_p(), sp.n_i(), sp.z_dofs(mode).len());
    BlockLayout::new(&[
        ("p_hat", np),
        ("p_s", np),
        ("y", np + 1),
        ("u", 2 * ni),
        ("q", ni),
        ("q_hat", ni),
        ("z", nz),
        ("p", np + 1),
        ("r", np),
        ("t", 2 * np),
    ])
}

fn injection(rows: usize, idx: &[usize]) -> Result<SparseOperator> {
    let t: Vec<_> = idx.iter().enumerate().map(|(k, &i)| (i, k, 1.0)).collect();
    SparseOperator::from_triplets(rows, idx.len(), &t)
}

/// Assembles the ten-field system for `data` with `z_h` in the space
/// selected by `mode`.
pub fn assemble_monolithic(data: &StokesData, spaces: &Arc<ExtendedSpaces>, mode: ZMode) -> Result<BlockSystem> {
    data.check()?;
    let sp = spaces.as_ref();
    let ops = Operators::assemble(sp)?;
    let loads = DataLoads::new(data, sp)?;
    let layout = monolithic_layout(sp, mode);
    let (np, ni) = (sp.n_p(), sp.n_i());
    let zd = sp.z_dofs(mode).to_vec();
    let w = &sp.constraint.weights;
    let alpha = data.alpha;

    let c_int_z = ops.c.submatrix(&sp.s_int, &zd)?;
    let c_int_all = ops.c.submatrix(&sp.s_int, &sp.v_all)?;
    let c_all_z = ops.c.submatrix(&sp.s_all, &zd)?;
    let d_ii = ops.d.submatrix(&sp.s_int, &sp.s_int)?;
    let d_i_all = ops.d.submatrix(&sp.s_int, &sp.s_all)?;
    let d_all_i = ops.d.submatrix(&sp.s_all, &sp.s_int)?;
    let inj_q = injection(np, &sp.s_int)?;
    let eye = SparseOperator::identity(np);
    let bt = ops.b.transpose();

    let mut bb = BlockBuilder::new(&layout.sizes, &layout.sizes);
    // 0: p − q − p̂ = ĝ
    bb.add_at(0, 7, 0, 0, &eye, 1.0)?;
    bb.add(0, 4, &inj_q, -1.0)?;
    bb.add(0, 0, &eye, -1.0)?;
    // 1: p_S − p = ℓ_S
    bb.add(1, 1, &eye, 1.0)?;
    bb.add_at(1, 7, 0, 0, &eye, -1.0)?;
    // 2: Bᵀu − M y + w λ_y = G,  wᵀy = 0
    bb.add_at(2, 3, 0, 0, &bt, 1.0)?;
    bb.add_at(2, 2, 0, 0, &ops.mass_s, -1.0)?;
    bb.add_column(2, 2, np, w, 1.0);
    bb.add_row(2, 2, np, w, 1.0);
    // 3: A u − B p_S = F
    bb.add(3, 3, &ops.a, 1.0)?;
    bb.add(3, 1, &ops.b, -1.0)?;
    // 4: α C z − C t + D q = Ψ   (interior tests)
    bb.add(4, 6, &c_int_z, alpha)?;
    bb.add(4, 9, &c_int_all, -1.0)?;
    bb.add(4, 4, &d_ii, 1.0)?;
    // 5: D q̂ + D p = Ψ̂   (interior tests)
    bb.add(5, 5, &d_ii, 1.0)?;
    bb.add_at(5, 7, 0, 0, &d_i_all, 1.0)?;
    // 6: z equation
    match mode {
        ZMode::Full => {
            bb.add(6, 6, &ops.mass_v, 1.0)?;
            bb.add_at(6, 7, 0, 0, &ops.c.transpose(), 1.0)?;
        }
        ZMode::Interior => {
            bb.add(6, 6, &ops.mass_vi, 1.0)?;
            bb.add_at(6, 7, 0, 0, &ops.b, -1.0)?;
        }
    }
    // 7: C z − C t + D p̂ − D q̂ + D r + w λ_p = ϱ,  wᵀp = 0
    bb.add_at(7, 6, 0, 0, &c_all_z, 1.0)?;
    bb.add_at(7, 9, 0, 0, &ops.c, -1.0)?;
    bb.add_at(7, 0, 0, 0, &ops.d, 1.0)?;
    bb.add_at(7, 5, 0, 0, &d_all_i, -1.0)?;
    bb.add_at(7, 8, 0, 0, &ops.d, 1.0)?;
    bb.add_column(7, 7, np, w, 1.0);
    bb.add_row(7, 7, np, w, 1.0);
    // 8: M r + D (q + q̂) = ϱ̂
    bb.add(8, 8, &ops.mass_s, 1.0)?;
    bb.add(8, 4, &d_all_i, 1.0)?;
    bb.add(8, 5, &d_all_i, 1.0)?;
    // 9: M t = F̂
    bb.add(9, 9, &ops.mass_v, 1.0)?;
    let matrix = bb.build()?;

    let mut rhs = vec![0.0; layout.total()];
    let mut put = |k: usize, v: &[f64]| {
        let o = layout.offset(k);
        rhs[o..o + v.len()].copy_from_slice(v);
    };
    put(0, &loads.g_hat);
    put(1, &loads.ell_s);
    put(2, &loads.g);
    put(3, &gather(&loads.f, &sp.v_int));
    put(4, &gather(&loads.psi, &sp.s_int));
    put(5, &gather(&loads.psi_hat, &sp.s_int));
    put(6, &gather(&loads.f_tri, &zd));
    put(7, &loads.rho);
    put(8, &loads.rho_hat);
    put(9, &loads.f_hat);
    debug_assert_eq!(ni * 2, sp.v_int.len());

    let mut blocks = BTreeMap::new();
    blocks.insert("A".into(), ops.a);
    blocks.insert("B".into(), ops.b);
    blocks.insert("C".into(), ops.c);
    blocks.insert("D".into(), ops.d);
    blocks.insert("M_scalar".into(), ops.mass_s);
    blocks.insert("M_vector".into(), ops.mass_v);
    blocks.insert("M_vector_interior".into(), ops.mass_vi);
    let mut named = BTreeMap::new();
    named.insert("f".into(), loads.f.clone());
    named.insert("f_tri".into(), loads.f_tri.clone());
    named.insert("f_hat".into(), loads.f_hat.clone());
    Ok(BlockSystem {
        kind: SystemKind::Monolithic(mode),
        alpha,
        layout,
        matrix,
        rhs,
        blocks,
        loads: named,
        spaces: spaces.clone(),
        data: data.clone(),
    })
}

/// The ten discrete fields of the extended system plus the two zero-mean
/// multipliers.
#[derive(Debug, Clone)]
pub struct ExtendedState {
    pub p_hat: Field,
    pub p_s: Field,
    pub y: Field,
    pub u: Field,
    pub q: Field,
    pub q_hat: Field,
    /// Vanishes on the boundary in interior z-mode.
    pub z: Field,
    pub p: Field,
    pub r: Field,
    pub t: Field,
    pub lambda_y: f64,
    pub lambda_p: f64,
    pub z_mode: ZMode,
}

impl ExtendedState {
    /// `(name, field)` pairs in layout order.
    pub fn fields(&self) -> [(&'static str, &Field); 10] {
        [
            ("p_hat", &self.p_hat),
            ("p_s", &self.p_s),
            ("y", &self.y),
            ("u", &self.u),
            ("q", &self.q),
            ("q_hat", &self.q_hat),
            ("z", &self.z),
            ("p", &self.p),
            ("r", &self.r),
            ("t", &self.t),
        ]
    }

    /// Scalar fields as CSV `field,node,x,y,value` and vector fields as
    /// `field,node,x,y,value,value2`, in one file per component count.
    pub fn to_csv(&self, vector: bool) -> String {
        let mut s = String::from(if vector {
            "field,node,x,y,value,value2\n"
        } else {
            "field,node,x,y,value\n"
        });
        for (name, f) in self.fields() {
            if (f.space().components() == 2) == vector {
                f.write_rows(&mut s, Some(name));
            }
        }
        s
    }
}

/// Unpacks a monolithic solution vector.
pub fn unpack_state(sys: &BlockSystem, x: &[f64]) -> Result<ExtendedState> {
    let SystemKind::Monolithic(mode) = sys.kind else {
        return Err(Error::UnsupportedMode("unpack_state expects a monolithic system".into()));
    };
    let sp = &sys.spaces;
    let np = sp.n_p();
    let s = |name: &str, dofs: &[usize]| scatter_field(&sp.scalar, dofs, &sys.block(x, name)[..dofs.len()]);
    let v = |name: &str, dofs: &[usize]| scatter_field(&sp.vector, dofs, sys.block(x, name));
    Ok(ExtendedState {
        p_hat: s("p_hat", &sp.s_all),
        p_s: s("p_s", &sp.s_all),
        y: s("y", &sp.s_all),
        u: v("u", &sp.v_int),
        q: s("q", &sp.s_int),
        q_hat: s("q_hat", &sp.s_int),
        z: v("z", sp.z_dofs(mode)),
        p: s("p", &sp.s_all),
        r: s("r", &sp.s_all),
        t: v("t", &sp.v_all),
        lambda_y: sys.block(x, "y")[np],
        lambda_p: sys.block(x, "p")[np],
        z_mode: mode,
    })
}

/// Packs a state into the monolithic layout (inverse of [`unpack_state`]
/// on the active DOFs).
pub fn pack_state(sys: &BlockSystem, state: &ExtendedState) -> Result<Vec<f64>> {
    let SystemKind::Monolithic(mode) = sys.kind else {
        return Err(Error::UnsupportedMode("pack_state expects a monolithic system".into()));
    };
    let sp = &sys.spaces;
    let mut x = vec![0.0; sys.dim()];
    let mut put = |name: &str, f: &Field, dofs: &[usize]| {
        let o = sys.layout.range(name).expect("known block").start;
        for (k, &d) in dofs.iter().enumerate() {
            x[o + k] = f.coeffs()[d];
        }
    };
    put("p_hat", &state.p_hat, &sp.s_all);
    put("p_s", &state.p_s, &sp.s_all);
    put("y", &state.y, &sp.s_all);
    put("u", &state.u, &sp.v_int);
    put("q", &state.q, &sp.s_int);
    put("q_hat", &state.q_hat, &sp.s_int);
    put("z", &state.z, sp.z_dofs(mode));
    put("p", &state.p, &sp.s_all);
    put("r", &state.r, &sp.s_all);
    put("t", &state.t, &sp.v_all);
    let np = sp.n_p();
    x[sys.layout.range("y").expect("known block").start + np] = state.lambda_y;
    x[sys.layout.range("p").expect("known block").start + np] = state.lambda_p;
    Ok(x)
}

/// Solves the monolithic system and unpacks the state.
pub fn solve_monolithic(sys: &BlockSystem) -> Result<(ExtendedState, f64)> {
    let sol = sys.solve()?;
    Ok((unpack_state(sys, &sol.x)?, sol.residual))
}

/// Residual of one discrete equation.
#[derive(Debug, Clone, Serialize)]
pub struct EquationResidual {
    pub equation: &'static str,
    /// `max |R| / max(|K||x| + |b|)` over the rows of the equation.
    pub relative: f64,
    pub absolute: f64,
    /// Same quantity restricted to rows tested by interior basis functions
    /// (equal to `relative` for equations without boundary tests).
    pub relative_interior_tests: f64,
    /// Same quantity restricted to rows tested by boundary basis functions.
    pub relative_boundary_tests: f64,
}

/// Evaluates each of the ten equations on `state`. The multipliers of the
/// zero-mean constraints are chosen optimally (least squares) instead of
/// taken from the state.
pub fn equation_residuals(state: &ExtendedState, data: &StokesData, spaces: &Arc<ExtendedSpaces>) -> Result<Vec<EquationResidual>> {
    let sys = assemble_monolithic(data, spaces, state.z_mode)?;
    let mut s0 = state.clone();
    s0.lambda_y = 0.0;
    s0.lambda_p = 0.0;
    let x = pack_state(&sys, &s0)?;
    let kx = sys.matrix.mul_vec(&x)?;
    let scale_all = sys.matrix.abs_mul_vec(&x);
    let sp = spaces.as_ref();
    let np = sp.n_p();
    let mut out = Vec::with_capacity(10);
    for (k, name) in EQUATION_NAMES.iter().enumerate() {
        let o = sys.layout.offset(k);
        let len = sys.layout.sizes[k];
        let mut r: Vec<f64> = (o..o + len).map(|i| kx[i] - sys.rhs[i]).collect();
        let scale: Vec<f64> = (o..o + len).map(|i| scale_all[i] + sys.rhs[i].abs()).collect();
        if k == 2 || k == 7 {
            let w = &sp.constraint.weights;
            let lam = -r[..np].iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / w.iter().map(|v| v * v).sum::<f64>();
            r[..np].iter_mut().zip(w).for_each(|(ri, wi)| *ri += lam * wi);
        }
        // Rows of equations tested over all of Y_h are split by node type.
        let (int_rows, bdry_rows): (Vec<usize>, Vec<usize>) = if matches!(k, 2 | 7 | 8) {
            (sp.s_int.clone(), sp.s_bdry.clone())
        } else {
            ((0..len).collect(), Vec::new())
        };
        let rel = |rows: &[usize]| {
            let rmax = rows.iter().map(|&i| r[i].abs()).fold(0.0, f64::max);
            let smax = rows.iter().map(|&i| scale[i]).fold(0.0, f64::max);
            if smax > 0.0 {
                rmax / smax
            } else {
                rmax
            }
        };
        let all: Vec<usize> = (0..len).collect();
        out.push(EquationResidual {
            equation: name,
            relative: rel(&all),
            absolute: r.iter().map(|v| v.abs()).fold(0.0, f64::max),
            relative_interior_tests: rel(&int_rows),
            relative_boundary_tests: rel(&bdry_rows),
        });
    }
    Ok(out)
}
