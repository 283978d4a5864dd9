//! Spaces, assembled operator blocks, data loads and the block layout
//! shared by all forms of the extended system.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;

use super::data::{StokesData, ZMode};
use crate::error::{Error, Result};
use crate::forms::{
    assemble_div_coupling, assemble_grad_coupling, assemble_mass, assemble_stiffness, load_vector,
    load_vector_vec,
};
use crate::linalg::SparseLu;
use crate::mesh::Mesh;
use crate::spaces::{zero_mean_constraint, FeSpace, Field, Restriction, ZeroMeanConstraint};
use crate::sparse::SparseOperator;

/// The scalar and vector P1 spaces on one mesh, with cached DOF sets.
#[derive(Debug)]
pub struct ExtendedSpaces {
    pub mesh: Arc<Mesh>,
    pub scalar: Arc<FeSpace>,
    pub vector: Arc<FeSpace>,
    pub constraint: ZeroMeanConstraint,
    pub s_int: Vec<usize>,
    pub s_bdry: Vec<usize>,
    pub s_all: Vec<usize>,
    pub v_int: Vec<usize>,
    pub v_all: Vec<usize>,
}

impl ExtendedSpaces {
    pub fn new(mesh: Arc<Mesh>) -> Result<Arc<Self>> {
        let scalar = FeSpace::p1(mesh.clone(), 1)?;
        let vector = FeSpace::p1(mesh.clone(), 2)?;
        if scalar.interior_dofs().is_empty() {
            return Err(Error::DegenerateSpace(
                "the extended system needs at least one interior node".into(),
            ));
        }
        let constraint = zero_mean_constraint(&scalar)?;
        Ok(Arc::new(Self {
            s_int: scalar.interior_dofs(),
            s_bdry: scalar.boundary_dofs(),
            s_all: scalar.dofs(Restriction::Full),
            v_int: vector.interior_dofs(),
            v_all: vector.dofs(Restriction::Full),
            mesh,
            scalar,
            vector,
            constraint,
        }))
    }

    pub fn n_p(&self) -> usize {
        self.s_all.len()
    }

    pub fn n_i(&self) -> usize {
        self.s_int.len()
    }

    /// DOFs of `z_h` for a mode.
    pub fn z_dofs(&self, mode: ZMode) -> &[usize] {
        match mode {
            ZMode::Full => &self.v_all,
            ZMode::Interior => &self.v_int,
        }
    }

    pub(crate) fn context(&self, alpha: f64) -> String {
        format!(
            "alpha={alpha}, nodes={}, h={:.4}",
            self.mesh.n_nodes(),
            self.mesh.h()
        )
    }
}

/// Assembled bilinear forms. `C` is `(Φ_j, grad λ_i)` over all scalar rows
/// and all vector columns; `B` is `(φ_j, div Φ_i)` with interior velocity
/// rows; in the block notation `B_hᵀ` is `−B` and `K_h` is `−M_ii`.
#[derive(Debug)]
pub struct Operators {
    /// Vector stiffness on interior DOFs (`A_h`).
    pub a: SparseOperator,
    pub b: SparseOperator,
    pub c: SparseOperator,
    /// Scalar stiffness on all DOFs (`D_h` before restriction).
    pub d: SparseOperator,
    pub mass_s: SparseOperator,
    pub mass_v: SparseOperator,
    pub mass_vi: SparseOperator,
}

impl Operators {
    pub fn assemble(sp: &ExtendedSpaces) -> Result<Self> {
        Ok(Self {
            a: assemble_stiffness(&sp.vector, Restriction::Interior)?,
            b: assemble_div_coupling(&sp.vector, &sp.scalar)?,
            c: assemble_grad_coupling(&sp.vector, &sp.scalar, Restriction::Full)?,
            d: assemble_stiffness(&sp.scalar, Restriction::Full)?,
            mass_s: assemble_mass(&sp.scalar, Restriction::Full)?,
            mass_v: assemble_mass(&sp.vector, Restriction::Full)?,
            mass_vi: assemble_mass(&sp.vector, Restriction::Interior)?,
        })
    }
}

/// Load vectors of the data bundle over all DOFs (`ĝ`, `ℓ_S` as nodal
/// values).
#[derive(Debug, Clone)]
pub struct DataLoads {
    pub f: Vec<f64>,
    pub f_tri: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub ell_s: Vec<f64>,
    pub g: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_hat: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_hat: Vec<f64>,
}

impl DataLoads {
    pub fn new(data: &StokesData, sp: &ExtendedSpaces) -> Result<Self> {
        let (ns, nv) = (sp.scalar.n_dofs(), sp.vector.n_dofs());
        let sload = |f| -> Result<Vec<f64>> {
            match data.scalar(f) {
                Some(f) => load_vector(&sp.scalar, f.as_ref()),
                None => Ok(vec![0.0; ns]),
            }
        };
        let vload = |f| -> Result<Vec<f64>> {
            match data.vector(f) {
                Some(f) => load_vector_vec(&sp.vector, f.as_ref()),
                None => Ok(vec![0.0; nv]),
            }
        };
        let nodal = |f| -> Vec<f64> {
            match data.scalar(f) {
                Some(f) => sp.mesh.nodes().iter().map(|&x| f(x)).collect(),
                None => vec![0.0; ns],
            }
        };
        Ok(Self {
            f: vload(&data.f)?,
            f_tri: vload(&data.f_tri)?,
            f_hat: vload(&data.f_hat)?,
            g_hat: nodal(&data.g_hat),
            ell_s: nodal(&data.ell_s),
            g: sload(&data.g)?,
            psi: sload(&data.psi)?,
            psi_hat: sload(&data.psi_hat)?,
            rho: sload(&data.rho)?,
            rho_hat: sload(&data.rho_hat)?,
        })
    }
}

pub(crate) fn gather(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Named unknown (and matching equation) blocks of a block system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockLayout {
    pub names: Vec<String>,
    pub sizes: Vec<usize>,
}

impl BlockLayout {
    pub fn new(blocks: &[(&str, usize)]) -> Self {
        Self {
            names: blocks.iter().map(|b| b.0.to_string()).collect(),
            sizes: blocks.iter().map(|b| b.1).collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn offset(&self, k: usize) -> usize {
        self.sizes[..k].iter().sum()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn range(&self, name: &str) -> Option<Range<usize>> {
        let k = self.index(name)?;
        let o = self.offset(k);
        Some(o..o + self.sizes[k])
    }

    /// One line per block: `name offset size`.
    pub fn describe(&self) -> String {
        self.names
            .iter()
            .enumerate()
            .map(|(k, n)| format!("{n} {} {}\n", self.offset(k), self.sizes[k]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SystemKind {
    Monolithic(ZMode),
    Reduced3Block,
}

/// An assembled square block system with its right-hand side.
#[derive(Debug)]
pub struct BlockSystem {
    pub kind: SystemKind,
    pub alpha: f64,
    pub layout: BlockLayout,
    pub matrix: SparseOperator,
    pub rhs: Vec<f64>,
    /// Named operator blocks the matrix was built from.
    pub blocks: BTreeMap<String, SparseOperator>,
    pub loads: BTreeMap<String, Vec<f64>>,
    pub spaces: Arc<ExtendedSpaces>,
    pub data: StokesData,
}

/// Solution vector of a block system and its relative residual.
#[derive(Debug, Clone)]
pub struct SolvedSystem {
    pub x: Vec<f64>,
    pub residual: f64,
}

/// Residual contract of every block solve.
pub const BLOCK_RESIDUAL: f64 = 1e-10;

impl BlockSystem {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn factorize(&self) -> Result<SparseLu> {
        let ctx = format!("{:?} ({})", self.kind, self.spaces.context(self.alpha));
        Ok(SparseLu::new(&self.matrix, &ctx)?.with_tolerance(BLOCK_RESIDUAL))
    }

    /// Direct sparse solve with the residual contract.
    pub fn solve(&self) -> Result<SolvedSystem> {
        let lu = self.factorize()?;
        let x = lu.solve(&self.rhs)?;
        let residual = lu.relative_residual(&x, &self.rhs);
        Ok(SolvedSystem { x, residual })
    }

    pub fn block<'a>(&self, x: &'a [f64], name: &str) -> &'a [f64] {
        let r = self.layout.range(name).expect("block name from this layout");
        &x[r]
    }
}

pub(crate) fn scatter_field(space: &Arc<FeSpace>, dofs: &[usize], values: &[f64]) -> Field {
    Field::scatter(space.clone(), dofs, values)
}
