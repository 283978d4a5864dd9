//! Direct and iterative solvers on top of [`SparseOperator`].

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, SparseOperator};

/// Sparse LU factorization with a residual check on every solve.
pub struct SparseLu {
    n: usize,
    matrix: SparseOperator,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    context: String,
    tolerance: f64,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu")
            .field("n", &self.n)
            .field("context", &self.context)
            .finish()
    }
}

impl SparseLu {
    /// Factorizes a square matrix. `context` names the operator in error
    /// messages.
    pub fn new(matrix: &SparseOperator, context: &str) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n {
            return Err(Error::InvalidArgument(format!(
                "{context}: LU needs a square matrix, got {}x{}",
                n,
                matrix.cols()
            )));
        }
        let t: Vec<Triplet<usize, usize, f64>> =
            matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t).map_err(|e| {
            Error::Factorization {
                context: context.into(),
                reason: format!("{e:?}"),
            }
        })?;
        let lu = csc.sp_lu().map_err(|e| Error::Factorization {
            context: context.into(),
            reason: format!("{e:?}"),
        })?;
        Ok(Self {
            n,
            matrix: matrix.clone(),
            lu,
            context: context.into(),
            tolerance: 1e-8,
        })
    }

    /// Relative residual above which a solve is reported as failed.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves without checking the residual.
    pub fn solve_unchecked(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(self.n, |i| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[i]).collect()
    }

    /// Solves `A x = b` and verifies `‖b − A x‖ ≤ tol (‖A‖‖x‖ + ‖b‖)`.
    /// A singular matrix shows up here as a non-finite or large residual.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{}: right-hand side has length {}, expected {}",
                self.context,
                b.len(),
                self.n
            )));
        }
        let x = self.solve_unchecked(b);
        let rel = self.relative_residual(&x, b);
        if !rel.is_finite() || rel > self.tolerance {
            return Err(Error::Residual {
                context: self.context.clone(),
                residual: rel,
                tolerance: self.tolerance,
            });
        }
        Ok(x)
    }

    /// Componentwise backward error `max_i |r_i| / (|A||x| + |b|)_i`.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        if x.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let ax = self.matrix.mul_vec(x).expect("dimensions checked");
        let scale = self.matrix.abs_mul_vec(x);
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let smax = scale.iter().fold(0.0f64, |m, v| m.max(*v)) + bmax;
        let rmax = ax.iter().zip(b).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if smax == 0.0 {
            0.0
        } else {
            rmax / smax
        }
    }
}

/// Result of an iterative solve.
#[derive(Debug, Clone)]
pub struct IterativeOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Restarted GMRES with right preconditioning.
///
/// Solves `A x = b` where `apply_a` computes `A v` and `apply_m` computes an
/// approximation of `A⁻¹ v`. Converges when `‖b − A x‖ ≤ tol ‖b‖`.
pub fn gmres(
    apply_a: impl Fn(&[f64]) -> Result<Vec<f64>>,
    apply_m: impl Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<IterativeOutcome> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(IterativeOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let m = restart.max(1);
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let ax = apply_a(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let zk = apply_m(&v[k])?;
            let mut w = apply_a(&zk)?;
            z.push(zk);
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for _ in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let hij = dot(&w, vi);
                    h[i][k] += hij;
                    w.iter_mut().zip(vi).for_each(|(wj, vj)| *wj -= hij * vj);
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            total += 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= tol || hn == 0.0 || total >= max_iter {
                break;
            }
            v.push(w.iter().map(|x| x / hn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = ((i + 1)..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            x.iter_mut().zip(zi).for_each(|(xj, zj)| *xj += yi * zj);
        }
        if k_used == 0 {
            break;
        }
    }
    let ax = apply_a(&x)?;
    let true_rel = norm2(&b.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / bnorm;
    if !true_rel.is_finite() || true_rel > tol.max(rel) * 10.0 {
        return Err(Error::NoConvergence {
            iterations: total,
            residual: true_rel,
        });
    }
    Ok(IterativeOutcome {
        solution: x,
        iterations: total,
        relative_residual: true_rel,
    })
}

/// Estimates of the extreme singular values of a square sparse matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConditionEstimate {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl ConditionEstimate {
    /// `σ_min / σ_max`, zero for a numerically singular matrix.
    pub fn ratio(&self) -> f64 {
        if self.sigma_max > 0.0 && self.sigma_min.is_finite() {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Power iteration on `KᵀK` for `σ_max` and inverse iteration through LU
/// factors of `K` and `Kᵀ` for `σ_min`. A factorization failure or a
/// non-finite iterate reports `σ_min = 0`.
pub fn condition_estimate(matrix: &SparseOperator, iterations: usize) -> Result<ConditionEstimate> {
    match SparseLu::new(matrix, "condition estimate") {
        Ok(lu) => condition_estimate_with(matrix, &lu, iterations),
        Err(_) => Ok(ConditionEstimate {
            sigma_max: sigma_max_estimate(matrix, iterations)?,
            sigma_min: 0.0,
        }),
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    // Deterministic start vector with no special structure.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_75).fract()).collect();
    normalize(&mut x);
    x
}

fn sigma_max_estimate(matrix: &SparseOperator, iterations: usize) -> Result<f64> {
    let n = matrix.rows();
    if n == 0 || matrix.cols() != n {
        return Err(Error::InvalidArgument("condition estimate needs a nonempty square matrix".into()));
    }
    let mut x = start_vector(n);
    let mut sigma_max = 0.0;
    for _ in 0..iterations.max(1) {
        x = matrix.mul_vec_transpose(&matrix.mul_vec(&x)?)?;
        sigma_max = normalize(&mut x).sqrt();
    }
    Ok(sigma_max)
}

/// [`condition_estimate`] reusing an existing factorization of `matrix`.
pub fn condition_estimate_with(matrix: &SparseOperator, lu: &SparseLu, iterations: usize) -> Result<ConditionEstimate> {
    let sigma_max = sigma_max_estimate(matrix, iterations)?;
    let Ok(lut) = SparseLu::new(&matrix.transpose(), "condition estimate (transpose)") else {
        return Ok(ConditionEstimate { sigma_max, sigma_min: 0.0 });
    };
    let mut x = start_vector(matrix.rows());
    let mut sigma_min = f64::INFINITY;
    for _ in 0..iterations.max(1) {
        x = lu.solve_unchecked(&lut.solve_unchecked(&x));
        let g = normalize(&mut x);
        if !g.is_finite() || g == 0.0 {
            sigma_min = 0.0;
            break;
        }
        sigma_min = 1.0 / g.sqrt();
    }
    Ok(ConditionEstimate { sigma_max, sigma_min })
}

/// Dense singular values via nalgebra, sorted in decreasing order.
pub fn singular_values(dense: &[Vec<f64>]) -> Vec<f64> {
    let rows = dense.len();
    let cols = dense.first().map_or(0, Vec::len);
    let m = nalgebra::DMatrix::from_fn(rows, cols, |i, j| dense[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
