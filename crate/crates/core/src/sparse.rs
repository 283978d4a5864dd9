//! Compressed sparse row matrices used for every assembled operator.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Builds a CSR matrix from `(row, col, value)` triplets, summing
    /// duplicates. Explicit zeros produced by cancellation are kept.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::IndexOutOfRange {
                    index: if i >= rows { i } else { j },
                    len: if i >= rows { rows } else { cols },
                });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(col, value)` over stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// Iterates all stored `(row, col, value)` entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} applied to a {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn mul_vec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} applied to the transpose of a {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let mut y = vec![0.0; self.cols];
        for (i, j, v) in self.triplets() {
            y[j] += v * x[i];
        }
        Ok(y)
    }

    /// Row-wise `Σ_j |a_ij| |x_j|`, used to normalize residuals.
    pub fn abs_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v.abs() * x[j].abs()).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, &t).expect("transposed indices are in range")
    }

    /// Extracts `A[rows, cols]` with rows and columns renumbered in the
    /// given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mut col_map = vec![usize::MAX; self.cols];
        for (k, &j) in cols.iter().enumerate() {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange { index: j, len: self.cols });
            }
            col_map[j] = k;
        }
        let mut t = Vec::new();
        for (k, &i) in rows.iter().enumerate() {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange { index: i, len: self.rows });
            }
            for (j, v) in self.row(i) {
                if col_map[j] != usize::MAX {
                    t.push((k, col_map[j], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &t)
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidArgument("matrix shapes differ".into()));
        }
        let t: Vec<_> = self
            .triplets()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, b * v)))
            .collect();
        Self::from_triplets(self.rows, self.cols, &t)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v *= a);
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            d[i][j] += v;
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij − a_ji|` relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let diff = self.linear_combination(1.0, &self.transpose(), -1.0).expect("square");
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            diff.max_abs() / scale
        }
    }

    /// Plain-text dump: a `rows cols nnz` header followed by one
    /// `i j value` line per stored entry (zero-based indices).
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(32 * self.nnz() + 32);
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz());
        for (i, j, v) in self.triplets() {
            let _ = writeln!(s, "{i} {j} {v:e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| Error::Parse(format!("bad header token {w:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = h[..] else {
            return Err(Error::Parse(format!("header must have three fields, got {header:?}")));
        };
        let mut t = Vec::with_capacity(nnz);
        for line in lines {
            let mut w = line.split_whitespace();
            let parse_err = || Error::Parse(format!("bad entry line {line:?}"));
            let i: usize = w.next().and_then(|x| x.parse().ok()).ok_or_else(parse_err)?;
            let j: usize = w.next().and_then(|x| x.parse().ok()).ok_or_else(parse_err)?;
            let v: f64 = w.next().and_then(|x| x.parse().ok()).ok_or_else(parse_err)?;
            t.push((i, j, v));
        }
        if t.len() != nnz {
            return Err(Error::Parse(format!("expected {nnz} entries, found {}", t.len())));
        }
        Self::from_triplets(rows, cols, &t)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Accumulates triplets for a block matrix with fixed row and column
/// offsets per block.
#[derive(Debug, Clone, Default)]
pub struct BlockBuilder {
    row_offsets: Vec<usize>,
    col_offsets: Vec<usize>,
    triplets: Vec<(usize, usize, f64)>,
}

impl BlockBuilder {
    /// `row_sizes[k]` and `col_sizes[k]` are the sizes of block row and
    /// block column `k`.
    pub fn new(row_sizes: &[usize], col_sizes: &[usize]) -> Self {
        let offsets = |s: &[usize]| {
            let mut o = vec![0];
            for &n in s {
                o.push(o.last().copied().unwrap_or(0) + n);
            }
            o
        };
        Self {
            row_offsets: offsets(row_sizes),
            col_offsets: offsets(col_sizes),
            triplets: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        *self.row_offsets.last().unwrap_or(&0)
    }

    pub fn cols(&self) -> usize {
        *self.col_offsets.last().unwrap_or(&0)
    }

    pub fn row_offset(&self, block: usize) -> usize {
        self.row_offsets[block]
    }

    pub fn col_offset(&self, block: usize) -> usize {
        self.col_offsets[block]
    }

    /// Adds `scale * m` at block position `(bi, bj)`.
    pub fn add(&mut self, bi: usize, bj: usize, m: &SparseOperator, scale: f64) -> Result<()> {
        let (r0, r1) = (self.row_offsets[bi], self.row_offsets[bi + 1]);
        let (c0, c1) = (self.col_offsets[bj], self.col_offsets[bj + 1]);
        if m.rows() != r1 - r0 || m.cols() != c1 - c0 {
            return Err(Error::InvalidArgument(format!(
                "block ({bi},{bj}) expects {}x{}, got {}x{}",
                r1 - r0,
                c1 - c0,
                m.rows(),
                m.cols()
            )));
        }
        self.triplets
            .extend(m.triplets().map(|(i, j, v)| (r0 + i, c0 + j, scale * v)));
        Ok(())
    }

    /// Adds `scale * m` inside block `(bi, bj)` with its top-left corner at
    /// local position `(row0, col0)`.
    pub fn add_at(
        &mut self,
        bi: usize,
        bj: usize,
        row0: usize,
        col0: usize,
        m: &SparseOperator,
        scale: f64,
    ) -> Result<()> {
        let (r0, r1) = (self.row_offsets[bi], self.row_offsets[bi + 1]);
        let (c0, c1) = (self.col_offsets[bj], self.col_offsets[bj + 1]);
        if row0 + m.rows() > r1 - r0 || col0 + m.cols() > c1 - c0 {
            return Err(Error::InvalidArgument(format!(
                "a {}x{} matrix at ({row0},{col0}) does not fit block ({bi},{bj}) of size {}x{}",
                m.rows(),
                m.cols(),
                r1 - r0,
                c1 - c0
            )));
        }
        self.triplets
            .extend(m.triplets().map(|(i, j, v)| (r0 + row0 + i, c0 + col0 + j, scale * v)));
        Ok(())
    }

    /// Adds a dense column `v` into block `(bi, bj)` at local column `col`.
    pub fn add_column(&mut self, bi: usize, bj: usize, col: usize, v: &[f64], scale: f64) {
        let r0 = self.row_offsets[bi];
        let c = self.col_offsets[bj] + col;
        self.triplets
            .extend(v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (r0 + i, c, scale * x)));
    }

    /// Adds a dense row `v` into block `(bi, bj)` at local row `row`.
    pub fn add_row(&mut self, bi: usize, bj: usize, row: usize, v: &[f64], scale: f64) {
        let r = self.row_offsets[bi] + row;
        let c0 = self.col_offsets[bj];
        self.triplets
            .extend(v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(j, x)| (r, c0 + j, scale * x)));
    }

    pub fn build(&self) -> Result<SparseOperator> {
        SparseOperator::from_triplets(self.rows(), self.cols(), &self.triplets)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> SparseOperator {
        SparseOperator::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (0, 0, 4.0)]).unwrap()
    }

    #[test]
    fn duplicates_are_summed() {
        let a = small();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 5.0);
        assert_eq!(a.to_dense(), vec![vec![5.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]]);
    }

    #[test]
    fn out_of_range_triplet() {
        assert!(SparseOperator::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn products() {
        let a = small();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![7.0, 3.0]);
        assert_eq!(a.mul_vec_transpose(&[1.0, 2.0]).unwrap(), vec![5.0, 6.0, 2.0]);
        assert!(a.mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn submatrix_reorders() {
        let a = small();
        let s = a.submatrix(&[1, 0], &[2, 1]).unwrap();
        assert_eq!(s.to_dense(), vec![vec![0.0, 3.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn text_round_trip() {
        let a = small();
        assert_eq!(SparseOperator::from_text(&a.to_text()).unwrap(), a);
        assert!(SparseOperator::from_text("2 2 1\n").is_err());
    }

    #[test]
    fn block_builder_places_blocks() {
        let mut b = BlockBuilder::new(&[1, 2], &[2, 1]);
        b.add(1, 0, &SparseOperator::identity(2), 2.0).unwrap();
        b.add_row(0, 1, 0, &[7.0], 1.0);
        assert!(b.add(0, 0, &SparseOperator::identity(2), 1.0).is_err());
        let m = b.build().unwrap();
        assert_eq!(
            m.to_dense(),
            vec![vec![0.0, 0.0, 7.0], vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]
        );
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, f64)>)> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            let t = proptest::collection::vec((0..r, 0..c, -10.0f64..10.0), 0..20);
            (Just(r), Just(c), t)
        })
    }

    proptest! {
        #[test]
        fn transpose_matches_adjoint((r, c, t) in arb_matrix(), seed in 0u64..1000) {
            let a = SparseOperator::from_triplets(r, c, &t).unwrap();
            let x: Vec<f64> = (0..c).map(|k| ((k as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
            let y: Vec<f64> = (0..r).map(|k| ((k as u64 * 13 + seed) % 11) as f64 - 5.0).collect();
            let lhs = dot(&y, &a.mul_vec(&x).unwrap());
            let rhs = dot(&a.transpose().mul_vec(&y).unwrap(), &x);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
            prop_assert_eq!(a.transpose().transpose().to_dense(), a.to_dense());
        }

        #[test]
        fn dense_agrees_with_triplet_sum((r, c, t) in arb_matrix()) {
            let a = SparseOperator::from_triplets(r, c, &t).unwrap();
            let mut d = vec![vec![0.0; c]; r];
            for &(i, j, v) in &t { d[i][j] += v; }
            for i in 0..r { for j in 0..c {
                prop_assert!((a.to_dense()[i][j] - d[i][j]).abs() < 1e-12);
            }}
        }
    }
}
