//! Canonical vectors, logical and column-stochastic matrices, and the
//! semitensor product.
//!
//! Every index accepted or returned by a public method is 1-based, so that
//! `δ_k^i` is written `CanonicalIndex::new(i, k)` and column `j` of a matrix
//! is `column(j)`. Storage is 0-based internally.

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of rows or columns any matrix operation will produce.
pub const MAX_DIMENSION: usize = 1 << 20;

/// Default absolute tolerance for probability and cost comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn check_size(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DIMENSION || cols > MAX_DIMENSION {
        return Err(Error::SizeLimit {
            rows,
            cols,
            limit: MAX_DIMENSION,
        });
    }
    Ok(())
}

fn checked_dim(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b).ok_or(Error::SizeLimit {
        rows: usize::MAX,
        cols: usize::MAX,
        limit: MAX_DIMENSION,
    })
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: usize, b: usize) -> Result<usize> {
    checked_dim(a / gcd(a, b), b)
}

/// The canonical basis vector `δ_dim^value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalIndex {
    value: usize,
    dim: usize,
}

impl CanonicalIndex {
    pub fn new(value: usize, dim: usize) -> Result<Self> {
        if value == 0 || value > dim {
            return Err(Error::IndexOutOfRange { index: value, dim });
        }
        Ok(Self { value, dim })
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn dim(self) -> usize {
        self.dim
    }

    pub fn to_matrix(self) -> SparseMatrix {
        SparseMatrix {
            rows: self.dim,
            cols: 1,
            columns: vec![vec![(self.value - 1, 1.0)]],
        }
    }
}

impl fmt::Display for CanonicalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ{}^{}", self.dim, self.value)
    }
}

/// A real matrix stored column by column, keeping only nonzero entries.
///
/// Row indices inside a column are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_size(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        })
    }

    pub fn identity(k: usize) -> Result<Self> {
        check_size(k, k)?;
        Ok(Self {
            rows: k,
            cols: k,
            columns: (0..k).map(|i| vec![(i, 1.0)]).collect(),
        })
    }

    /// Builds a matrix from 1-based `(row, col, value)` triplets. Duplicate
    /// positions are summed and exact zeros are dropped.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        check_size(rows, cols)?;
        let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
        for (i, j, v) in entries {
            if i == 0 || i > rows {
                return Err(Error::IndexOutOfRange { index: i, dim: rows });
            }
            if j == 0 || j > cols {
                return Err(Error::IndexOutOfRange { index: j, dim: cols });
            }
            columns[j - 1].push((i - 1, v));
        }
        for col in &mut columns {
            *col = normalize_column(std::mem::take(col));
        }
        Ok(Self {
            rows,
            cols,
            columns,
        })
    }

    /// Builds a matrix from dense rows.
    pub fn from_dense(data: &[Vec<f64>]) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged dense rows".into()));
        }
        Self::from_entries(
            rows,
            cols,
            data.iter().enumerate().flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(move |(j, &v)| (i + 1, j + 1, v))
            }),
        )
    }

    /// Column storage with 0-based rows; rows must be strictly increasing.
    pub(crate) fn from_raw_columns(rows: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        check_size(rows, columns.len())?;
        debug_assert!(columns
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|e| e.0 < rows)));
        Ok(Self {
            rows,
            cols: columns.len(),
            columns,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        let c = &self.columns[col - 1];
        match c.binary_search_by_key(&(row - 1), |e| e.0) {
            Ok(k) => c[k].1,
            Err(_) => 0.0,
        }
    }

    /// Nonzero entries of 1-based column `col` as 1-based `(row, value)` pairs.
    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.columns[col - 1].iter().map(|&(r, v)| (r + 1, v))
    }

    pub(crate) fn raw_column(&self, col0: usize) -> &[(usize, f64)] {
        &self.columns[col0]
    }

    pub fn column_sum(&self, col: usize) -> f64 {
        self.columns[col - 1].iter().map(|e| e.1).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, v) in c {
                out[i][j] = v;
            }
        }
        out
    }

    /// Submatrix made of the 1-based columns `first..=last`.
    pub fn column_range(&self, first: usize, last: usize) -> Result<Self> {
        if first == 0 || last < first || last > self.cols {
            return Err(Error::DimensionMismatch(format!(
                "column range {first}..={last} of a matrix with {} columns",
                self.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: last - first + 1,
            columns: self.columns[first - 1..last].to_vec(),
        })
    }

    /// Maximum absolute entrywise difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.columns.iter().zip(&other.columns) {
            let (mut i, mut k) = (0, 0);
            while i < a.len() || k < b.len() {
                let d = match (a.get(i), b.get(k)) {
                    (Some(x), Some(y)) if x.0 == y.0 => {
                        i += 1;
                        k += 1;
                        x.1 - y.1
                    }
                    (Some(x), Some(y)) if x.0 < y.0 => {
                        i += 1;
                        x.1
                    }
                    (Some(x), None) => {
                        i += 1;
                        x.1
                    }
                    (_, Some(y)) => {
                        k += 1;
                        y.1
                    }
                    (None, None) => unreachable!(),
                };
                worst = worst.max(d.abs());
            }
        }
        Some(worst)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Ordinary matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        check_size(self.rows, rhs.cols)?;
        let mut acc = vec![0.0; self.rows];
        let mut touched = vec![false; self.rows];
        let mut rows_used = Vec::new();
        let mut columns = Vec::with_capacity(rhs.cols);
        for rc in &rhs.columns {
            for &(k, b) in rc {
                for &(i, a) in &self.columns[k] {
                    if !touched[i] {
                        touched[i] = true;
                        rows_used.push(i);
                    }
                    acc[i] += a * b;
                }
            }
            rows_used.sort_unstable();
            let mut col = Vec::with_capacity(rows_used.len());
            for &i in &rows_used {
                if acc[i] != 0.0 {
                    col.push((i, acc[i]));
                }
                acc[i] = 0.0;
                touched[i] = false;
            }
            rows_used.clear();
            columns.push(col);
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            columns,
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let rows = checked_dim(self.rows, rhs.rows)?;
        let cols = checked_dim(self.cols, rhs.cols)?;
        check_size(rows, cols)?;
        let mut columns = Vec::with_capacity(cols);
        for a in &self.columns {
            for b in &rhs.columns {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for &(i1, x) in a {
                    for &(i2, y) in b {
                        let v = x * y;
                        if v != 0.0 {
                            col.push((i1 * rhs.rows + i2, v));
                        }
                    }
                }
                columns.push(col);
            }
        }
        Ok(Self {
            rows,
            cols,
            columns,
        })
    }

    /// Left semitensor product `self ⋉ rhs = (self ⊗ I_{l/c1})(rhs ⊗ I_{l/r2})`
    /// with `l = lcm(c1, r2)`.
    pub fn stp(&self, rhs: &Self) -> Result<Self> {
        if self.cols == rhs.rows {
            return self.mul(rhs);
        }
        if self.cols == 0 || rhs.rows == 0 {
            return Err(Error::DimensionMismatch(
                "semitensor product with an empty dimension".into(),
            ));
        }
        let l = lcm(self.cols, rhs.rows)?;
        let rows = checked_dim(self.rows, l / self.cols)?;
        let cols = checked_dim(rhs.cols, l / rhs.rows)?;
        check_size(rows, cols)?;
        let left = self.kron(&Self::identity(l / self.cols)?)?;
        let right = rhs.kron(&Self::identity(l / rhs.rows)?)?;
        left.mul(&right)
    }
}

fn normalize_column(mut col: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}

/// A `rows × cols` matrix whose columns are canonical basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalMatrix {
    rows: usize,
    targets: Vec<usize>,
}

impl LogicalMatrix {
    /// `targets[j]` is the 1-based row carried by column `j + 1`.
    pub fn new(rows: usize, targets: Vec<usize>) -> Result<Self> {
        check_size(rows, targets.len())?;
        if let Some(&bad) = targets.iter().find(|&&t| t == 0 || t > rows) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: rows,
            });
        }
        Ok(Self {
            rows,
            targets: targets.into_iter().map(|t| t - 1).collect(),
        })
    }

    pub(crate) fn from_raw_targets(rows: usize, targets: Vec<usize>) -> Self {
        debug_assert!(targets.iter().all(|&t| t < rows));
        Self { rows, targets }
    }

    pub fn identity(k: usize) -> Self {
        Self {
            rows: k,
            targets: (0..k).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.targets.len()
    }

    /// 1-based row of the unit entry in 1-based column `col`.
    pub fn target(&self, col: usize) -> usize {
        self.targets[col - 1] + 1
    }

    /// All column targets, 1-based.
    pub fn targets(&self) -> Vec<usize> {
        self.targets.iter().map(|t| t + 1).collect()
    }

    pub(crate) fn raw_targets(&self) -> &[usize] {
        &self.targets
    }

    /// Every row index appears in some column.
    pub fn is_full_row_rank(&self) -> bool {
        let mut seen = vec![false; self.rows];
        for &t in &self.targets {
            seen[t] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.targets.len(),
            columns: self.targets.iter().map(|&t| vec![(t, 1.0)]).collect(),
        }
    }

    /// Exact conversion: every column must hold a single entry equal to 1.
    pub fn try_from_sparse(m: &SparseMatrix) -> Result<Self> {
        let mut targets = Vec::with_capacity(m.cols);
        for (j, c) in m.columns.iter().enumerate() {
            match c.as_slice() {
                [(r, v)] if *v == 1.0 => targets.push(*r),
                _ => {
                    return Err(Error::NotLogical(format!(
                        "column {} is not a canonical vector",
                        j + 1
                    )))
                }
            }
        }
        Ok(Self {
            rows: m.rows,
            targets,
        })
    }

    pub fn stp(&self, rhs: &Self) -> Result<Self> {
        Self::try_from_sparse(&self.to_sparse().stp(&rhs.to_sparse())?)
    }

    /// `self ≤ other` in the (0,1)-order.
    pub fn le(&self, other: &ZeroOneMatrix) -> bool {
        self.rows == other.rows()
            && self.cols() == other.cols()
            && self
                .targets
                .iter()
                .enumerate()
                .all(|(j, &t)| other.get(t + 1, j + 1))
    }
}

/// A column-stochastic matrix in sparse column storage.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    inner: SparseMatrix,
}

impl StochasticMatrix {
    /// Validates that entries lie in `[0, 1]` and every column sums to one
    /// within `eps`.
    pub fn new(m: SparseMatrix, eps: f64) -> Result<Self> {
        for (j, c) in m.columns.iter().enumerate() {
            if let Some(&(r, v)) = c.iter().find(|e| !(e.1 >= 0.0 && e.1 <= 1.0 + eps)) {
                return Err(Error::NotStochastic(format!(
                    "entry ({}, {}) = {v} is not a probability",
                    r + 1,
                    j + 1
                )));
            }
            let s: f64 = c.iter().map(|e| e.1).sum();
            if (s - 1.0).abs() > eps {
                return Err(Error::NotStochastic(format!(
                    "column {} sums to {s}",
                    j + 1
                )));
            }
        }
        Ok(Self { inner: m })
    }

    pub(crate) fn from_sparse_unchecked(m: SparseMatrix) -> Self {
        Self { inner: m }
    }

    pub fn from_logical(f: &LogicalMatrix) -> Self {
        Self {
            inner: f.to_sparse(),
        }
    }

    pub fn as_sparse(&self) -> &SparseMatrix {
        &self.inner
    }

    pub fn into_sparse(self) -> SparseMatrix {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.rows
    }

    pub fn cols(&self) -> usize {
        self.inner.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner.get(row, col)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.inner.column(col)
    }

    pub(crate) fn raw_column(&self, col0: usize) -> &[(usize, f64)] {
        self.inner.raw_column(col0)
    }

    /// Number of input blocks when the matrix is read as `N × NM`.
    pub fn input_count(&self) -> Result<usize> {
        let n = self.rows();
        if n == 0 || !self.cols().is_multiple_of(n) {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} matrix is not of the form N x NM",
                n,
                self.cols()
            )));
        }
        Ok(self.cols() / n)
    }

    pub fn stp(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.stp(&rhs.inner)?,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        self.inner.max_abs_diff(&other.inner)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.inner.approx_eq(&other.inner, tol)
    }

    /// Largest deviation of a column sum from one.
    pub fn stochasticity_defect(&self) -> f64 {
        (1..=self.cols())
            .map(|j| (self.inner.column_sum(j) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Concatenates blocks `[B_1 … B_M]` that share the same row count.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, Self::rows);
        if blocks.iter().any(|b| b.rows() != rows) {
            return Err(Error::DimensionMismatch("blocks differ in row count".into()));
        }
        let columns: Vec<_> = blocks
            .iter()
            .flat_map(|b| b.inner.columns.iter().cloned())
            .collect();
        Ok(Self {
            inner: SparseMatrix::from_raw_columns(rows, columns)?,
        })
    }
}

/// `P(u) = P ⋉ u`: the `N × N` block of columns `(u−1)N+1 ..= uN`.
pub fn select_input_block(p: &StochasticMatrix, u: CanonicalIndex) -> Result<StochasticMatrix> {
    let n = p.rows();
    if checked_dim(n, u.dim())? != p.cols() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} columns for N = {n}, M = {}, found {}",
            n * u.dim(),
            u.dim(),
            p.cols()
        )));
    }
    let first = (u.value() - 1) * n + 1;
    Ok(StochasticMatrix {
        inner: p.inner.column_range(first, first + n - 1)?,
    })
}

/// All input blocks `P(δ_M^1), …, P(δ_M^M)`.
pub fn input_blocks(p: &StochasticMatrix) -> Result<Vec<StochasticMatrix>> {
    let m = p.input_count()?;
    (1..=m)
        .map(|u| select_input_block(p, CanonicalIndex::new(u, m)?))
        .collect()
}

/// A (0,1)-matrix stored as a row-major bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeroOneMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl ZeroOneMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set_raw(i, j, true);
            }
        }
        m
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set_raw(i, i, true);
        }
        m
    }

    pub fn from_dense(data: &[Vec<u8>]) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (i, r) in data.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged dense rows".into()));
            }
            for (j, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set_raw(i, j, true),
                    _ => return Err(Error::DimensionMismatch(format!("entry {v} is not 0/1"))),
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.get_raw(row - 1, col - 1)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.set_raw(row - 1, col - 1, value);
    }

    pub(crate) fn get_raw(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn set_raw(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Positions of the ones in 0-based row `i`, ascending.
    pub(crate) fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i).iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + t)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Elementwise AND.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "meet of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            words: self.words,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        })
    }

    /// `self ≤ other` entrywise.
    pub fn le(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_ones(i).collect::<Vec<_>>() {
                t.set_raw(j, i, true);
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_reflexive(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.get_raw(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// A 1-based triple `(i, j, k)` with `(i,j)` and `(j,k)` related but
    /// `(i,k)` not, if any.
    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.rows {
            let ri = self.row_words(i);
            for j in self.row_ones(i) {
                if j >= self.rows {
                    continue;
                }
                let rj = self.row_words(j);
                for (w, (a, b)) in rj.iter().zip(ri).enumerate() {
                    let missing = a & !b;
                    if missing != 0 {
                        let k = w * 64 + missing.trailing_zeros() as usize;
                        return Some((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }
}
