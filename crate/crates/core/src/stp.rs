//! Exact matrix kernel: logical matrices in delta form, shared-denominator
//! rational matrices, the semi-tensor product, Kronecker products and swap
//! matrices.
//!
//! A logical matrix `δ_m[i_1, …, i_r]` is stored as the list of its column
//! positions. Positions are 0-based in memory; every constructor and accessor
//! that talks in the δ notation ([`LogicalMatrix::new`], [`LogicalMatrix::delta`],
//! `Display`) is 1-based.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StpError {
    #[error("delta index {index} out of range 1..={rows}")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("matrix must have at least one row")]
    EmptyRows,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected {expected} entries, got {actual}")]
    WrongEntryCount { expected: usize, actual: usize },
    #[error("denominator must be positive, got {0}")]
    BadDenominator(i64),
    #[error("matrix is not a permutation")]
    NotPermutation,
    #[error("state index {index} out of range 1..={max}")]
    StateIndexOutOfRange { index: usize, max: usize },
}

/// A 0/1 matrix with exactly one 1 per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalMatrix {
    rows: usize,
    delta: Vec<usize>,
}

impl LogicalMatrix {
    /// Builds `δ_rows[delta…]` from 1-based row indices.
    pub fn new(rows: usize, delta: &[usize]) -> Result<Self, StpError> {
        if rows == 0 {
            return Err(StpError::EmptyRows);
        }
        let mut zero = Vec::with_capacity(delta.len());
        for &d in delta {
            if d == 0 || d > rows {
                return Err(StpError::IndexOutOfRange { index: d, rows });
            }
            zero.push(d - 1);
        }
        Ok(Self { rows, delta: zero })
    }

    /// Builds a logical matrix from 0-based row indices.
    pub fn from_indices(rows: usize, indices: Vec<usize>) -> Result<Self, StpError> {
        if rows == 0 {
            return Err(StpError::EmptyRows);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= rows) {
            return Err(StpError::IndexOutOfRange {
                index: bad + 1,
                rows,
            });
        }
        Ok(Self {
            rows,
            delta: indices,
        })
    }

    pub(crate) fn from_indices_unchecked(rows: usize, indices: Vec<usize>) -> Self {
        debug_assert!(rows > 0 && indices.iter().all(|&i| i < rows));
        Self {
            rows,
            delta: indices,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_indices_unchecked(n.max(1), (0..n).collect())
    }

    /// The column vector `δ_rows^i` (1-based `i`).
    pub fn basis(rows: usize, i: usize) -> Result<Self, StpError> {
        Self::new(rows, &[i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.delta.len()
    }

    /// 0-based row of the 1 in 0-based column `col`.
    #[inline]
    pub fn index(&self, col: usize) -> usize {
        self.delta[col]
    }

    /// 0-based row indices, one per column.
    pub fn indices(&self) -> &[usize] {
        &self.delta
    }

    /// 1-based delta list, as written in `δ_m[…]`.
    pub fn delta(&self) -> Vec<usize> {
        self.delta.iter().map(|d| d + 1).collect()
    }

    pub fn to_dense(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, self.cols());
        for (c, &r) in self.delta.iter().enumerate() {
            m.numerators[r * m.cols + c] = 1;
        }
        m
    }

    /// Ordinary product `self · rhs`; requires `cols(self) == rows(rhs)`.
    pub fn compose(&self, rhs: &LogicalMatrix) -> Result<LogicalMatrix, StpError> {
        if self.cols() != rhs.rows {
            return Err(StpError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                rhs.rows,
                rhs.cols()
            )));
        }
        Ok(Self::from_indices_unchecked(
            self.rows,
            rhs.delta.iter().map(|&k| self.delta[k]).collect(),
        ))
    }

    /// Left semi-tensor product computed on the delta form.
    ///
    /// With `α = lcm(cols(A), rows(B))`, column `c` of `B ⊗ I_{α/p}` has its 1 in
    /// row `b[c / (α/p)]·(α/p) + c mod (α/p)`, and that row selects a column of
    /// `A ⊗ I_{α/n}` in the same way.
    pub fn stp(&self, rhs: &LogicalMatrix) -> LogicalMatrix {
        let n = self.cols();
        let p = rhs.rows;
        let alpha = n.lcm(&p);
        let fa = alpha / n;
        let fb = alpha / p;
        let rows = self.rows * fa;
        let cols = rhs.cols() * fb;
        let delta = (0..cols)
            .map(|c| {
                let mid = rhs.delta[c / fb] * fb + c % fb;
                self.delta[mid / fa] * fa + mid % fa
            })
            .collect();
        Self::from_indices_unchecked(rows, delta)
    }

    pub fn kron(&self, rhs: &LogicalMatrix) -> LogicalMatrix {
        let q = rhs.cols();
        let p = rhs.rows;
        let mut delta = Vec::with_capacity(self.cols() * q);
        for &a in &self.delta {
            for &b in &rhs.delta {
                delta.push(a * p + b);
            }
        }
        Self::from_indices_unchecked(self.rows * p, delta)
    }

    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols() {
            return false;
        }
        let mut seen = vec![false; self.rows];
        for &d in &self.delta {
            if std::mem::replace(&mut seen[d], true) {
                return false;
            }
        }
        true
    }

    /// Transpose of a permutation matrix (its inverse).
    pub fn transpose_permutation(&self) -> Result<LogicalMatrix, StpError> {
        if !self.is_permutation() {
            return Err(StpError::NotPermutation);
        }
        let mut inv = vec![0; self.rows];
        for (c, &r) in self.delta.iter().enumerate() {
            inv[r] = c;
        }
        Ok(Self::from_indices_unchecked(self.rows, inv))
    }

    /// Splits the columns into `count` equal consecutive blocks.
    pub fn split_columns(&self, count: usize) -> Result<Vec<LogicalMatrix>, StpError> {
        if count == 0 || !self.cols().is_multiple_of(count) {
            return Err(StpError::DimensionMismatch(format!(
                "{} columns do not split into {count} blocks",
                self.cols()
            )));
        }
        let width = self.cols() / count;
        Ok(self
            .delta
            .chunks(width)
            .map(|c| Self::from_indices_unchecked(self.rows, c.to_vec()))
            .collect())
    }

    /// Horizontal concatenation `[A_1, A_2, …]`.
    pub fn hcat(blocks: &[LogicalMatrix]) -> Result<LogicalMatrix, StpError> {
        let rows = blocks
            .first()
            .map(|b| b.rows)
            .ok_or_else(|| StpError::DimensionMismatch("no blocks".into()))?;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(StpError::DimensionMismatch(
                "blocks have different row counts".into(),
            ));
        }
        let delta = blocks
            .iter()
            .flat_map(|b| b.delta.iter().copied())
            .collect();
        Ok(Self::from_indices_unchecked(rows, delta))
    }
}

impl fmt::Display for LogicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ_{}[", self.rows)?;
        for (i, d) in self.delta.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", d + 1)?;
        }
        f.write_str("]")
    }
}

/// The swap matrix `W_[m,n] = [I_n ⊗ δ_m^1, …, I_n ⊗ δ_m^m]`.
pub fn swap_matrix(m: usize, n: usize) -> LogicalMatrix {
    let mut delta = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            delta.push(j * m + i);
        }
    }
    LogicalMatrix::from_indices_unchecked((m * n).max(1), delta)
}

/// Dense matrix of integers over a single positive denominator.
#[derive(Debug, Clone, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    numerators: Vec<i64>,
    denominator: i64,
}

impl RationalMatrix {
    /// `numerators` is row-major.
    pub fn new(
        rows: usize,
        cols: usize,
        numerators: Vec<i64>,
        denominator: i64,
    ) -> Result<Self, StpError> {
        if denominator < 1 {
            return Err(StpError::BadDenominator(denominator));
        }
        if numerators.len() != rows * cols {
            return Err(StpError::WrongEntryCount {
                expected: rows * cols,
                actual: numerators.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            numerators,
            denominator,
        })
    }

    pub fn from_integers(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self, StpError> {
        Self::new(rows, cols, entries, 1)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            numerators: vec![0; rows * cols],
            denominator: 1,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.numerators[i * n + i] = 1;
        }
        m
    }

    /// The row vector `1_n^T`.
    pub fn ones_row(n: usize) -> Self {
        Self {
            rows: 1,
            cols: n,
            numerators: vec![1; n],
            denominator: 1,
        }
    }

    /// The column vector `1_n`.
    pub fn ones_col(n: usize) -> Self {
        Self {
            rows: n,
            cols: 1,
            numerators: vec![1; n],
            denominator: 1,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn numerator(&self, r: usize, c: usize) -> i64 {
        self.numerators[r * self.cols + c]
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        t.denominator = self.denominator;
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.numerators[c * self.rows + r] = self.numerator(r, c);
            }
        }
        t
    }

    /// Ordinary product; requires `cols(self) == rows(rhs)`.
    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self, StpError> {
        if self.cols != rhs.rows {
            return Err(StpError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.numerator(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.numerators[r * rhs.cols + c] += a * rhs.numerator(k, c);
                }
            }
        }
        out.denominator = self.denominator * rhs.denominator;
        Ok(out.reduced())
    }

    pub fn kron(&self, rhs: &RationalMatrix) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self.numerator(ar, ac);
                if a == 0 {
                    continue;
                }
                for br in 0..rhs.rows {
                    for bc in 0..rhs.cols {
                        out.numerators[(ar * rhs.rows + br) * cols + ac * rhs.cols + bc] =
                            a * rhs.numerator(br, bc);
                    }
                }
            }
        }
        out.denominator = self.denominator * rhs.denominator;
        out.reduced()
    }

    /// `(A ⊗ I_{α/n})(B ⊗ I_{α/p})` with `α = lcm(n, p)`.
    pub fn stp(&self, rhs: &RationalMatrix) -> Self {
        let alpha = self.cols.lcm(&rhs.rows);
        let left = self.kron(&Self::identity(alpha / self.cols));
        let right = rhs.kron(&Self::identity(alpha / rhs.rows));
        left.mul(&right).expect("lcm padding aligns dimensions")
    }

    /// Divides every entry by `k > 0`.
    pub fn div_scalar(&self, k: i64) -> Result<Self, StpError> {
        if k < 1 {
            return Err(StpError::BadDenominator(k));
        }
        let mut out = self.clone();
        out.denominator *= k;
        Ok(out.reduced())
    }

    /// Lowest-terms form: shared factor of all numerators and the denominator removed.
    pub fn reduced(mut self) -> Self {
        let g = self
            .numerators
            .iter()
            .fold(self.denominator, |g, &x| g.gcd(&x));
        if g > 1 {
            for x in &mut self.numerators {
                *x /= g;
            }
            self.denominator /= g;
        }
        self
    }

    /// True iff every entry is an integer and the integer matrix has exactly one 1
    /// per column and 0 elsewhere.
    pub fn is_logical(&self) -> bool {
        self.to_logical().is_some()
    }

    pub fn to_logical(&self) -> Option<LogicalMatrix> {
        if self.rows == 0 {
            return None;
        }
        let mut delta = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            let mut hit = None;
            for r in 0..self.rows {
                let x = self.numerator(r, c);
                if x == 0 {
                    continue;
                }
                if x != self.denominator || hit.is_some() {
                    return None;
                }
                hit = Some(r);
            }
            delta.push(hit?);
        }
        Some(LogicalMatrix::from_indices_unchecked(self.rows, delta))
    }
}

impl PartialEq for RationalMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .numerators
                .iter()
                .zip(&other.numerators)
                .all(|(&a, &b)| a * other.denominator == b * self.denominator)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator != 1 {
            write!(f, "1/{}·", self.denominator)?;
        }
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.numerator(r, c))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// An assignment of truth values to `n` ordered Boolean variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector(pub Vec<bool>);

impl StateVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

/// Packs `x_1 ⋉ … ⋉ x_n` with True ↦ δ_2^1, False ↦ δ_2^2; returns the 1-based
/// index `1 + Σ (1 − b_i)·2^{n−i}`.
pub fn state_to_index(sv: &StateVector) -> usize {
    sv.0.iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(!b))
        + 1
}

/// Inverse of [`state_to_index`].
pub fn index_to_state(k: usize, n: usize) -> Result<StateVector, StpError> {
    let max = 1usize << n;
    if k == 0 || k > max {
        return Err(StpError::StateIndexOutOfRange { index: k, max });
    }
    let z = k - 1;
    Ok(StateVector(
        (0..n).map(|i| (z >> (n - 1 - i)) & 1 == 0).collect(),
    ))
}

/// Truth value of variable `i` (0-based, declaration order) in the packed
/// 0-based index `z` of an `n`-variable state.
#[inline]
pub(crate) fn bit_of(z: usize, n: usize, i: usize) -> bool {
    (z >> (n - 1 - i)) & 1 == 0
}
