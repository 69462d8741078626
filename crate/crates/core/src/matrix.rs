//! Dense matrices over exact rationals.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{HerdError, Result};
use crate::rational::{format_rational, int, Rational};

/// Row-major dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(HerdError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(HerdError::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    /// Integer-entry convenience constructor.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
            .expect("ragged integer matrix")
    }

    /// A single column built from `values`.
    pub fn column_vector(values: &[Rational]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            entries: values.to_vec(),
        }
    }

    /// `e_index` in dimension `n`, as an `n x 1` matrix.
    pub fn canonical_column(n: usize, index: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.set(index, 0, Rational::one());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(HerdError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(HerdError::DimensionMismatch(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `vᵀ M` as a row vector.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.rows {
            return Err(HerdError::DimensionMismatch(format!(
                "cannot multiply a vector of length {} by {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += vi * a;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Horizontal concatenation `[M_0 | M_1 | ...]`.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Ok(Self::zeros(0, 0));
        };
        let rows = first.rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(HerdError::DimensionMismatch(
                "hstack blocks have different row counts".into(),
            ));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                entries.extend_from_slice(b.row(i));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    /// Contiguous sub-block.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let row_idx: Vec<usize> = rows.collect();
        let col_idx: Vec<usize> = cols.collect();
        self.select(&row_idx, &col_idx)
    }

    /// Sub-matrix picking the listed rows and columns, in the listed order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            entries,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    /// Rows scaled to primitive-free integer form (each row multiplied by
    /// the lcm of its denominators). Row scaling preserves rank and the
    /// pivot structure.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
            })
            .collect()
    }

    /// Column indices of the pivots found by fraction-free (Bareiss)
    /// elimination. These columns form a basis of the column space, and the
    /// lowest-index choice is made at every step.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.integer_rows();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&p| !m[p][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                    m[i][j] = q;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.pivot_columns().len()
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(HerdError::DimensionMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let id = Self::identity(n);
        let mut aug = Self::hstack(&[self.clone(), id])?;
        for c in 0..n {
            let p = (c..n)
                .find(|&p| !aug.get(p, c).is_zero())
                .ok_or_else(|| HerdError::InvalidInput("matrix is singular".into()))?;
            aug.swap_rows(c, p);
            let pivot = aug.get(c, c).clone();
            for j in 0..2 * n {
                let v = aug.get(c, j) / &pivot;
                aug.set(c, j, v);
            }
            for i in 0..n {
                if i == c || aug.get(i, c).is_zero() {
                    continue;
                }
                let factor = aug.get(i, c).clone();
                for j in 0..2 * n {
                    let v = aug.get(i, j) - &factor * aug.get(c, j);
                    aug.set(i, j, v);
                }
            }
        }
        Ok(aug.block(0..n, n..2 * n))
    }

    /// Solves `M x = b` for square nonsingular `M`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        self.inverse()?.mul_vec(b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix{self}")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// Rank by plain rational elimination, independent of the Bareiss path.
    fn naive_rank(m: &RationalMatrix) -> usize {
        let mut rows = m.to_rows();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&p| !rows[p][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            for i in rank + 1..rows.len() {
                let f = &rows[i][c] / &rows[rank][c];
                for j in c..m.cols() {
                    let v = &rows[i][j] - &f * &rows[rank][j];
                    rows[i][j] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
        assert_eq!(RationalMatrix::zeros(2, 5).rank(), 0);
        assert_eq!(RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn rank_with_fractions() {
        let m = RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3), int(0)],
            vec![int(3), int(2), int(0)],
            vec![int(0), int(0), ratio(-7, 5)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.pivot_columns(), vec![0, 2]);
    }

    #[test]
    fn inverse_of_two_by_two() {
        let b = RationalMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        let inv = b.inverse().unwrap();
        let expected = RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(1, 2), ratio(-1, 2)],
        ])
        .unwrap();
        assert_eq!(inv, expected);
        assert_eq!(b.mul(&inv).unwrap(), RationalMatrix::identity(2));
        assert!(RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = RationalMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(HerdError::DimensionMismatch(_))));
        assert!(RationalMatrix::new(2, 2, vec![int(1)]).is_err());
    }

    #[test]
    fn hstack_and_select() {
        let a = RationalMatrix::from_i64(&[&[1], &[2]]);
        let b = RationalMatrix::from_i64(&[&[3, 4], &[5, 6]]);
        let s = RationalMatrix::hstack(&[a, b]).unwrap();
        assert_eq!(s, RationalMatrix::from_i64(&[&[1, 3, 4], &[2, 5, 6]]));
        assert_eq!(s.select(&[1], &[2, 0]), RationalMatrix::from_i64(&[&[6, 2]]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
            (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
                proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |vals| {
                    let entries = vals.into_iter().map(|(p, q)| ratio(p, q)).collect();
                    RationalMatrix::new(r, c, entries).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn rank_is_transpose_invariant(m in small_matrix()) {
                prop_assert_eq!(m.rank(), m.transpose().rank());
            }

            #[test]
            fn bareiss_matches_naive_elimination(m in small_matrix()) {
                prop_assert_eq!(m.rank(), naive_rank(&m));
            }

            #[test]
            fn products_stay_canonical(a in small_matrix()) {
                let p = a.mul(&a.transpose()).unwrap();
                prop_assert!(p.entries().iter().all(crate::rational::is_canonical));
            }
        }
    }
}
