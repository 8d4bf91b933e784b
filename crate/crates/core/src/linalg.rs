//! Exact integer and rational matrices.
//!
//! Everything here works over unbounded integers. Determinants use
//! fraction-free (Bareiss) elimination, inverses are computed over the
//! rationals, and the Smith normal form carries its unimodular transforms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left_cols} columns against {right_rows} rows")]
    Dimension { left_cols: usize, right_rows: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric (entry ({row}, {col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows<T, R>(rows: R) -> Result<Self, LinalgError>
    where
        T: Into<BigInt>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
    {
        let rows: Vec<Vec<BigInt>> = rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(LinalgError::Ragged { row: i, expected: n_cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: n_rows, cols: n_cols, data })
    }

    /// Builds a matrix from a closure. Panics if either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
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

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        &self.data[row * self.cols + col]
    }

    fn get_mut(&mut self, row: usize, col: usize) -> &mut BigInt {
        &mut self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Submatrix on the given row and column index lists (in the order given).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension { left_cols: self.cols, right_rows: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect().is_none()
    }

    fn symmetry_defect(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let delta = factor * self.get(source, j);
            *self.get_mut(target, j) += delta;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let delta = factor * self.get(i, source);
            *self.get_mut(i, target) += delta;
        }
    }

    fn negate_row(&mut self, row: usize) {
        for j in 0..self.cols {
            let v = self.get_mut(row, j);
            *v = -std::mem::take(v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows<T, R>(rows: R) -> Result<Self, LinalgError>
    where
        T: Into<Rational>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
    {
        let rows: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(LinalgError::Ragged { row: i, expected: n_cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: n_rows, cols: n_cols, data })
    }

    /// Integer entries; convenience for tests and examples.
    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect::<Vec<_>>()),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        &self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension { left_cols: self.cols, right_rows: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        }))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    /// Exact determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            let pivot = a[k][k].clone();
            det *= &pivot;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = &a[i][k] / &pivot;
                #[allow(clippy::needless_range_loop)]
                for j in k..n {
                    let delta = &factor * &a[k][j];
                    a[i][j] -= delta;
                }
            }
        }
        Ok(det)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect::<Vec<_>>()))
            .finish()
    }
}

/// Exact determinant by fraction-free elimination with row pivoting.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                *a.get_mut(i, j) = v;
            }
            *a.get_mut(i, k) = BigInt::zero();
        }
        prev = pivot;
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Leading principal minors `D_1, …, D_n` of a square matrix.
///
/// Bareiss elimination without pivoting produces them as its successive
/// pivots; once a zero pivot appears the remaining minors are computed
/// directly.
pub fn leading_principal_minors(m: &IntMatrix) -> Result<Vec<BigInt>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if pivot.is_zero() {
            minors.push(BigInt::zero());
            for size in k + 2..=n {
                let idx: Vec<usize> = (0..size).collect();
                minors.push(determinant(&m.select(&idx, &idx))?);
            }
            return Ok(minors);
        }
        minors.push(pivot.clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                *a.get_mut(i, j) = v;
            }
        }
        prev = pivot;
    }
    Ok(minors)
}

/// Sylvester's criterion applied to `-m`: true iff every leading principal
/// minor of `-m` is positive.
pub fn is_negative_definite(m: &IntMatrix) -> Result<bool, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if let Some((row, col)) = m.symmetry_defect() {
        return Err(LinalgError::NotSymmetric { row, col });
    }
    let neg = m.neg();
    let n = neg.rows;
    let mut a = neg;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if !pivot.is_positive() {
            return Ok(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                *a.get_mut(i, j) = v;
            }
        }
        prev = pivot;
    }
    Ok(true)
}

/// Exact inverse over the rationals (Gauss–Jordan).
pub fn inverse(m: &IntMatrix) -> Result<RationalMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<Rational>> =
        (0..n).map(|i| m.row(i).iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(p, k);
        inv.swap(p, k);
        let pivot = a[k][k].clone();
        for j in 0..n {
            a[k][j] /= &pivot;
            inv[k][j] /= &pivot;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone();
            for j in 0..n {
                let da = &factor * &a[k][j];
                a[i][j] -= da;
                let di = &factor * &inv[k][j];
                inv[i][j] -= di;
            }
        }
    }
    Ok(RationalMatrix::from_fn(n, n, |i, j| inv[i][j].clone()))
}

/// Fraction-free Gauss–Jordan solve of `m · X = b` for nonsingular `m`.
///
/// Returns `(δ, Y)` with `X = Y / δ` exactly; `δ = ±det(m)` and `Y` is integral.
pub fn solve_scaled(m: &IntMatrix, b: &IntMatrix) -> Result<(BigInt, IntMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if b.rows != m.rows {
        return Err(LinalgError::Dimension { left_cols: m.cols, right_rows: b.rows });
    }
    let n = m.rows;
    let width = n + b.cols;
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).iter().chain(b.row(i)).cloned().collect()).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(p, k);
        let (before, rest) = a.split_at_mut(k);
        let (pivot_row, after) = rest.split_first_mut().expect("row k");
        let pivot = pivot_row[k].clone();
        for row in before.iter_mut().chain(after.iter_mut()) {
            let factor = std::mem::take(&mut row[k]);
            for j in 0..width {
                if j == k {
                    continue;
                }
                row[j] = (&row[j] * &pivot - &factor * &pivot_row[j]) / &prev;
            }
        }
        prev = pivot;
    }
    let y = IntMatrix::from_fn(n, b.cols, |i, j| a[i][n + j].clone());
    Ok((prev, y))
}

/// Smith normal form together with the transforms that produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    /// Diagonal entries `d_1 | d_2 | …`, nonnegative, length `min(rows, cols)`.
    pub invariant_factors: Vec<BigInt>,
    /// Unimodular `U` with `U · m · V` diagonal.
    pub left_transform: IntMatrix,
    /// Unimodular `V` with `U · m · V` diagonal.
    pub right_transform: IntMatrix,
}

impl SmithDecomposition {
    /// Factors greater than one: the cyclic orders of the torsion of the cokernel.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((p, q)) = best else {
                return finish(s, u, v);
            };
            s.swap_rows(t, p);
            u.swap_rows(t, p);
            s.swap_cols(t, q);
            v.swap_cols(t, q);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let quot = -(s.get(i, t) / &pivot);
                if !quot.is_zero() {
                    s.add_row_multiple(i, t, &quot);
                    u.add_row_multiple(i, t, &quot);
                }
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let quot = -(s.get(t, j) / &pivot);
                if !quot.is_zero() {
                    s.add_col_multiple(j, t, &quot);
                    v.add_col_multiple(j, t, &quot);
                }
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(s, u, v)
}

fn finish(s: IntMatrix, u: IntMatrix, v: IntMatrix) -> SmithDecomposition {
    let invariant_factors = (0..s.rows.min(s.cols)).map(|i| s.get(i, i).abs()).collect();
    SmithDecomposition { invariant_factors, left_transform: u, right_transform: v }
}
