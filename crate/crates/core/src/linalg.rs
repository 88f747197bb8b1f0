//! Dense matrices over a generic scalar, exact symmetric signatures,
//! null spaces and Smith normal form.

use std::fmt;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<T>], height: usize) -> Self {
        let mut m = Self::zeros(height, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), height);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().zip(other.data.iter().cloned()).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map<U: Clone + Num>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() })
            })
    }

    /// Block matrix `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                m[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Matrix<T> {
    /// Basis of the right null space `{v : self * v = 0}` via reduced row echelon form.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_negligible()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = T::one() / m[(row, col)].clone();
            for c in 0..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_negligible() {
                    let f = m[(r, col)].clone();
                    for c in 0..m.cols {
                        let v = m[(row, c)].clone() * f.clone();
                        m[(r, c)] = m[(r, c)].clone() - v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); m.cols];
                v[f] = T::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.hstack(&Self::identity(n));
        for col in 0..n {
            let p = (col..n).find(|&r| !m[(r, col)].is_negligible())?;
            m.swap_rows(col, p);
            let inv = T::one() / m[(col, col)].clone();
            for c in 0..2 * n {
                m[(col, c)] = m[(col, c)].clone() * inv.clone();
            }
            for r in 0..n {
                if r != col && !m[(r, col)].is_negligible() {
                    let f = m[(r, col)].clone();
                    for c in 0..2 * n {
                        let v = m[(col, c)].clone() * f.clone();
                        m[(r, c)] = m[(r, c)].clone() - v;
                    }
                }
            }
        }
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = m[(r, n + c)].clone();
            }
        }
        Some(out)
    }

    /// Signature (positive minus negative inertia) of a symmetric matrix,
    /// computed by symmetric congruence elimination with pivoting.
    pub fn symmetric_signature(&self) -> i64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut sig = 0i64;
        for k in 0..n {
            if m[(k, k)].is_negligible() {
                if let Some(p) = (k + 1..n).find(|&i| !m[(i, i)].is_negligible()) {
                    m.swap_rows(k, p);
                    m.swap_cols(k, p);
                } else if let Some(j) = (k + 1..n).find(|&j| !m[(k, j)].is_negligible()) {
                    // row_k += row_j, col_k += col_j makes the pivot 2 m[k][j] (+ m[j][j] = 0)
                    for c in 0..n {
                        let v = m[(j, c)].clone();
                        m[(k, c)] = m[(k, c)].clone() + v;
                    }
                    for r in 0..n {
                        let v = m[(r, j)].clone();
                        m[(r, k)] = m[(r, k)].clone() + v;
                    }
                } else if let Some((i, j)) = (k + 1..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[(i, j)].is_negligible())
                {
                    // all of row k vanishes; move a nonzero off-diagonal block up
                    m.swap_rows(k, i);
                    m.swap_cols(k, i);
                    let _ = j;
                    for c in 0..n {
                        let v = m[(j, c)].clone();
                        m[(k, c)] = m[(k, c)].clone() + v;
                    }
                    for r in 0..n {
                        let v = m[(r, j)].clone();
                        m[(r, k)] = m[(r, k)].clone() + v;
                    }
                } else {
                    break;
                }
            }
            let pivot = m[(k, k)].clone();
            if pivot.is_negligible() {
                continue;
            }
            sig += if pivot.is_positive() { 1 } else { -1 };
            for i in k + 1..n {
                if m[(i, k)].is_negligible() {
                    continue;
                }
                let f = m[(i, k)].clone() / pivot.clone();
                for c in k..n {
                    let v = m[(k, c)].clone() * f.clone();
                    m[(i, c)] = m[(i, c)].clone() - v;
                }
                for r in k..n {
                    let v = m[(r, k)].clone() * f.clone();
                    m[(r, i)] = m[(r, i)].clone() - v;
                }
            }
        }
        sig
    }
}

impl<T> Matrix<T> {
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

/// Invariant factors of `Z^rows / column span`, in the convention used by
/// reports: nontrivial torsion orders ascending, then one `0` per free summand.
pub fn cokernel_invariants(m: &Matrix<i64>) -> Vec<i64> {
    let diag = smith_diagonal(m);
    let mut torsion: Vec<i64> = diag.iter().copied().filter(|&d| d > 1).collect();
    torsion.sort_unstable();
    let free = m.rows() - diag.len();
    torsion.extend(std::iter::repeat(0).take(free));
    torsion
}

/// Nonzero diagonal entries of the Smith normal form, each dividing the next.
pub fn smith_diagonal(m: &Matrix<i64>) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = (0..m.rows()).map(|r| m.row(r).iter().map(|&x| x as i128).collect()).collect();
    let rows = m.rows();
    let cols = m.cols();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| a[r][c] != 0)
            .min_by_key(|&(r, c)| a[r][c].abs())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                let q = a[r][t].div_euclid(a[t][t]);
                if q != 0 {
                    for c in t..cols {
                        a[r][c] -= q * a[t][c];
                    }
                }
                if a[r][t] != 0 {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                let q = a[t][c].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[c] -= q * row[t];
                    }
                }
                if a[t][c] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the remaining block by the pivot
                let bad = (t + 1..rows)
                    .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                    .find(|&(r, c)| a[r][c] % a[t][t] != 0);
                match bad {
                    None => break,
                    Some((r, _)) => {
                        for c in t..cols {
                            let v = a[r][c];
                            a[t][c] += v;
                        }
                        continue;
                    }
                }
            }
            // bring the smallest remaining entry of row/column t into the pivot
            let mut best = (t, t);
            for r in t..rows {
                if a[r][t] != 0 && a[r][t].abs() < a[best.0][best.1].abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                if a[t][c] != 0 && a[t][c].abs() < a[best.0][best.1].abs() {
                    best = (t, c);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs() as i64);
        t += 1;
    }
    diag
}

/// Integer determinant of a small matrix by fraction-free elimination.
pub fn det_i64(m: &Matrix<i64>) -> i64 {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a: Vec<Vec<i128>> = (0..n).map(|r| m.row(r).iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_zero_vec<T: num_traits::Zero>(v: &[T]) -> bool {
        v.iter().all(num_traits::Zero::is_zero)
    }
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    #[test]
    fn signature_of_hyperbolic_plane_is_zero() {
        let m: Matrix<Q> = Matrix::from_rows(vec![vec![Q::from(0), Q::from(1)], vec![Q::from(1), Q::from(0)]]);
        assert_eq!(m.symmetric_signature(), 0);
    }

    #[test]
    fn signature_of_zero_diagonal_block_matrix() {
        let z = Q::from(0);
        let o = Q::from(1);
        let m = Matrix::from_rows(vec![
            vec![z, z, o],
            vec![z, z, z],
            vec![o, z, z],
        ]);
        assert_eq!(m.symmetric_signature(), 0);
        let f = Matrix::from_rows(vec![vec![-2.0, 0.0], vec![0.0, -3.0]]);
        assert_eq!(f.symmetric_signature(), -2);
    }

    #[test]
    fn smith_of_known_matrix() {
        let m = Matrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(smith_diagonal(&m), vec![2, 6, 12]);
    }

    #[test]
    fn cokernel_counts_free_rank() {
        let m = Matrix::from_rows(vec![vec![2], vec![0], vec![0]]);
        assert_eq!(cokernel_invariants(&m), vec![2, 0, 0]);
    }

    #[test]
    fn nullspace_dimension() {
        let m: Matrix<Q> = Matrix::from_rows(vec![vec![Q::from(1), Q::from(2), Q::from(3)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(is_zero_vec(&m.mul_vec(&v)));
        }
    }

    #[test]
    fn determinant_small() {
        let m = Matrix::from_rows(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(det_i64(&m), 1);
    }
}
