//! Dense rational matrices and exact row reduction.

use crate::error::{Error, Result};
use crate::rational::{WireRational, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Q::one())
    }

    pub fn scalar(n: usize, c: Q) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_wire(rows: &[Vec<WireRational>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|w| w.0.clone()).collect()).collect())
    }

    pub fn to_wire(&self) -> Vec<Vec<WireRational>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().cloned().map(WireRational).collect())
            .collect()
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

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Q::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() {
                    acc += a * &rhs[(k, j)];
                }
            }
            acc
        })
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// `Some(c)` when the matrix equals `c·I`.
    pub fn as_scalar(&self) -> Option<Q> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(Q::zero());
        }
        let c = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { &c } else { &Q::zero() };
                if &self[(i, j)] != expected {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero()).ok_or(Error::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &p;
                inv[(col, j)] /= &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let mut ech = RowEchelon::new(self.cols);
        for i in 0..self.rows {
            ech.insert_dense(self.row(i));
        }
        ech.rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub type SparseRow = BTreeMap<usize, Q>;

/// Reduced row echelon form built one row at a time.
///
/// Rows are sparse; every stored row has a leading 1 and zeros in all other
/// pivot columns, so the null space can be read off directly.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon { cols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn insert_dense(&mut self, row: &[Q]) -> bool {
        let sparse = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        self.insert(sparse)
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        if self.rank() == self.cols {
            return false;
        }
        row.retain(|_, v| !v.is_zero());
        let hits: Vec<usize> = row.keys().filter(|c| self.pivots.contains_key(c)).copied().collect();
        for p in hits {
            let Some(f) = row.get(&p).cloned() else { continue };
            let prow = &self.pivots[&p];
            axpy(&mut row, &-f, prow);
        }
        let Some((&lead, lead_val)) = row.iter().next() else {
            return false;
        };
        let inv = lead_val.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for prow in self.pivots.values_mut() {
            if let Some(f) = prow.get(&lead).cloned() {
                axpy(prow, &-f, &row);
            }
        }
        self.pivots.insert(lead, row);
        true
    }

    /// Basis of `{v : A v = 0}`, one vector per free column, in column order.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !self.pivots.contains_key(c)) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (&p, row) in &self.pivots {
                if let Some(x) = row.get(&free) {
                    v[p] = -x.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

fn axpy(target: &mut SparseRow, f: &Q, src: &SparseRow) {
    for (j, v) in src {
        let e = target.entry(*j).or_insert_with(Q::zero);
        *e += f * v;
        if e.is_zero() {
            target.remove(j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(4));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
        assert_eq!(m(&[&[2, 0], &[0, 4]]).inverse().unwrap()[(1, 1)], q(1, 4));
    }

    #[test]
    fn nullspace_of_rank_deficient_system() {
        // x + y + z = 0, 2x + 2y + 2z = 0, y - z = 0
        let a = m(&[&[1, 1, 1], &[2, 2, 2], &[0, 1, -1]]);
        let mut ech = RowEchelon::new(3);
        for i in 0..3 {
            ech.insert_dense(a.row(i));
        }
        assert_eq!(ech.rank(), 2);
        let ns = ech.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(a.apply(&ns[0]), vec![qi(0); 3]);
        assert_eq!(ns[0], vec![qi(-2), qi(1), qi(1)]);
    }

    #[test]
    fn scalar_detection() {
        assert_eq!(Matrix::scalar(3, q(-1, 2)).as_scalar(), Some(q(-1, 2)));
        assert_eq!(m(&[&[1, 1], &[0, 1]]).as_scalar(), None);
        assert!(m(&[&[1, 2], &[2, 1]]).is_symmetric());
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
    }
}
