//! Exact dense and sparse matrices over `Scalar`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j { e.is_one() } else { e.is_zero() }
                })
            })
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Kronecker product, `(A ⊗ B)[(i,k),(j,l)] = A[i,j] B[k,l]` with row-major pair flattening.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = &rhs[(k, l)];
                        if !b.is_zero() {
                            out[(i * rhs.rows + k, j * rhs.cols + l)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let rows: Vec<SparseVec> = (0..self.rows).map(|i| SparseVec::from_dense(self.row(i))).collect();
        let (ech, pivots) = rref_sparse(rows);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for (i, r) in ech.iter().enumerate() {
            for (j, v) in r.iter() {
                out[(i, *j)] = v.clone();
            }
        }
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    pub fn swap(&mut self, a: (usize, usize), b: (usize, usize)) {
        let (ia, ib) = (a.0 * self.cols + a.1, b.0 * self.cols + b.1);
        self.data.swap(ia, ib);
    }

    /// First entry where `self` and `other` differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize, Scalar)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = &self[(i, j)] - &other[(i, j)];
                if !d.is_zero() {
                    return Some((i, j, d));
                }
            }
        }
        None
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Sparse vector: column index -> nonzero entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec(BTreeMap<usize, Scalar>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = SparseVec::new();
        v.0.insert(i, Scalar::one());
        v
    }

    pub fn from_dense(row: &[Scalar]) -> Self {
        SparseVec(row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.0.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Scalar)> {
        self.0.iter()
    }

    pub fn first(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().next().map(|(i, v)| (*i, v))
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Scalar, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, v) in other.iter() {
            self.add_term(*i, &(c * v));
        }
    }

    pub fn scale(&mut self, c: &Scalar) {
        for v in self.0.values_mut() {
            *v *= c;
        }
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, v) in self.iter() {
            if let Some(w) = other.get(*i) {
                acc += &(v * w);
            }
        }
        acc
    }
}

/// Reduced row echelon form of sparse rows: returns nonzero rows sorted by pivot, and the pivots.
pub fn rref_sparse(rows: Vec<SparseVec>) -> (Vec<SparseVec>, Vec<usize>) {
    let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for mut row in rows {
        eliminate(&mut row, &pivots);
        let Some((p, lead)) = row.first() else { continue };
        let inv = lead.inv().expect("nonzero pivot");
        row.scale(&inv);
        for other in pivots.values_mut() {
            if let Some(c) = other.get(p).cloned() {
                other.axpy(&-&c, &row);
            }
        }
        pivots.insert(p, row);
    }
    let pivot_cols = pivots.keys().copied().collect();
    (pivots.into_values().collect(), pivot_cols)
}

fn eliminate(row: &mut SparseVec, pivots: &BTreeMap<usize, SparseVec>) {
    // Pivot rows are fully reduced, so one pass over the pivot columns suffices.
    let hits: Vec<usize> = row.iter().map(|(i, _)| *i).filter(|i| pivots.contains_key(i)).collect();
    for p in hits {
        if let Some(c) = row.get(p).cloned() {
            row.axpy(&-&c, &pivots[&p]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_inverse() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(), 1);
        assert!(a.inverse().is_err());
        let b = m(&[&[2, 1], &[1, 1]]);
        let bi = b.inverse().unwrap();
        assert!(b.mul(&bi).is_identity());
    }

    #[test]
    fn rref_is_reduced() {
        let a = m(&[&[0, 1, 1], &[1, 1, 0], &[1, 2, 1]]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, m(&[&[1, 0, -1], &[0, 1, 1], &[0, 0, 0]]));
    }

    #[test]
    fn kron_shape() {
        let a = m(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&Matrix::identity(2));
        assert_eq!(k[(0, 2)], Scalar::one());
        assert_eq!(k[(1, 3)], Scalar::one());
        assert_eq!(k.rank(), 4);
    }
}
