//! Dense complex vectors and matrices.
//!
//! Only what the Bell pipeline needs: Kronecker products, conjugate
//! transposes, traces, outer products and plain products. Storage is
//! row-major `Vec<Complex64>`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used for double-precision structural checks.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn from_vec(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self { entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { entries: self.entries.iter().map(|z| z * s).collect() }
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexVector) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            out.extend(other.entries.iter().map(|b| a * b));
        }
        Self { entries: out }
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<_> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::from_row_major(r, c, entries.collect())
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &ComplexVector) -> Complex64 {
        debug_assert!(self.is_square() && self.rows == v.dim());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let row: Complex64 = self.row(i).iter().zip(v.entries()).map(|(m, x)| m * x).sum();
            acc += v[i].conj() * row;
        }
        acc
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::Dimension(format!("{}x{} matrix times {}-vector", self.rows, self.cols, v.dim())));
        }
        let out = (0..self.rows).map(|i| self.row(i).iter().zip(v.entries()).map(|(m, x)| m * x).sum()).collect();
        Ok(ComplexVector::from_vec(out))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Kronecker product: `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * rb, a.cols * cb);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

pub fn trace(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("trace of a {}x{} matrix", m.rows, m.cols)));
    }
    Ok((0..m.rows).map(|i| m[(i, i)]).sum())
}

/// `|v⟩⟨w|`.
pub fn outer(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(v.dim(), w.dim());
    for i in 0..v.dim() {
        for j in 0..w.dim() {
            out[(i, j)] = v[i] * w[j].conj();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_swap_permutes_basis_pairs() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let m = kron(&x, &ComplexMatrix::identity(2));
        // |a b⟩ -> |(1-a) b⟩
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn kron_of_diagonal_filters() {
        let fa = ComplexMatrix::from_real_diagonal(&[0.5, 1.0]);
        let fb = ComplexMatrix::from_real_diagonal(&[0.25, 1.0]);
        let expected = ComplexMatrix::from_real_diagonal(&[0.125, 0.5, 0.25, 1.0]);
        assert!(kron(&fa, &fb).approx_eq(&expected, TOL));
    }

    #[test]
    fn dagger_conjugates_and_transposes() {
        let m = ComplexMatrix::from_diagonal(&[c(0.0, 1.0), c(1.0, 0.0)]);
        assert_eq!(dagger(&m), ComplexMatrix::from_diagonal(&[c(0.0, -1.0), c(1.0, 0.0)]));
        assert_eq!(dagger(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));

        let r = ComplexMatrix::from_row_major(2, 3, (0..6).map(|k| c(k as f64, -(k as f64) * 0.5)).collect()).unwrap();
        let rd = dagger(&r);
        assert_eq!((rd.rows(), rd.cols()), (3, 2));
        assert_eq!(rd[(2, 1)], r[(1, 2)].conj());
        assert_eq!(dagger(&rd), r);
    }

    #[test]
    fn trace_rejects_non_square() {
        assert_eq!(trace(&ComplexMatrix::identity(5)).unwrap(), c(5.0, 0.0));
        assert!(matches!(trace(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn outer_of_bell_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexVector::from_real(&[h, 0.0, 0.0, h]);
        let p = outer(&psi, &psi);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((p[(i, j)] - c(0.5, 0.0)).norm() < TOL);
        }
        assert!((trace(&p).unwrap() - c(1.0, 0.0)).norm() < TOL);
        assert_eq!(p[(1, 1)], c(0.0, 0.0));

        let e0 = ComplexVector::basis(3, 0);
        assert_eq!(outer(&e0, &e0), ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn matmul_shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&ComplexMatrix::zeros(2, 2)).is_err());
        assert!(a.matvec(&ComplexVector::zeros(2)).is_err());
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn expectation_matches_matvec() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(3.0, 0.0)]).unwrap();
        let v = ComplexVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.7)]);
        let direct = v.inner(&m.matvec(&v).unwrap());
        assert!((m.expectation(&v) - direct).norm() < TOL);
    }
}
