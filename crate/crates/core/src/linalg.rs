//! Dense matrices, Cholesky factorisation and a symmetric eigensolver.
//!
//! Everything here is generic over [`Scalar`] and sized for the dense,
//! exact computations the rest of the crate needs (a few thousand rows at
//! most). Storage is row-major.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reciprocal condition number below which a factorisation is rejected.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in matvec");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix whose symmetry is exact: every constructor writes the
/// upper triangle and mirrors it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T>(DenseMatrix<T>);

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self(DenseMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DenseMatrix::identity(n))
    }

    /// Builds from `f(i, j)` evaluated for `i <= j` only.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        Self(m)
    }

    /// Symmetrises an arbitrary square matrix by copying its upper triangle.
    pub fn from_dense_upper(m: &DenseMatrix<T>) -> Self {
        assert_eq!(m.rows(), m.cols(), "matrix must be square");
        Self::from_upper(m.rows(), |i, j| m[(i, j)])
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[(i, j)]
    }

    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.0
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.0.row(i)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        self.0.matvec(x)
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }

    pub fn trace(&self) -> T {
        (0..self.order()).map(|i| self.get(i, i)).sum()
    }

    /// Product of two symmetric matrices, symmetrised from the upper triangle.
    /// Exact when the factors commute (e.g. `A * A`).
    pub fn sym_product(&self, other: &Self) -> Self {
        let n = self.order();
        assert_eq!(n, other.order());
        // rows of `other` are its columns
        Self::from_upper(n, |i, j| dot(self.row(i), other.row(j)))
    }

    /// `A + s * x x^T` restricted to writing the upper triangle.
    pub fn add_outer(&mut self, s: T, x: &[T]) {
        let n = self.order();
        for i in 0..n {
            let sx = s * x[i];
            for j in i..n {
                let v = self.0[(i, j)] + sx * x[j];
                self.0[(i, j)] = v;
                self.0[(j, i)] = v;
            }
        }
    }

    /// `A + s * (x y^T + y x^T)`.
    pub fn add_sym_outer(&mut self, s: T, x: &[T], y: &[T]) {
        let n = self.order();
        for i in 0..n {
            for j in i..n {
                let v = self.0[(i, j)] + s * (x[i] * y[j] + y[i] * x[j]);
                self.0[(i, j)] = v;
                self.0[(j, i)] = v;
            }
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0.max_abs_diff(&other.0)
    }

    /// Induced 1-norm (max column sum), equal to the infinity norm here.
    pub fn norm1(&self) -> T {
        (0..self.order()).map(|i| self.row(i).iter().fold(T::zero(), |acc, &x| acc + x.abs())).fold(T::zero(), T::max)
    }

    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        Cholesky::factor(self)
    }

    /// Inverse of a symmetric positive definite matrix, rejected when the
    /// exact 1-norm reciprocal condition falls below [`RCOND_THRESHOLD`].
    pub fn inverse_spd(&self) -> Result<SymMatrix<T>> {
        let inv = self.cholesky()?.inverse();
        let denom = self.norm1() * inv.norm1();
        let rcond = if denom > T::zero() { T::one() / denom } else { T::zero() };
        if !(rcond.as_f64() >= RCOND_THRESHOLD) {
            return Err(Error::IllConditioned { rcond: rcond.as_f64() });
        }
        Ok(inv)
    }

    pub fn eigh(&self) -> SymEigen<T> {
        SymEigen::new(self)
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Lower-triangular factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &SymMatrix<T>) -> Result<Self> {
        let n = a.order();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return Err(Error::IllConditioned { rcond: 0.0 });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> SymMatrix<T> {
        let n = self.l.rows();
        // invert L column by column, then A^-1 = L^-T L^-1
        let mut linv = DenseMatrix::zeros(n, n);
        for j in 0..n {
            linv[(j, j)] = T::one() / self.l[(j, j)];
            for i in j + 1..n {
                let mut s = T::zero();
                for k in j..i {
                    s = s + self.l[(i, k)] * linv[(k, j)];
                }
                linv[(i, j)] = -s / self.l[(i, i)];
            }
        }
        SymMatrix::from_upper(n, |i, j| {
            // sum_k linv[k][i] * linv[k][j], k >= max(i, j) = j
            let mut s = T::zero();
            for k in j..n {
                s = s + linv[(k, i)] * linv[(k, j)];
            }
            s
        })
    }
}

/// Eigendecomposition of a real symmetric matrix by Householder
/// tridiagonalisation followed by implicit QL iterations.
///
/// Eigenvalues are ascending; `vectors` holds the matching orthonormal
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: DenseMatrix<T>,
}

impl<T: Scalar> SymEigen<T> {
    pub fn new(a: &SymMatrix<T>) -> Self {
        let n = a.order();
        let mut v = a.as_dense().clone();
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        if n > 0 {
            tridiagonalize(&mut v, &mut d, &mut e);
            tql2(&mut v, &mut d, &mut e);
        }
        Self { values: d, vectors: v }
    }

    pub fn vector(&self, k: usize) -> Vec<T> {
        self.vectors.column(k)
    }

    /// Moore-Penrose pseudoinverse, dropping eigenvalues with
    /// `|value| <= tol`.
    pub fn pseudoinverse(&self, tol: T) -> SymMatrix<T> {
        let n = self.values.len();
        let kept: Vec<usize> = (0..n).filter(|&k| self.values[k].abs() > tol).collect();
        SymMatrix::from_upper(n, |i, j| {
            kept.iter().fold(T::zero(), |acc, &k| acc + self.vectors[(i, k)] * self.vectors[(j, k)] / self.values[k])
        })
    }
}

// Householder reduction to tridiagonal form (the classic tred2 routine).
fn tridiagonalize<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[(k, j)] * d[k];
                    e[k] = e[k] + v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] = v[(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] = v[(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

// Implicit QL on the tridiagonal form (the classic tql2 routine), then sort.
fn tql2<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }

    // selection sort keeps eigenvector columns paired with their values
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                let tmp = v[(row, i)];
                v[(row, i)] = v[(row, k)];
                v[(row, k)] = tmp;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2_laplacian() -> SymMatrix<f64> {
        SymMatrix::from_upper(2, |i, j| if i == j { 1.0 } else { -1.0 })
    }

    #[test]
    fn eigen_of_k2_laplacian() {
        let eig = k2_laplacian().eigh();
        assert!(eig.values[0].abs() < 1e-15);
        assert!((eig.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let a = SymMatrix::from_upper(5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5 + (i == j) as u8 as f64);
        let eig = a.eigh();
        let n = a.order();
        let rebuilt = SymMatrix::from_upper(n, |i, j| {
            (0..n).map(|k| eig.vectors[(i, k)] * eig.values[k] * eig.vectors[(j, k)]).sum()
        });
        assert!(a.max_abs_diff(&rebuilt) < 1e-12);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors);
        assert!(vtv.max_abs_diff(&DenseMatrix::identity(n)) < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigen_single_and_empty() {
        let one = SymMatrix::from_upper(1, |_, _| 4.0f64).eigh();
        assert_eq!(one.values, vec![4.0]);
        let empty = SymMatrix::<f64>::zeros(0).eigh();
        assert!(empty.values.is_empty());
    }

    #[test]
    fn cholesky_inverse_and_solve() {
        // K2 Laplacian plus J/2
        let a = SymMatrix::from_upper(2, |i, j| if i == j { 1.5f64 } else { -0.5 });
        let inv = a.inverse_spd().unwrap();
        assert!((inv.get(0, 0) - 0.75).abs() < 1e-15);
        assert!((inv.get(0, 1) - 0.25).abs() < 1e-15);
        let x = a.cholesky().unwrap().solve(&[1.0, 0.0]);
        assert!((x[0] - 0.75).abs() < 1e-15 && (x[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(k2_laplacian().inverse_spd(), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn nearly_singular_matrix_rejected() {
        let a = SymMatrix::from_upper(2, |i, j| if i == j { 1.0 } else { 1.0 - 1e-14 });
        assert!(matches!(a.inverse_spd(), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn pseudoinverse_of_k2_laplacian() {
        let p = k2_laplacian().eigh().pseudoinverse(1e-10);
        assert!((p.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((p.get(0, 1) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let a = SymMatrix::from_upper(3, |i, j| if i == j { 2.0f32 } else { -0.5 });
        let eig = a.eigh();
        assert!((eig.values[2] - 2.5).abs() < 1e-5);
        let inv = a.inverse_spd().unwrap();
        let prod = inv.as_dense().matmul(a.as_dense());
        assert!(prod.max_abs_diff(&DenseMatrix::identity(3)) < 1e-5);
    }
}
