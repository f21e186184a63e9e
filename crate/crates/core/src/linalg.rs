//! Dense linear algebra kernel: Gram accumulation, SPD inversion via
//! Cholesky, Sherman-Morrison rank-one inverse updates, and the symmetric
//! eigendecomposition needed by the spectral baseline.
//!
//! Everything here is small-dimension (d up to a few hundred), row-major,
//! `f64`. Types are immutable values after construction; all operations are
//! pure functions, so they are safe to call from many threads.

use crate::error::{CoreError, Result};

/// Max-abs residual accepted for `A * inverse(A) - I`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Slack allowed below zero for eigenvalue estimates of PSD matrices,
/// relative to the matrix norm.
pub const PSD_SLACK: f64 = 1e-10;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, validating shape and
    /// finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(CoreError::InvalidInput(format!(
                "matrix shape {}x{} does not match {} entries",
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::InvalidInput("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row_slice(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vector {
        Vector::from(self.row_slice(i).to_vec())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * other` without forming the transpose.
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "t_matmul shape mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = &self.data[k * self.cols..(k + 1) * self.cols];
            let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.dim(), "mul_vec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
        }
        Vector::from(out)
    }

    /// `self^T * x`.
    pub fn t_mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(self.rows, x.dim(), "t_mul_vec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for k in 0..self.rows {
            let xk = x.as_slice()[k];
            if xk == 0.0 {
                continue;
            }
            let row = &self.data[k * self.cols..(k + 1) * self.cols];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += xk * a;
            }
        }
        Vector::from(out)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Adds `lambda` to the diagonal, in place.
    pub fn add_diag(&mut self, lambda: f64) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            self.data[i * self.cols + i] += lambda;
        }
    }

    /// Accumulates the rank-one term `w * x x^T`, in place.
    pub fn add_outer(&mut self, x: &Vector, w: f64) {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, x.dim());
        let xs = x.as_slice();
        for i in 0..self.rows {
            let wxi = w * xs[i];
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &xj) in row.iter_mut().zip(xs) {
                *r += wxi * xj;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Replaces the matrix with `(M + M^T) / 2`.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Quadratic form `x^T A x`.
    pub fn quad_form(&self, x: &Vector) -> f64 {
        self.mul_vec(x).dot(x)
    }
}

/// `tr(A B)` computed without forming the product.
pub fn trace_product(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.cols(), b.rows());
    assert_eq!(a.rows(), b.cols());
    let mut acc = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(
                "vector entries must be finite".into(),
            ));
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector::from(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector::from(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from(self.data.iter().map(|a| a * s).collect::<Vec<_>>())
    }

    /// `self += s * other`, in place.
    pub fn scaled_add(&mut self, s: f64, other: &Vector) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

/// Gram matrix `X^T X`. The upper triangle is computed and mirrored, so the
/// result is symmetric bit-for-bit.
pub fn gram(x: &Matrix) -> Result<Matrix> {
    let d = x.cols();
    if d == 0 {
        return Err(CoreError::InvalidInput(
            "gram requires at least one column".into(),
        ));
    }
    let mut g = Matrix::zeros(d, d);
    for r in 0..x.rows() {
        let row = x.row_slice(r);
        for i in 0..d {
            let xi = row[i];
            if xi == 0.0 {
                continue;
            }
            for j in i..d {
                let v = g.get(i, j) + xi * row[j];
                g.set(i, j, v);
            }
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let v = g.get(i, j);
            g.set(j, i, v);
        }
    }
    Ok(g)
}

/// Lower-triangular Cholesky factor of an SPD matrix. The pivot index is
/// reported when a non-positive pivot is hit.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(CoreError::NotPositiveDefinite { pivot: i });
                }
                l.set(i, i, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix via Cholesky:
/// `A^{-1} = L^{-T} L^{-1}`. The result is symmetric by construction.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let l = cholesky(a)?;
    // Invert the triangular factor by forward substitution.
    let mut linv = Matrix::zeros(n, n);
    for i in 0..n {
        linv.set(i, i, 1.0 / l.get(i, i));
        for j in 0..i {
            let mut sum = 0.0;
            for k in j..i {
                sum -= l.get(i, k) * linv.get(k, j);
            }
            linv.set(i, j, sum / l.get(i, i));
        }
    }
    // A^{-1} = linv^T linv; fill the lower triangle and mirror.
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = 0.0;
            for k in i..n {
                sum += linv.get(k, i) * linv.get(k, j);
            }
            inv.set(i, j, sum);
            inv.set(j, i, sum);
        }
    }
    Ok(inv)
}

/// Solves `A x = b` for SPD `A` via Cholesky, without forming the inverse.
pub fn spd_solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.rows();
    assert_eq!(b.dim(), n);
    let l = cholesky(a)?;
    let mut y = b.as_slice().to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    Ok(Vector::from(y))
}

/// Sherman-Morrison rank-one inverse update:
/// `(A + x x^T)^{-1} = A^{-1} - (A^{-1}x)(A^{-1}x)^T / (1 + x^T A^{-1} x)`.
///
/// The result is re-symmetrized; sequential updates would otherwise drift.
pub fn sherman_morrison_update(a_inv: &Matrix, x: &Vector) -> Result<Matrix> {
    let mut out = a_inv.clone();
    sherman_morrison_in_place(&mut out, x)?;
    Ok(out)
}

/// In-place variant of [`sherman_morrison_update`] for hot loops.
pub fn sherman_morrison_in_place(a_inv: &mut Matrix, x: &Vector) -> Result<()> {
    let k = a_inv.mul_vec(x);
    let denom = 1.0 + x.dot(&k);
    if denom <= 0.0 || !denom.is_finite() {
        return Err(CoreError::CorruptState(format!(
            "rank-one update denominator {denom} <= 0; inverse is no longer SPD"
        )));
    }
    a_inv.add_outer(&k, -1.0 / denom);
    a_inv.symmetrize();
    Ok(())
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, basis)` with `A = basis * diag(eigenvalues) *
/// basis^T`; the basis columns are orthonormal.
pub fn sym_eigen(a: &Matrix) -> Result<(Vector, Matrix)> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    m.symmetrize();
    let mut q = Matrix::identity(n);
    let scale = m.max_abs().max(1.0);
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.get(i, j).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m.get(p, r);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(r, r);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, r);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, r, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(r, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(r, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkq = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkq);
                    q.set(k, r, s * qkp + c * qkq);
                }
            }
        }
    }
    let evals = Vector::from((0..n).map(|i| m.get(i, i)).collect::<Vec<_>>());
    Ok((evals, q))
}
