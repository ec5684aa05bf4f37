//! Dense real linear algebra: products, norms, factorizations, and
//! small-scale spectral oracles used for testing every other module.
//!
//! Everything here works in 64-bit floats on row-major storage. Matrix
//! products are deterministic: for fixed inputs the result is bit-identical
//! regardless of how much internal parallelism is in play, because each
//! output row is accumulated in a fixed order.

use crate::error::{Error, Result};
use crate::prng::{ScalarStream, STREAM_POWER_ITER, STREAM_SVD_COMPLETION};
use rayon::prelude::*;

/// Relative Frobenius threshold below which a matrix counts as symmetric.
pub const SYMMETRY_REL_TOL: f64 = 1e-8;

const PAR_FLOP_THRESHOLD: usize = 1 << 18;
const JACOBI_MAX_SWEEPS: usize = 64;
const ORACLE_MAX_DIM: usize = 2048;

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Mat {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// Builds a matrix from row-major data, validating length and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Mat> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Config(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("matrix entries must be finite".into()));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape("add", other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape("sub", other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn check_same_shape(&self, op: &'static str, other: &Mat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    /// Matrix product. Deterministic for fixed inputs: each output row is a
    /// sequential k-major accumulation, so thread scheduling cannot change
    /// the result.
    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        gemm_probe::record(self.rows, self.cols, other.cols);
        let n = other.cols;
        let mut out = Mat::zeros(self.rows, n);
        let flops = self.rows * self.cols * n;
        if flops >= PAR_FLOP_THRESHOLD {
            out.data
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out_row)| gemm_row(self, other, i, out_row));
        } else {
            for (i, out_row) in out.data.chunks_mut(n).enumerate() {
                gemm_row(self, other, i, out_row);
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<f64>()
            })
            .collect()
    }

    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_matvec length mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            if vi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += vi * a;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Frobenius norm: square root of the sum of squared entries.
    pub fn frob_norm(&self) -> f64 {
        self.sum_squares().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm of A - A^T.
    pub fn symmetry_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = self.get(i, j) - self.get(j, i);
                sum += 2.0 * d * d;
            }
        }
        sum.sqrt()
    }

    pub fn is_symmetric_to(&self, rel_tol: f64) -> bool {
        self.is_square() && self.symmetry_defect() <= rel_tol * self.frob_norm()
    }

    /// (A + A^T) / 2.
    pub fn symmetrized(&self) -> Mat {
        assert!(self.is_square(), "symmetrized requires a square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }

    /// I - A for square A.
    pub fn identity_minus(&self) -> Mat {
        assert!(self.is_square(), "identity_minus requires a square matrix");
        let mut out = self.scale(-1.0);
        for i in 0..self.rows {
            let v = out.get(i, i);
            out.set(i, i, v + 1.0);
        }
        out
    }

    /// Adds s to each diagonal entry.
    pub fn add_scaled_identity(&self, s: f64) -> Mat {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i);
            out.set(i, i, v + s);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn gemm_row(a: &Mat, b: &Mat, i: usize, out_row: &mut [f64]) {
    let n = b.cols;
    for k in 0..a.cols {
        let aik = a.data[i * a.cols + k];
        if aik != 0.0 {
            let b_row = &b.data[k * n..(k + 1) * n];
            for (o, bv) in out_row.iter_mut().zip(b_row) {
                *o += aik * bv;
            }
        }
    }
}

/// Per-thread counter of square-times-square matrix products, used by cost
/// contract tests to show that sketched fitting never forms an n x n product.
pub mod gemm_probe {
    use std::cell::Cell;

    thread_local! {
        static SQUARE_PRODUCTS: Cell<u64> = const { Cell::new(0) };
    }

    pub fn reset() {
        SQUARE_PRODUCTS.with(|c| c.set(0));
    }

    /// Count of m x m times m x m products issued from this thread since the
    /// last reset.
    pub fn square_products() -> u64 {
        SQUARE_PRODUCTS.with(|c| c.get())
    }

    pub(crate) fn record(m: usize, k: usize, n: usize) {
        if m == k && k == n {
            SQUARE_PRODUCTS.with(|c| c.set(c.get() + 1));
        }
    }
}

/// Eigenvalues (or singular values) in descending order, with optional
/// orthonormal vectors stored as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Mat>,
}

/// Power-iteration estimate of the spectral norm, run on A^T A. The Rayleigh
/// quotient never exceeds the true norm, so the estimate approaches it from
/// below. Deterministic for a fixed seed.
pub fn spectral_norm_estimate(a: &Mat, iters: usize, seed: u64) -> f64 {
    assert!(iters >= 1, "spectral_norm_estimate requires iters >= 1");
    let n = a.cols();
    let mut stream = ScalarStream::new(seed, STREAM_POWER_ITER);
    let mut v: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
    let norm = l2(&v);
    if norm == 0.0 {
        return 0.0;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    for _ in 0..iters {
        let w = a.matvec(&v);
        let z = a.tr_matvec(&w);
        let zn = l2(&z);
        if zn == 0.0 {
            return 0.0;
        }
        v = z.into_iter().map(|x| x / zn).collect();
    }
    l2(&a.matvec(&v))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Thin Householder QR of an m x n matrix with m >= n. Returns (Q, R) with
/// Q m x n having orthonormal columns, R n x n upper-triangular with a
/// non-negative diagonal, and Q R = A.
pub fn householder_qr(a: &Mat) -> Result<(Mat, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::ShapeMismatch {
            op: "householder_qr",
            left_rows: m,
            left_cols: n,
            right_rows: n,
            right_cols: n,
        });
    }
    let mut work = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<f64> = (j..m).map(|i| work.get(i, j)).collect();
        let col_norm = l2(&v);
        if col_norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * col_norm;
        let v_norm = l2(&v);
        for x in v.iter_mut() {
            *x /= v_norm;
        }
        for col in j..n {
            let mut dot = 0.0;
            for (idx, vi) in v.iter().enumerate() {
                dot += vi * work.get(j + idx, col);
            }
            for (idx, vi) in v.iter().enumerate() {
                let old = work.get(j + idx, col);
                work.set(j + idx, col, old - 2.0 * dot * vi);
            }
        }
        reflectors.push(v);
    }

    let mut r = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r.set(i, j, work.get(i, j));
        }
    }

    // Accumulate Q by applying reflectors in reverse to the thin identity.
    let mut q = Mat::zeros(m, n);
    for j in 0..n {
        q.set(j, j, 1.0);
    }
    for j in (0..n).rev() {
        let v = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for col in 0..n {
            let mut dot = 0.0;
            for (idx, vi) in v.iter().enumerate() {
                dot += vi * q.get(j + idx, col);
            }
            for (idx, vi) in v.iter().enumerate() {
                let old = q.get(j + idx, col);
                q.set(j + idx, col, old - 2.0 * dot * vi);
            }
        }
    }

    for j in 0..n {
        if r.get(j, j) < 0.0 {
            for col in j..n {
                let v = r.get(j, col);
                r.set(j, col, -v);
            }
            for row in 0..m {
                let v = q.get(row, j);
                q.set(row, j, -v);
            }
        }
    }
    Ok((q, r))
}

/// Inverse of a symmetric positive definite matrix via Cholesky. The input is
/// re-symmetrized before factorization and the result after; a non-positive
/// pivot reports the failing index.
pub fn cholesky_spd_inverse(a: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            op: "cholesky_spd_inverse",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.rows(),
            right_cols: a.rows(),
        });
    }
    if !a.is_symmetric_to(SYMMETRY_REL_TOL) {
        return Err(Error::NotSymmetric {
            op: "cholesky_spd_inverse",
        });
    }
    let s = a.symmetrized();
    let n = s.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = s.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j });
        }
        let ljj = d.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / ljj);
        }
    }

    // Forward-substitute L Z = I, then A^{-1} = Z^T Z.
    let mut linv = Mat::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut v = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                v -= l.get(i, k) * linv.get(k, c);
            }
            linv.set(i, c, v / l.get(i, i));
        }
    }
    let inv = linv.transpose().matmul(&linv)?;
    Ok(inv.symmetrized())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Rotations sweep
/// until the off-diagonal Frobenius mass drops below `tol * ||a||_F`.
/// Returns eigenvalues in descending order with orthonormal vectors.
pub fn jacobi_eigendecomposition(a: &Mat, tol: f64) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            op: "jacobi_eigendecomposition",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.rows(),
            right_cols: a.rows(),
        });
    }
    if a.rows() > ORACLE_MAX_DIM {
        return Err(Error::Config(format!(
            "jacobi oracle limited to {ORACLE_MAX_DIM}x{ORACLE_MAX_DIM}, got {}",
            a.rows()
        )));
    }
    if !a.is_symmetric_to(SYMMETRY_REL_TOL) {
        return Err(Error::NotSymmetric {
            op: "jacobi_eigendecomposition",
        });
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Mat::identity(n);
    let a_norm = m.frob_norm();
    if a_norm == 0.0 {
        return Ok(Spectrum {
            values: vec![0.0; n],
            vectors: Some(v),
        });
    }
    let thresh = tol * a_norm;
    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m.get(i, j) * m.get(i, j);
                }
            }
        }
        if off.sqrt() <= thresh {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation M <- M J, then row rotation M <- J^T M.
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, c * mip - s * miq);
                    m.set(i, q, s * mip + c * miq);
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, c * mpj - s * mqj);
                    m.set(q, j, s * mpj + c * mqj);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NumericalInstability {
            iteration: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).partial_cmp(&m.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, new_col, v.get(i, old_col));
        }
    }
    Ok(Spectrum {
        values,
        vectors: Some(vectors),
    })
}

/// Reference SVD of an m x n matrix (m >= n) by one-sided Jacobi rotations:
/// columns of a working copy are rotated pairwise until mutually orthogonal,
/// which recovers small singular values to high relative accuracy (a Gram
/// eigendecomposition would square away half the digits). Columns of U
/// belonging to singular values below `tol * s_max` are completed to an
/// orthonormal set from a seeded Gaussian draw.
pub fn reference_svd(a: &Mat, tol: f64) -> Result<(Mat, Spectrum, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::ShapeMismatch {
            op: "reference_svd",
            left_rows: m,
            left_cols: n,
            right_rows: n,
            right_cols: n,
        });
    }
    if n > ORACLE_MAX_DIM {
        return Err(Error::Config(format!(
            "svd oracle limited to {ORACLE_MAX_DIM} columns, got {n}"
        )));
    }
    let mut b = a.clone();
    let mut v_acc = Mat::identity(n);
    const ORTHO_TOL: f64 = 1e-14;
    let mut converged = n < 2;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if app == 0.0 || aqq == 0.0 || apq.abs() <= ORTHO_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, cs * bp - sn * bq);
                    b.set(i, q, sn * bp + cs * bq);
                }
                for i in 0..n {
                    let vp = v_acc.get(i, p);
                    let vq = v_acc.get(i, q);
                    v_acc.set(i, p, cs * vp - sn * vq);
                    v_acc.set(i, q, sn * vp + cs * vq);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalInstability {
            iteration: JACOBI_MAX_SWEEPS,
        });
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b.get(i, j) * b.get(i, j)).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let s_max = values.first().copied().unwrap_or(0.0);
    let mut v = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            v.set(i, new_col, v_acc.get(i, old_col));
        }
    }

    let mut u = Mat::zeros(m, n);
    let mut established = vec![false; n];
    for (new_col, &old_col) in order.iter().enumerate() {
        if values[new_col] > tol * s_max && values[new_col] > 0.0 {
            for i in 0..m {
                u.set(i, new_col, b.get(i, old_col) / values[new_col]);
            }
            established[new_col] = true;
        }
    }
    // Complete rank-deficient columns with re-orthogonalized random vectors.
    let mut stream = ScalarStream::new(0x5EED, STREAM_SVD_COMPLETION);
    for i in 0..n {
        if established[i] {
            continue;
        }
        loop {
            let mut w: Vec<f64> = (0..m).map(|_| stream.normal()).collect();
            for _pass in 0..2 {
                for j in 0..n {
                    if !established[j] {
                        continue;
                    }
                    let mut dot = 0.0;
                    for r in 0..m {
                        dot += w[r] * u.get(r, j);
                    }
                    for r in 0..m {
                        w[r] -= dot * u.get(r, j);
                    }
                }
            }
            let norm = l2(&w);
            if norm > 1e-8 {
                for r in 0..m {
                    u.set(r, i, w[r] / norm);
                }
                established[i] = true;
                break;
            }
        }
    }
    Ok((
        u,
        Spectrum {
            values,
            vectors: None,
        },
        v,
    ))
}

/// Matrix functions computed through the eigendecomposition oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFunctionKind {
    Sign,
    Sqrt,
    InvSqrt,
    InvPRoot(u32),
    Inverse,
}

/// Ground-truth matrix function of a symmetric matrix: V f(diag(lambda)) V^T
/// via the Jacobi oracle. Inverse-type kinds reject eigenvalues with
/// magnitude at or below `tol * ||a||_2`.
pub fn reference_matrix_function(a: &Mat, kind: MatrixFunctionKind, tol: f64) -> Result<Mat> {
    let eig = jacobi_eigendecomposition(a, 1e-12)?;
    let v = eig.vectors.expect("jacobi always returns vectors");
    let n = a.rows();
    let v_max = eig
        .values
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut mapped = Vec::with_capacity(n);
    for (i, &lam) in eig.values.iter().enumerate() {
        let f = match kind {
            MatrixFunctionKind::Sign => {
                if lam.abs() <= tol * v_max {
                    return Err(Error::Singular { index: i });
                }
                lam.signum()
            }
            MatrixFunctionKind::Sqrt => {
                if lam < -tol * v_max {
                    return Err(Error::NotPositiveDefinite { index: i });
                }
                lam.max(0.0).sqrt()
            }
            MatrixFunctionKind::InvSqrt => {
                if lam <= tol * v_max {
                    return Err(Error::Singular { index: i });
                }
                1.0 / lam.sqrt()
            }
            MatrixFunctionKind::InvPRoot(p) => {
                if p == 0 {
                    return Err(Error::Config("inverse p-th root requires p >= 1".into()));
                }
                if lam <= tol * v_max {
                    return Err(Error::Singular { index: i });
                }
                lam.powf(-1.0 / p as f64)
            }
            MatrixFunctionKind::Inverse => {
                if lam.abs() <= tol * v_max {
                    return Err(Error::Singular { index: i });
                }
                1.0 / lam
            }
        };
        mapped.push(f);
    }
    // V diag(f) V^T
    let mut scaled = v.clone();
    for j in 0..n {
        for i in 0..n {
            let val = scaled.get(i, j) * mapped[j];
            scaled.set(i, j, val);
        }
    }
    let out = scaled.matmul(&v.transpose())?;
    Ok(out.symmetrized())
}
