//! Dense symmetric linear algebra: Cholesky factorization, inversion,
//! log-determinants, power iteration and entrywise soft thresholding.
//!
//! Matrices are stored densely in row-major order. Every constructor
//! mirrors the upper triangle so reads of `(i, j)` and `(j, i)` agree
//! bit for bit.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default relative tolerance for [`power_iter_max_eig`].
pub const POWER_ITER_TOL: f64 = 1e-6;
/// Default iteration cap for [`power_iter_max_eig`].
pub const POWER_ITER_MAX_ITERS: usize = 1000;

/// Dense symmetric `p x p` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    dim: usize,
    data: Vec<f64>,
}

impl DenseSym {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        DenseSym {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle
    /// (`i <= j`) and mirrored.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v;
            }
        }
        m
    }

    /// Builds a matrix from a row-major slice that must be exactly symmetric.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let diff = (data[i * dim + j] - data[j * dim + i]).abs();
                if diff != 0.0 || data[i * dim + j].is_nan() != data[j * dim + i].is_nan() {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(DenseSym {
            dim,
            data: data.to_vec(),
        })
    }

    /// Builds a matrix from nested rows, averaging `(i, j)` and `(j, i)` when
    /// they differ by at most `sym_tol` and failing otherwise.
    pub fn from_rows_symmetrized(rows: &[Vec<f64>], sym_tol: f64) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let diff = (rows[i][j] - rows[j][i]).abs();
                if !(diff <= sym_tol) {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| {
            if i == j {
                rows[i][i]
            } else {
                0.5 * (rows[i][j] + rows[j][i])
            }
        }))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Applies `f` entrywise. `f` must not depend on position, so symmetry
    /// is preserved.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DenseSym {
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip_with(&self, other: &DenseSym, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        DenseSym {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self + scale * other`
    pub fn add_scaled(&self, scale: f64, other: &DenseSym) -> Self {
        self.zip_with(other, |a, b| a + scale * b)
    }

    /// `self + shift * I`
    pub fn shift_diag(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += shift;
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), x)).collect()
    }

    /// General product `self * other` in row-major order (not symmetric in
    /// general).
    pub fn matmul(&self, other: &DenseSym) -> Vec<f64> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let p = self.dim;
        let mut out = vec![0.0; p * p];
        for i in 0..p {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..p {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * self`, which is symmetric for symmetric `self`.
    pub fn square(&self) -> Self {
        let p = self.dim;
        Self::from_fn(p, |i, j| dot(self.row(i), self.row(j)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Trace inner product `<A, B> = Tr(A B)`.
    pub fn inner(&self, other: &DenseSym) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        dot(&self.data, &other.data)
    }

    pub fn frob_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// `1^T |A| 1`, the entrywise absolute sum (diagonal included).
    pub fn abs_sum_quad(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Fraction of nonzero strictly off-diagonal entries.
    pub fn offdiag_nnz_frac(&self) -> f64 {
        let p = self.dim;
        if p < 2 {
            return 0.0;
        }
        let mut nnz = 0usize;
        for i in 0..p {
            for j in (i + 1)..p {
                if self.get(i, j) != 0.0 {
                    nnz += 1;
                }
            }
        }
        nnz as f64 / (p * (p - 1) / 2) as f64
    }

    /// Spectral norm. Power iteration on `A` when `A` is positive definite,
    /// on `A^T A` otherwise.
    pub fn spectral_norm(&self) -> Result<f64> {
        self.spectral_norm_with(POWER_ITER_TOL, POWER_ITER_MAX_ITERS)
    }

    pub fn spectral_norm_with(&self, tol: f64, max_iters: usize) -> Result<f64> {
        if cholesky(self).is_ok() {
            power_iter_max_eig(self, tol, max_iters)
        } else {
            Ok(power_iter_max_eig(&self.square(), tol, max_iters)?.max(0.0).sqrt())
        }
    }
}

impl Add for &DenseSym {
    type Output = DenseSym;
    fn add(self, rhs: &DenseSym) -> DenseSym {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DenseSym {
    type Output = DenseSym;
    fn sub(self, rhs: &DenseSym) -> DenseSym {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &DenseSym {
    type Output = DenseSym;
    fn mul(self, rhs: f64) -> DenseSym {
        self.map(|a| a * rhs)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    dim: usize,
    // row-major, entries above the diagonal are zero
    lower: Vec<f64>,
}

impl CholFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lower
    }

    /// Reconstructs `L L^T`.
    pub fn reconstruct(&self) -> DenseSym {
        let p = self.dim;
        DenseSym::from_fn(p, |i, j| {
            let k = i.min(j) + 1;
            dot(&self.lower[i * p..i * p + k], &self.lower[j * p..j * p + k])
        })
    }
}

/// Cholesky factorization. Any pivot that is not strictly positive
/// (including NaN) yields [`Error::NotPositiveDefinite`].
pub fn cholesky(a: &DenseSym) -> Result<CholFactor> {
    let p = a.dim();
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let s = a.get(i, j) - dot(&l[i * p..i * p + j], &l[j * p..j * p + j]);
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    Ok(CholFactor { dim: p, lower: l })
}

/// `A^{-1}` from the factor of `A`, via `L^{-T} L^{-1}`.
pub fn inverse_from_chol(chol: &CholFactor) -> DenseSym {
    let p = chol.dim;
    // rows of L^{-1}; forward substitution column by column of the identity
    let mut linv = vec![0.0; p * p];
    for i in 0..p {
        let lii = chol.get(i, i);
        linv[i * p + i] = 1.0 / lii;
        for j in 0..i {
            let mut s = 0.0;
            for k in j..i {
                s += chol.get(i, k) * linv[k * p + j];
            }
            linv[i * p + j] = -s / lii;
        }
    }
    // (A^{-1})_{ij} = sum_{k >= max(i,j)} Linv_{ki} Linv_{kj}; accumulate by rows of Linv
    let mut inv = vec![0.0; p * p];
    for k in 0..p {
        let row = &linv[k * p..k * p + k + 1];
        for i in 0..=k {
            let a = row[i];
            if a == 0.0 {
                continue;
            }
            let out = &mut inv[i * p..i * p + i + 1];
            for (o, &b) in out.iter_mut().zip(&row[..=i]) {
                *o += a * b;
            }
        }
    }
    // inv holds the lower triangle; mirror
    DenseSym::from_fn(p, |i, j| inv[j * p + i])
}

/// `log det A = 2 sum_i log L_ii`
pub fn log_det_from_chol(chol: &CholFactor) -> f64 {
    2.0 * (0..chol.dim).map(|i| chol.get(i, i).ln()).sum::<f64>()
}

/// Dominant eigenvalue by power iteration from the normalized all-ones
/// vector. Converges when the relative change between successive Rayleigh
/// quotients drops to `tol`.
///
/// A start vector that is itself an eigenvector converges immediately,
/// possibly to the wrong eigenvalue. When that happens the iteration is
/// restarted once from `ones + e_1` and the larger estimate is kept.
pub fn power_iter_max_eig(a: &DenseSym, tol: f64, max_iters: usize) -> Result<f64> {
    let p = a.dim();
    let ones = vec![1.0; p];
    let (lambda, iters) = power_run(a, ones, tol, max_iters)?;
    if iters > 2 || p == 1 {
        return Ok(lambda);
    }
    let mut start = vec![1.0; p];
    start[0] += 1.0;
    match power_run(a, start, tol, max_iters) {
        Ok((second, _)) => Ok(lambda.max(second)),
        Err(_) => Ok(lambda),
    }
}

fn power_run(a: &DenseSym, mut v: Vec<f64>, tol: f64, max_iters: usize) -> Result<(f64, usize)> {
    normalize(&mut v);
    let mut w = a.matvec(&v);
    let mut lambda = dot(&v, &w);
    for k in 1..=max_iters {
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return Ok((0.0, k));
        }
        v = w.iter().map(|x| x / norm).collect();
        w = a.matvec(&v);
        let next = dot(&v, &w);
        if (next - lambda).abs() <= tol * next.abs() {
            return Ok((next, k));
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        method: "power iteration",
        iters: max_iters,
    })
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Entrywise soft thresholding `sgn(a) * max(|a| - tau, 0)`. Exact zeros
/// stay zero.
pub fn soft_threshold(a: &DenseSym, tau: f64) -> DenseSym {
    debug_assert!(tau >= 0.0);
    a.map(|x| soft(x, tau))
}

#[inline]
pub(crate) fn soft(x: f64, tau: f64) -> f64 {
    let m = x.abs() - tau;
    if m > 0.0 {
        m.copysign(x)
    } else {
        0.0
    }
}
