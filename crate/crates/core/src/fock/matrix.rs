use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::exec::Exec;

/// Below this dimension matrix products stay on the calling thread.
const PARALLEL_MIN_DIM: usize = 48;

/// Dense square complex matrix on a truncated Fock basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl FockMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// ½(M + M†).
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }

    /// max |M_ij − conj M_ji|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Leading `n × n` block.
    pub fn crop(&self, n: usize) -> Self {
        assert!(n <= self.dim);
        Self::from_fn(n, |i, j| self[(i, j)])
    }

    /// Embed into a larger zero matrix.
    pub fn pad(&self, n: usize) -> Self {
        assert!(n >= self.dim);
        Self::from_fn(n, |i, j| {
            if i < self.dim && j < self.dim {
                self[(i, j)]
            } else {
                Complex64::default()
            }
        })
    }

    /// tr(self · op).
    pub fn expectation(&self, op: &Self) -> Complex64 {
        assert_eq!(self.dim, op.dim);
        let n = self.dim;
        let mut acc = Complex64::default();
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.matmul_with(other, Exec::default())
    }

    /// Dense product, rows distributed over workers for the parallel strategy.
    pub fn matmul_with(&self, other: &Self, exec: Exec) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = vec![Complex64::default(); n * n];
        let row_kernel = |i: usize, dst: &mut [Complex64]| {
            let a = self.row(i);
            for (k, &aik) in a.iter().enumerate() {
                if aik == Complex64::default() {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += aik * b;
                }
            }
        };
        if n == 0 {
            return Self { dim: 0, data: out };
        }
        if exec.is_parallel() && n >= PARALLEL_MIN_DIM {
            par_rows(&mut out, n, &row_kernel);
        } else {
            for (i, dst) in out.chunks_mut(n).enumerate() {
                row_kernel(i, dst);
            }
        }
        Self { dim: n, data: out }
    }

    /// U · M · U†.
    pub fn conjugate_by(&self, u: &Self, exec: Exec) -> Self {
        u.matmul_with(self, exec).matmul_with(&u.adjoint(), exec)
    }
}

#[cfg(feature = "parallel")]
fn par_rows<F: Fn(usize, &mut [Complex64]) + Sync>(out: &mut [Complex64], n: usize, kernel: &F) {
    use rayon::prelude::*;
    out.par_chunks_mut(n).enumerate().for_each(|(i, dst)| kernel(i, dst));
}

#[cfg(not(feature = "parallel"))]
fn par_rows<F: Fn(usize, &mut [Complex64]) + Sync>(out: &mut [Complex64], n: usize, kernel: &F) {
    for (i, dst) in out.chunks_mut(n).enumerate() {
        kernel(i, dst);
    }
}

impl Index<(usize, usize)> for FockMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for FockMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Sparse generator used to build Fock-space unitaries by exponentiation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SparseGenerator {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseGenerator {
    pub fn inf_norm(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for &(i, _, v) in &self.entries {
            rows[i] += v.norm();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// A · G for dense A.
    pub fn right_mul(&self, a: &FockMatrix, scale: f64) -> FockMatrix {
        let n = self.dim;
        let mut out = FockMatrix::zeros(n);
        for &(k, j, v) in &self.entries {
            let v = v * scale;
            for i in 0..n {
                out[(i, j)] += a[(i, k)] * v;
            }
        }
        out
    }

    #[cfg(test)]
    pub fn to_dense(&self) -> FockMatrix {
        let mut m = FockMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_matches_naive() {
        let n = 70;
        let a = FockMatrix::from_fn(n, |i, j| c((i * 3 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02));
        let b = FockMatrix::from_fn(n, |i, j| c(((i * j) % 7) as f64, 0.5 * j as f64));
        let seq = a.matmul_with(&b, Exec::Sequential);
        let par = a.matmul_with(&b, Exec::Parallel);
        assert_eq!(seq, par);
        let naive = FockMatrix::from_fn(n, |i, j| (0..n).map(|k| a[(i, k)] * b[(k, j)]).sum());
        assert!(seq.max_abs_diff(&naive) < 1e-10);
    }

    #[test]
    fn basic_algebra() {
        let a = FockMatrix::from_fn(3, |i, j| c(i as f64, j as f64));
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.crop(2).dim(), 2);
        assert_eq!(a.pad(5).crop(3), a);
        assert_eq!(FockMatrix::identity(4).trace(), c(4.0, 0.0));
        assert!(a.hermitian_part().hermiticity_residual() < 1e-15);
        assert_eq!(a.sub(&a), FockMatrix::zeros(3));
        let e = FockMatrix::identity(3).expectation(&a);
        assert_eq!(e, a.trace());
    }

    #[test]
    fn sparse_right_mul() {
        let g = SparseGenerator {
            dim: 4,
            entries: vec![(1, 0, c(1.0, 2.0)), (0, 1, c(-1.0, 2.0)), (3, 2, c(0.5, 0.0))],
        };
        let a = FockMatrix::from_fn(4, |i, j| c(i as f64 + 1.0, j as f64));
        let dense = a.matmul_with(&g.to_dense(), Exec::Sequential);
        assert!(g.right_mul(&a, 1.0).max_abs_diff(&dense) < 1e-14);
        assert!((g.inf_norm() - 5f64.sqrt()).abs() < 1e-15);
    }
}
