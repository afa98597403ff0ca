use num_complex::Complex64;

use super::matrix::FockMatrix;
use super::FockError;

const HERMITIAN_TOL: f64 = 1e-10;
const OFF_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: FockMatrix,
}

impl EigenDecomposition {
    /// max |M − V Λ V†|.
    pub fn reconstruction_residual(&self, m: &FockMatrix) -> f64 {
        let v = &self.eigenvectors;
        let n = v.dim();
        let vl = FockMatrix::from_fn(n, |i, j| v[(i, j)] * self.eigenvalues[j]);
        vl.matmul(&v.adjoint()).max_abs_diff(m)
    }

    /// max |V†V − I|.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = &self.eigenvectors;
        v.adjoint().matmul(v).max_abs_diff(&FockMatrix::identity(v.dim()))
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(m: &FockMatrix) -> Result<EigenDecomposition, FockError> {
    let (values, vectors) = jacobi(m, true)?;
    let vectors = vectors.expect("vectors requested");
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: FockMatrix::from_fn(n, |i, j| vectors[(i, order[j])]),
    })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &FockMatrix) -> Result<Vec<f64>, FockError> {
    let (mut values, _) = jacobi(m, false)?;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

fn off_norm_sq(a: &FockMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[(i, j)].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi(m: &FockMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<FockMatrix>), FockError> {
    let residual = m.hermiticity_residual();
    let n = m.dim();
    let scale = m.frobenius_norm();
    if residual > HERMITIAN_TOL * scale.max(1.0) {
        return Err(FockError::NotHermitian(residual));
    }
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = want_vectors.then(|| FockMatrix::identity(n));
    let target = (OFF_TOL * scale).powi(2);
    let mut sweeps = 0;
    while off_norm_sq(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(FockError::Convergence {
                sweeps,
                off_norm: off_norm_sq(&a).sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

// Annihilates a[p][q] with J = [[c, s e^{iφ}], [−s e^{−iφ}, c]], A ← J† A J.
fn rotate(a: &mut FockMatrix, v: Option<&mut FockMatrix>, p: usize, q: usize) {
    let b = a[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / mag;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.dim();
    // columns: A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s * phase.conj();
        a[(k, q)] = akp * s * phase + akq * c;
    }
    // rows: J† (A J)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s * phase;
        a[(q, k)] = apk * s * phase.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::default();
    a[(q, p)] = Complex64::default();
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * s * phase.conj();
            v[(k, q)] = vkp * s * phase + vkq * c;
        }
    }
}
