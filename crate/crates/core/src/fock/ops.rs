use num_complex::Complex64;

use super::matrix::{FockMatrix, SparseGenerator};
use super::FockError;
use crate::exec::Exec;

/// A column counts as retained when less than this much norm leaks past the
/// working dimension.
pub const LEAKAGE_TOL: f64 = 1e-10;

const TAYLOR_TERMS: usize = 18;
const SCALED_NORM: f64 = 0.5;

/// A unitary built at a padded dimension and cropped to the working one.
/// Only the leading `retained_levels` columns are faithful; higher columns
/// lose norm through the truncation edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedUnitary {
    pub matrix: FockMatrix,
    pub retained_levels: usize,
}

impl TruncatedUnitary {
    /// max |(U†U − I)_ij| over the retained block.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.matrix;
        let n = u.dim();
        let r = self.retained_levels;
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in i..r {
                let mut acc = Complex64::default();
                for k in 0..n {
                    acc += u[(k, i)].conj() * u[(k, j)];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

fn check_dim(dim: usize) -> Result<(), FockError> {
    if dim < 2 {
        Err(FockError::Dimension { dim, min: 2 })
    } else {
        Ok(())
    }
}

/// Padded construction dimension for a target `dim`.
pub fn padded_dim(dim: usize, alpha_sq: f64, sinh_sq_r: f64) -> usize {
    dim + 16 + (8.0 * alpha_sq.max(sinh_sq_r)).ceil() as usize
}

/// ⟨m|b|n⟩ = √n δ_{m,n−1}.
pub fn annihilation_op(dim: usize) -> Result<FockMatrix, FockError> {
    check_dim(dim)?;
    let mut b = FockMatrix::zeros(dim);
    for n in 1..dim {
        b[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(b)
}

pub fn number_op(dim: usize) -> Result<FockMatrix, FockError> {
    check_dim(dim)?;
    Ok(FockMatrix::from_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>()))
}

fn displacement_generator(alpha: Complex64, dim: usize) -> SparseGenerator {
    // α b† − α* b
    let mut entries = Vec::with_capacity(2 * dim);
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt();
        entries.push((n + 1, n, alpha * s));
        entries.push((n, n + 1, -alpha.conj() * s));
    }
    SparseGenerator { dim, entries }
}

fn squeeze_generator(xi: Complex64, dim: usize) -> SparseGenerator {
    // ½ ξ* b² − ½ ξ b†²
    let mut entries = Vec::with_capacity(2 * dim);
    for n in 0..dim.saturating_sub(2) {
        let s = (((n + 1) * (n + 2)) as f64).sqrt();
        entries.push((n, n + 2, 0.5 * xi.conj() * s));
        entries.push((n + 2, n, -0.5 * xi * s));
    }
    SparseGenerator { dim, entries }
}

/// exp(G) by scaling and squaring with a fixed-order Taylor series.
pub(crate) fn expm(gen: &SparseGenerator, exec: Exec) -> FockMatrix {
    let norm = gen.inf_norm();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let mut sum = FockMatrix::identity(gen.dim);
    let mut term = FockMatrix::identity(gen.dim);
    for k in 1..=TAYLOR_TERMS {
        term = gen.right_mul(&term, scale / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul_with(&sum, exec);
    }
    sum
}

fn crop_unitary(full: &FockMatrix, dim: usize) -> Result<TruncatedUnitary, FockError> {
    let padded = full.dim();
    let mut retained = 0;
    let mut worst = 0.0;
    for j in 0..dim {
        let leak: f64 = (dim..padded).map(|i| full[(i, j)].norm_sqr()).sum();
        if leak < LEAKAGE_TOL {
            retained += 1;
        } else {
            worst = leak;
            break;
        }
    }
    if retained == 0 {
        return Err(FockError::Truncation {
            what: "operator",
            leakage: worst,
            dim,
            suggested_dim: 2 * dim,
        });
    }
    Ok(TruncatedUnitary {
        matrix: full.crop(dim),
        retained_levels: retained,
    })
}

/// D(α) = exp(α b† − α* b) on the padded space, cropped to `dim`.
pub fn displacement_op(alpha: Complex64, dim: usize) -> Result<TruncatedUnitary, FockError> {
    displacement_op_with(alpha, dim, Exec::default())
}

pub fn displacement_op_with(alpha: Complex64, dim: usize, exec: Exec) -> Result<TruncatedUnitary, FockError> {
    check_dim(dim)?;
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(FockError::NonFinite("alpha"));
    }
    let padded = padded_dim(dim, alpha.norm_sqr(), 0.0);
    crop_unitary(&expm(&displacement_generator(alpha, padded), exec), dim)
}

/// ŝ(ξ) = exp(½ξ* b² − ½ξ b†²) on the padded space, cropped to `dim`.
pub fn squeeze_op(xi: Complex64, dim: usize) -> Result<TruncatedUnitary, FockError> {
    squeeze_op_with(xi, dim, Exec::default())
}

pub fn squeeze_op_with(xi: Complex64, dim: usize, exec: Exec) -> Result<TruncatedUnitary, FockError> {
    check_dim(dim)?;
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(FockError::NonFinite("xi"));
    }
    let padded = padded_dim(dim, 0.0, xi.norm().sinh().powi(2));
    crop_unitary(&expm(&squeeze_generator(xi, padded), exec), dim)
}

/// Mean thermal occupation 1/(e^{ω/T} − 1); zero at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

pub(crate) fn thermal_populations(omega: f64, temperature: f64, dim: usize) -> Vec<f64> {
    if temperature <= 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return p;
    }
    let x = omega / temperature;
    let p0 = -(-x).exp_m1();
    (0..dim).map(|n| p0 * (-(n as f64) * x).exp()).collect()
}

/// Probability of occupying a level ≥ dim in the thermal state.
pub fn thermal_tail(omega: f64, temperature: f64, dim: usize) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        (-(dim as f64) * omega / temperature).exp()
    }
}

/// ρ_th = (1 − e^{−ω/T}) Σ e^{−nω/T} |n⟩⟨n|.
pub fn thermal_state(omega: f64, temperature: f64, dim: usize) -> Result<FockMatrix, FockError> {
    check_dim(dim)?;
    if !(omega > 0.0) {
        return Err(FockError::Parameter { name: "omega", value: omega });
    }
    if !(temperature >= 0.0) {
        return Err(FockError::Parameter {
            name: "temperature",
            value: temperature,
        });
    }
    let tail = thermal_tail(omega, temperature, dim);
    if tail >= LEAKAGE_TOL {
        let needed = (LEAKAGE_TOL.ln() / (-omega / temperature)).ceil() as usize + 1;
        return Err(FockError::Truncation {
            what: "thermal state",
            leakage: tail,
            dim,
            suggested_dim: needed.next_power_of_two(),
        });
    }
    Ok(FockMatrix::from_diagonal(&thermal_populations(omega, temperature, dim)))
}
