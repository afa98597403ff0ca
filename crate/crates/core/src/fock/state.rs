use num_complex::Complex64;

use super::eigen::hermitian_eigenvalues;
use super::matrix::FockMatrix;
use super::ops::{self, padded_dim, LEAKAGE_TOL};
use super::FockError;
use crate::exec::Exec;
use crate::params::ModeParams;

/// Smallest dimension tried by the automatic search.
pub const AUTO_DIM_START: usize = 32;
/// Largest dimension the automatic search will use.
pub const AUTO_DIM_CAP: usize = 512;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// ϱ_k(t) = p_e D(α) ϱ₀ D(α)† + p_g D(−α) ϱ₀ D(−α)† with ϱ₀ = ŝ ρ_th ŝ†
/// and α = α_k(t). Built at a padded dimension and cropped to `dim`.
pub fn mode_state(t: f64, mode: &ModeParams, temperature: f64, p_e: f64, dim: usize) -> Result<FockMatrix, FockError> {
    mode_state_with(t, mode, temperature, p_e, dim, Exec::default())
}

pub fn mode_state_with(
    t: f64,
    mode: &ModeParams,
    temperature: f64,
    p_e: f64,
    dim: usize,
    exec: Exec,
) -> Result<FockMatrix, FockError> {
    if dim < 2 {
        return Err(FockError::Dimension { dim, min: 2 });
    }
    if !(0.0..=1.0).contains(&p_e) {
        return Err(FockError::Parameter { name: "p_e", value: p_e });
    }
    if !(temperature >= 0.0) {
        return Err(FockError::Parameter {
            name: "temperature",
            value: temperature,
        });
    }
    if !t.is_finite() {
        return Err(FockError::NonFinite("t"));
    }
    let alpha = mode.alpha(t);
    let xi = mode.xi();
    let padded = padded_dim(dim, alpha.norm_sqr(), mode.r_k.sinh().powi(2));
    let pops = ops::thermal_populations(mode.omega_k, temperature, padded);
    let mut rho0 = FockMatrix::from_diagonal(&pops);
    if xi.norm() > 0.0 {
        let s = ops::squeeze_op_with(xi, padded, exec)?.matrix;
        // ŝ diag(p) ŝ† without forming diag(p) explicitly
        let sp = FockMatrix::from_fn(padded, |i, j| s[(i, j)] * pops[j]);
        rho0 = sp.matmul_with(&s.adjoint(), exec);
    }
    let mut rho = if alpha.norm() == 0.0 {
        rho0
    } else {
        let branches = [(p_e, alpha), (1.0 - p_e, -alpha)];
        let mut acc = FockMatrix::zeros(padded);
        for (w, a) in branches {
            if w == 0.0 {
                continue;
            }
            let d = ops::displacement_op_with(a, padded, exec)?.matrix;
            acc = acc.add(&rho0.conjugate_by(&d, exec).scale(Complex64::new(w, 0.0)));
        }
        acc
    };
    rho = rho.crop(dim).hermitian_part();
    let tail = 1.0 - rho.trace().re;
    let top = rho[(dim - 1, dim - 1)].re;
    if tail.abs() >= LEAKAGE_TOL || top >= LEAKAGE_TOL {
        return Err(FockError::Truncation {
            what: "mode state",
            leakage: tail.abs().max(top),
            dim,
            suggested_dim: 2 * dim,
        });
    }
    Ok(rho)
}

/// Smallest dimension in 32, 64, … 512 at which `mode_state` passes its
/// truncation checks.
pub fn auto_dim(t: f64, mode: &ModeParams, temperature: f64, p_e: f64) -> Result<usize, FockError> {
    mode_state_auto(t, mode, temperature, p_e).map(|m| m.dim())
}

pub fn mode_state_auto(t: f64, mode: &ModeParams, temperature: f64, p_e: f64) -> Result<FockMatrix, FockError> {
    let mut dim = AUTO_DIM_START;
    loop {
        match mode_state(t, mode, temperature, p_e, dim) {
            Err(FockError::Truncation { .. }) if dim < AUTO_DIM_CAP => dim *= 2,
            Err(FockError::Truncation { leakage, .. }) => {
                return Err(FockError::DimensionCap {
                    cap: AUTO_DIM_CAP,
                    leakage,
                })
            }
            other => return other,
        }
    }
}

/// S = −Σ λ ln λ over eigenvalues above [`EIGEN_FLOOR`].
pub fn von_neumann_entropy(state: &FockMatrix) -> Result<f64, FockError> {
    Ok(entropy_from_eigenvalues(&hermitian_eigenvalues(state)?))
}

pub fn entropy_from_eigenvalues(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Relative agreement required between step h and h/2.
pub const STEP_HALVING_REL: f64 = 0.01;
/// Absolute agreement accepted when the rate itself is near zero.
pub const STEP_HALVING_ABS: f64 = 1e-8;

/// dS/dt of the exact mode state by central differences, checked by step
/// halving. `dim = None` selects the dimension automatically and `h = None`
/// uses 10⁻³/ω_k. Returns the h/2 estimate.
pub fn entropy_rate_fd(
    t: f64,
    mode: &ModeParams,
    temperature: f64,
    p_e: f64,
    dim: Option<usize>,
    h: Option<f64>,
) -> Result<f64, FockError> {
    if !(t >= 0.0) {
        return Err(FockError::Parameter { name: "t", value: t });
    }
    let h = h.unwrap_or(1e-3 / mode.omega_k);
    if !(h > 0.0) {
        return Err(FockError::Parameter { name: "h", value: h });
    }
    if p_e == 0.0 || p_e == 1.0 {
        // a single displaced branch is a unitary image of ϱ₀
        return Ok(0.0);
    }
    let dim = match dim {
        Some(d) => d,
        None => [t - h, t + h]
            .iter()
            .map(|&s| auto_dim(s, mode, temperature, p_e))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or(AUTO_DIM_START),
    };
    let s = |x: f64| mode_state(x, mode, temperature, p_e, dim).and_then(|m| von_neumann_entropy(&m));
    let coarse = (s(t + h)? - s(t - h)?) / (2.0 * h);
    let fine = (s(t + 0.5 * h)? - s(t - 0.5 * h)?) / h;
    if (coarse - fine).abs() > STEP_HALVING_REL * fine.abs() + STEP_HALVING_ABS {
        return Err(FockError::StepSize { coarse, fine });
    }
    Ok(fine)
}

/// First and second moments of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// ⟨b†b⟩
    pub n_mean: f64,
    /// ⟨b²⟩
    pub a_sq: Complex64,
    /// ⟨b⟩
    pub a_mean: Complex64,
}

pub fn moments(state: &FockMatrix) -> Result<Moments, FockError> {
    let n = state.dim();
    if n < 2 {
        return Err(FockError::Dimension { dim: n, min: 2 });
    }
    // only the (k, k), (k, k+1), (k, k+2) entries of ρ pair with b†b, b, b²
    let mut n_mean = 0.0;
    let mut a_mean = Complex64::default();
    let mut a_sq = Complex64::default();
    for k in 0..n {
        n_mean += k as f64 * state[(k, k)].re;
        if k + 1 < n {
            a_mean += state[(k + 1, k)] * ((k + 1) as f64).sqrt();
        }
        if k + 2 < n {
            a_sq += state[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt();
        }
    }
    Ok(Moments { n_mean, a_sq, a_mean })
}

/// Semi-Born estimate (2|g_k|²/T){cosh 2r_k sin ω_k t − sinh 2r_k [sin(2ω_k t − Δθ_k) − sin(ω_k t − Δθ_k)]}.
pub fn approx_entropy_rate_mode(t: f64, mode: &ModeParams, temperature: f64) -> Result<f64, FockError> {
    if !(temperature > 0.0) {
        return Err(FockError::Divergence(temperature));
    }
    let wt = mode.omega_k * t;
    let dth = mode.delta_theta();
    let r2 = 2.0 * mode.r_k;
    let brace = if mode.r_k == 0.0 {
        wt.sin()
    } else {
        r2.cosh() * wt.sin() - r2.sinh() * ((2.0 * wt - dth).sin() - (wt - dth).sin())
    };
    Ok(2.0 * mode.g_abs * mode.g_abs / temperature * brace)
}
