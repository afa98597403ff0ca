use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::ops::thermal_occupation;
use super::state::Moments;
use super::FockError;
use crate::exec::Exec;
use crate::params::ModeParams;

/// One displaced squeezed-thermal Gaussian in x = (b + b†)/√2,
/// p = (b − b†)/(i√2). The vacuum has covariance ½I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBranch {
    pub weight: f64,
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
}

impl GaussianBranch {
    pub fn det(&self) -> f64 {
        let c = &self.covariance;
        c[0][0] * c[1][1] - c[0][1] * c[1][0]
    }

    fn check(&self) -> Result<(), FockError> {
        let c = &self.covariance;
        if !(c[0][0] > 0.0 && self.det() > 0.0) || (c[0][1] - c[1][0]).abs() > 1e-12 * c[0][0].abs().max(1.0) {
            return Err(FockError::Covariance(self.det()));
        }
        Ok(())
    }

    /// Weighted Gaussian density at (x, p).
    pub fn density(&self, x: f64, p: f64) -> f64 {
        let c = &self.covariance;
        let det = self.det();
        let dx = x - self.mean[0];
        let dp = p - self.mean[1];
        // dᵀ σ⁻¹ d with the explicit 2×2 inverse
        let q = (c[1][1] * dx * dx - 2.0 * c[0][1] * dx * dp + c[0][0] * dp * dp) / det;
        self.weight * (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }

    /// ⟨b⟩, ⟨b†b⟩ and ⟨b²⟩ implied by this branch alone.
    pub fn moments(&self) -> Moments {
        let c = &self.covariance;
        let a_mean = Complex64::new(self.mean[0], self.mean[1]) / SQRT_2;
        Moments {
            n_mean: 0.5 * (c[0][0] + c[1][1]) - 0.5 + a_mean.norm_sqr(),
            a_sq: Complex64::new(0.5 * (c[0][0] - c[1][1]), c[0][1]) + a_mean * a_mean,
            a_mean,
        }
    }
}

/// Weighted moments of a Gaussian mixture.
pub fn mixture_moments(branches: &[GaussianBranch]) -> Moments {
    let mut out = Moments {
        n_mean: 0.0,
        a_sq: Complex64::default(),
        a_mean: Complex64::default(),
    };
    for b in branches {
        let m = b.moments();
        out.n_mean += b.weight * m.n_mean;
        out.a_sq += b.weight * m.a_sq;
        out.a_mean += b.weight * m.a_mean;
    }
    out
}

/// Branch of ϱ_k(t) displaced by `sign`·α_k(t) (sign = +1 for |e⟩, −1 for |g⟩).
///
/// From ⟨Δb†Δb⟩ = cosh 2r (n̄ + ½) − ½ and ⟨Δb²⟩ = −e^{iθ} sinh 2r (n̄ + ½):
/// σ = [[N + ½ + Re M, Im M], [Im M, N + ½ − Re M]].
pub fn gaussian_branch_from_params(
    mode: &ModeParams,
    temperature: f64,
    sign: f64,
    t: f64,
    weight: f64,
) -> Result<GaussianBranch, FockError> {
    if !(temperature >= 0.0) {
        return Err(FockError::Parameter {
            name: "temperature",
            value: temperature,
        });
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(FockError::Parameter { name: "weight", value: weight });
    }
    let half = thermal_occupation(mode.omega_k, temperature) + 0.5;
    let r2 = 2.0 * mode.r_k;
    let n = r2.cosh() * half - 0.5;
    let m = -Complex64::from_polar(r2.sinh() * half, mode.theta_k);
    let alpha = mode.alpha(t) * sign.signum();
    Ok(GaussianBranch {
        weight,
        mean: [SQRT_2 * alpha.re, SQRT_2 * alpha.im],
        covariance: [[n + 0.5 + m.re, m.im], [m.im, n + 0.5 - m.re]],
    })
}

/// The two branches of ϱ_k(t) with weights p_e and p_g.
pub fn mode_branches(mode: &ModeParams, temperature: f64, p_e: f64, t: f64) -> Result<[GaussianBranch; 2], FockError> {
    Ok([
        gaussian_branch_from_params(mode, temperature, 1.0, t, p_e)?,
        gaussian_branch_from_params(mode, temperature, -1.0, t, 1.0 - p_e)?,
    ])
}

/// Rectangular (x, p) lattice, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl PhaseGrid {
    /// Square lattice covering every branch to ±`n_sigma` standard deviations.
    pub fn covering(branches: &[GaussianBranch], n_sigma: f64, points: usize) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for b in branches {
            for k in 0..2 {
                let s = n_sigma * b.covariance[k][k].sqrt();
                lo[k] = lo[k].min(b.mean[k] - s);
                hi[k] = hi[k].max(b.mean[k] + s);
            }
        }
        Self {
            x_min: lo[0],
            x_max: hi[0],
            nx: points,
            p_min: lo[1],
            p_max: hi[1],
            np: points,
        }
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![min];
        }
        (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        Self::axis(self.p_min, self.p_max, self.np)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `values[i][j]` = W(xs[i], ps[j]).
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    /// Trapezoidal integral over the lattice.
    pub fn integral(&self) -> f64 {
        let w = |n: usize, i: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let (nx, np) = (self.xs.len(), self.ps.len());
        if nx < 2 || np < 2 {
            return 0.0;
        }
        let dx = (self.xs[nx - 1] - self.xs[0]) / (nx - 1) as f64;
        let dp = (self.ps[np - 1] - self.ps[0]) / (np - 1) as f64;
        let mut s = 0.0;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                s += w(nx, i) * w(np, j) * v;
            }
        }
        s * dx * dp
    }
}

/// W(x, p) = Σ_j w_j exp(−½ dᵀσ_j⁻¹d) / (2π √det σ_j), parallel over x rows.
pub fn wigner_grid(branches: &[GaussianBranch], grid: &PhaseGrid, exec: Exec) -> Result<WignerGrid, FockError> {
    if branches.is_empty() {
        return Err(FockError::NoBranches);
    }
    let total: f64 = branches.iter().map(|b| b.weight).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(FockError::Weights(total));
    }
    for b in branches {
        b.check()?;
    }
    if grid.nx == 0 || grid.np == 0 {
        return Err(FockError::Dimension { dim: 0, min: 1 });
    }
    let xs = grid.xs();
    let ps = grid.ps();
    let values = exec.map(&xs, |&x| {
        ps.iter()
            .map(|&p| branches.iter().map(|b| b.density(x, p)).sum())
            .collect::<Vec<f64>>()
    });
    Ok(WignerGrid { xs, ps, values })
}
