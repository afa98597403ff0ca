//! Bath-entropy rate in the semi-Born approximation and the landscape
//! f(t, δθ) = X_t − (Y_t cos δθ + Z_t sin δθ).

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::Exec;
use crate::fock::{self, FockError};
use crate::params::{BathSpectrum, ModeParams, ParamError, SqueezeParams};

#[derive(Debug, Error)]
pub enum BathError {
    #[error("τ must be ≥ 0 (got {0})")]
    NegativeTau(f64),
    #[error("temperature must be > 0 (got {0})")]
    Temperature(f64),
    #[error("{0} grid is empty")]
    EmptyGrid(&'static str),
    #[error("mode list is empty")]
    NoModes,
    #[error(transparent)]
    Mode(#[from] FockError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BathRateCoefficients {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BathRateCoefficients {
    pub fn f(&self, delta_theta: f64) -> f64 {
        let (s, c) = delta_theta.sin_cos();
        self.x - (self.y * c + self.z * s)
    }
}

pub fn xyz_coeffs(tau: f64) -> Result<BathRateCoefficients, BathError> {
    if !(tau >= 0.0) {
        return Err(BathError::NegativeTau(tau));
    }
    let t2 = tau * tau;
    let p = 1.0 + t2;
    let q = 1.0 + 4.0 * t2;
    let pq = p * p * q * q;
    Ok(BathRateCoefficients {
        x: 2.0 * tau / (p * p),
        y: 2.0 * tau * (1.0 - 4.0 * t2 - 14.0 * t2 * t2) / pq,
        z: 3.0 * t2 * (3.0 + 5.0 * t2 - 4.0 * t2 * t2) / pq,
    })
}

/// Ṡ_B = (λΩ_c²/πT)[X cosh 2r − sinh 2r (Y cos δθ + Z sin δθ)].
pub fn bath_entropy_rate(t: f64, spectrum: &BathSpectrum, squeeze: &SqueezeParams) -> Result<f64, BathError> {
    let temp = spectrum.temperature;
    if !(temp > 0.0) {
        return Err(BathError::Temperature(temp));
    }
    let k = xyz_coeffs(spectrum.tau(t))?;
    let (s, c) = squeeze.delta_theta.sin_cos();
    let r2 = 2.0 * squeeze.r;
    let pref = spectrum.lambda * spectrum.omega_c * spectrum.omega_c / (PI * temp);
    Ok(pref * (k.x * r2.cosh() - r2.sinh() * (k.y * c + k.z * s)))
}

/// f(τ, δθ) on a rectangular grid, rows indexed by τ.
#[derive(Debug, Clone, PartialEq)]
pub struct FMap {
    pub tau: Vec<f64>,
    pub theta: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub min: f64,
    pub argmin: (f64, f64),
    pub max: f64,
    pub negative_fraction: f64,
}

pub fn f_map(tau_grid: &[f64], theta_grid: &[f64], exec: Exec) -> Result<FMap, BathError> {
    if tau_grid.is_empty() {
        return Err(BathError::EmptyGrid("τ"));
    }
    if theta_grid.is_empty() {
        return Err(BathError::EmptyGrid("δθ"));
    }
    let values = exec.try_map(tau_grid, |&tau| {
        let k = xyz_coeffs(tau)?;
        Ok::<_, BathError>(theta_grid.iter().map(|&th| k.f(th)).collect::<Vec<f64>>())
    })?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut argmin = (tau_grid[0], theta_grid[0]);
    let mut negative = 0usize;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < min {
                min = v;
                argmin = (tau_grid[i], theta_grid[j]);
            }
            max = max.max(v);
            if v < 0.0 {
                negative += 1;
            }
        }
    }
    Ok(FMap {
        tau: tau_grid.to_vec(),
        theta: theta_grid.to_vec(),
        values,
        min,
        argmin,
        max,
        negative_fraction: negative as f64 / (tau_grid.len() * theta_grid.len()) as f64,
    })
}

/// Uniform midpoint discretization of the Ohmic spectrum on [0, ω_max] with
/// |g_k|² = J(ω_k) Δω / 2π. All modes share the global squeezing and φ_k = 0.
pub fn ohmic_modes(
    spectrum: &BathSpectrum,
    squeeze: &SqueezeParams,
    n_modes: usize,
    omega_max: f64,
) -> Result<Vec<ModeParams>, BathError> {
    if n_modes == 0 {
        return Err(BathError::NoModes);
    }
    let dw = omega_max / n_modes as f64;
    (0..n_modes)
        .map(|k| {
            let w = (k as f64 + 0.5) * dw;
            let g = (spectrum.density(w) * dw / (2.0 * PI)).sqrt();
            Ok(ModeParams::with_squeeze(w, g, 0.0, *squeeze)?)
        })
        .collect()
}

/// Σ_k of the per-mode semi-Born rate.
pub fn approx_bath_entropy_rate_sum(modes: &[ModeParams], temperature: f64, t: f64) -> Result<f64, BathError> {
    if modes.is_empty() {
        return Err(BathError::NoModes);
    }
    modes
        .iter()
        .map(|m| fock::approx_entropy_rate_mode(t, m, temperature).map_err(BathError::from))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::bath_entropy_quadrature;
    use proptest::prelude::*;

    #[test]
    fn coefficient_values() {
        assert_eq!(xyz_coeffs(0.0).unwrap(), BathRateCoefficients::default());
        let k = xyz_coeffs(1.0).unwrap();
        assert!((k.x - 0.5).abs() < 1e-15);
        assert!((k.y + 0.34).abs() < 1e-15);
        assert!((k.z - 0.12).abs() < 1e-15);
        let k = xyz_coeffs(100.0).unwrap();
        assert!(k.x.abs() < 1e-3 && k.y.abs() < 1e-3 && k.z.abs() < 1e-3);
        assert!(xyz_coeffs(-1.0).is_err());
    }

    #[test]
    fn rate_values() {
        let s = BathSpectrum::new(1.0, 1.0, 1.0).unwrap();
        let sq = SqueezeParams::new(1.0, PI).unwrap();
        assert_eq!(bath_entropy_rate(0.0, &s, &sq).unwrap(), 0.0);
        let v = bath_entropy_rate(1.0, &s, &sq).unwrap();
        assert!((v - 0.206_253_763_082_053_59).abs() < 1e-14);
        let cold = BathSpectrum::new(1.0, 1.0, 0.0).unwrap();
        assert!(bath_entropy_rate(1.0, &cold, &sq).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let s = BathSpectrum::new(0.1, 2.0, 0.7).unwrap();
        for &r in &[0.0, 0.5, 1.0] {
            for &th in &[0.0, 0.5 * PI, PI, 1.5 * PI] {
                let sq = SqueezeParams::new(r, th).unwrap();
                for &tau in &[0.01, 0.3, 1.0, 4.0, 20.0] {
                    let t = tau / 2.0;
                    let closed = bath_entropy_rate(t, &s, &sq).unwrap();
                    let quad = bath_entropy_quadrature(t, &s, &sq).unwrap().value;
                    let scale = closed.abs().max(1e-300);
                    assert!((closed - quad).abs() < 1e-6 * scale, "r={r} δθ={th} τ={tau}: {closed} vs {quad}");
                }
            }
        }
    }

    #[test]
    fn landscape_has_small_negative_lobe() {
        let taus: Vec<f64> = (0..=500).map(|i| i as f64 * 0.01).collect();
        let thetas: Vec<f64> = (0..360).map(|j| j as f64 * 2.0 * PI / 360.0).collect();
        let m = f_map(&taus, &thetas, Exec::Parallel).unwrap();
        assert!(m.min < 0.0);
        assert!(m.min.abs() / m.max < 0.2);
        assert!(m.negative_fraction > 0.0 && m.negative_fraction < 0.5);
        assert!(m.values[0].iter().all(|&v| v == 0.0));
        assert_eq!(m, f_map(&taus, &thetas, Exec::Sequential).unwrap());
        assert!(f_map(&[], &thetas, Exec::Sequential).is_err());
    }

    #[test]
    fn mode_sum_converges_to_closed_form() {
        let s = BathSpectrum::new(0.05, 1.0, 1.0).unwrap();
        let sq = SqueezeParams::vacuum();
        let target = s.lambda / (PI * s.temperature) * 0.5;
        let err = |n: usize| {
            let modes = ohmic_modes(&s, &sq, n, 40.0).unwrap();
            (approx_bath_entropy_rate_sum(&modes, 1.0, 1.0).unwrap() - target).abs()
        };
        let e3 = err(1000);
        let e4 = err(10_000);
        assert!(e3 < 0.01 * target, "{e3}");
        assert!(e4 <= 0.5 * e3, "{e3} {e4}");
        assert!(approx_bath_entropy_rate_sum(&[], 1.0, 1.0).is_err());
    }

    #[test]
    fn single_mode_sum() {
        let m = ModeParams::new(1.3, 0.2, 0.0, 0.0, 0.0).unwrap();
        let v = approx_bath_entropy_rate_sum(&[m], 0.5, 0.7).unwrap();
        assert!((v - 2.0 * 0.04 / 0.5 * (1.3f64 * 0.7).sin()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn antiperiodic_squeeze_term(tau in 0.0f64..30.0, th in 0.0f64..6.283) {
            let k = xyz_coeffs(tau).unwrap();
            prop_assert!((k.f(th) + k.f(th + PI) - 2.0 * k.x).abs() < 1e-14);
        }

        #[test]
        fn unsqueezed_rate_nonnegative(t in 0.0f64..100.0, lam in 0.0f64..2.0, temp in 0.01f64..10.0) {
            let s = BathSpectrum::new(lam, 1.0, temp).unwrap();
            prop_assert!(bath_entropy_rate(t, &s, &SqueezeParams::vacuum()).unwrap() >= 0.0);
        }
    }
}
