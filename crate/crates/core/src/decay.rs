//! Closed-form decoherence factor Γ(t) for the Ohmic bath.
//!
//! Every regime shares the assembly
//!
//! ```text
//! Γ(t) = (λ/π) [A cosh 2r − sinh 2r (B cos δθ + C sin δθ)]
//! ```
//!
//! and differs only in the coefficients (A, B, C) as functions of τ = Ω_c t.
//!
//! The finite-temperature coefficients come from coth(ω/2T) = 1 + 2 Σ_{n≥1}
//! e^{−nω/T}. Each n ≥ 1 term is a zero-temperature integral whose cutoff is
//! shifted to Ω_c / (1 + nΩ_c/T), so with c = T/Ω_c and z = cτ = T t the n-th
//! term is the zero-temperature bracket evaluated at z/(n + c). The sum
//! over n converges only like 1/n², so after a handful of explicit terms the
//! remainder is taken from the Euler–Maclaurin formula: its integral part is
//! exactly the high-temperature bracket, and the derivative corrections are
//! closed-form.
//!
//! The expansion variable is e^{−ω/T}. A series in e^{−nω/2T} with cutoff
//! Ω_c/(1 + nΩ_c/2T) does not sum to coth(ω/2T) and misses the full-coth
//! quadrature by O(1) at T ~ Ω_c; the acceptance suite checks the e^{−nω/T}
//! form against that quadrature at T/Ω_c ∈ {0.1, 1, 10}.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::params::{BathSpectrum, SqueezeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("time must be ≥ 0 (got τ = {0})")]
    NegativeTime(f64),
    #[error("temperature must be > 0 for this regime (got {0})")]
    NonPositiveTemperature(f64),
    #[error("thermal series did not converge in {terms} terms (last term {last_term:e}, partial A={:e})", partial.a)]
    Convergence {
        partial: DecayCoefficients,
        last_term: f64,
        terms: usize,
    },
}

/// Dimensionless coefficients (A_t, B_t, C_t). Also used to carry their
/// τ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecayCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DecayCoefficients {
    fn from_array([a, b, c]: [f64; 3]) -> Self {
        Self { a, b, c }
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            a: k * self.a,
            b: k * self.b,
            c: k * self.c,
        }
    }

    /// A cosh 2r − sinh 2r (B cos δθ + C sin δθ).
    pub fn combine(&self, squeeze: &SqueezeParams) -> f64 {
        let (s, c) = squeeze.delta_theta.sin_cos();
        let r2 = 2.0 * squeeze.r;
        self.a * r2.cosh() - r2.sinh() * (self.b * c + self.c * s)
    }
}

/// Truncation control for the finite-temperature series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ZeroT,
    HighT,
    Exact,
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero_t" => Ok(Regime::ZeroT),
            "high_t" => Ok(Regime::HighT),
            "exact" => Ok(Regime::Exact),
            other => Err(format!("unknown regime `{other}` (expected zero_t, high_t or exact)")),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::ZeroT => "zero_t",
            Regime::HighT => "high_t",
            Regime::Exact => "exact",
        })
    }
}

fn check_tau(tau: f64) -> Result<f64, DecayError> {
    if tau >= 0.0 {
        Ok(tau)
    } else {
        Err(DecayError::NegativeTime(tau))
    }
}

// 2 atan x − atan 2x, with its Taylor series near 0 where the two arctangents cancel.
fn c_bracket_zero(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        let mut pow = x * x2;
        let mut four_k = 4.0;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * (2.0 * four_k - 2.0) * pow / (2.0 * kf + 1.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            pow *= x2;
            four_k *= 4.0;
        }
        sum
    } else {
        2.0 * x.atan() - (2.0 * x).atan()
    }
}

fn zero_t_brackets(x: f64) -> [f64; 3] {
    let x2 = x * x;
    let l1 = x2.ln_1p();
    [l1, 0.5 * (4.0 * x2).ln_1p() - l1, c_bracket_zero(x)]
}

fn high_t_brackets(x: f64) -> [f64; 3] {
    let x2 = x * x;
    let l1 = x2.ln_1p();
    let a = 2.0 * x * x.atan() - l1;
    let b = 2.0 * x * ((2.0 * x).atan() - x.atan()) - (0.5 * (4.0 * x2).ln_1p() - l1);
    let c = if x < 0.1 {
        // Σ (−1)^{k+1} (4^k − 1) x^{2k+1} / (k(2k+1))
        let mut pow = x * x2;
        let mut four_k = 4.0;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * (four_k - 1.0) * pow / (kf * (2.0 * kf + 1.0));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            pow *= x2;
            four_k *= 4.0;
        }
        sum
    } else {
        -c_bracket_zero(x) + x * (3.0 * x2 / (1.0 + x2)).ln_1p()
    };
    [a, b, c]
}

/// Zero-temperature coefficients (coth → 1).
pub fn coeffs_zero_t(tau: f64) -> Result<DecayCoefficients, DecayError> {
    Ok(DecayCoefficients::from_array(zero_t_brackets(check_tau(tau)?)))
}

/// τ-derivatives of [`coeffs_zero_t`].
pub fn coeffs_zero_t_deriv(tau: f64) -> Result<DecayCoefficients, DecayError> {
    let t = check_tau(tau)?;
    let p1 = 1.0 + t * t;
    let p4 = 1.0 + 4.0 * t * t;
    Ok(DecayCoefficients {
        a: 2.0 * t / p1,
        b: 4.0 * t / p4 - 2.0 * t / p1,
        c: 2.0 / p1 - 2.0 / p4,
    })
}

/// dA − √(dB² + dC²): a lower bound on dΓ/dτ · π/(λ cosh 2r) at zero
/// temperature, valid for every squeezing phase.
pub fn monotonicity_margin(tau: f64) -> Result<f64, DecayError> {
    let d = coeffs_zero_t_deriv(tau)?;
    Ok(d.a - d.b.hypot(d.c))
}

/// Closed form of [`monotonicity_margin`]: 2τ/(1+τ²) · (1 − √((1+τ²)/(1+4τ²))).
pub fn monotonicity_margin_closed(tau: f64) -> Result<f64, DecayError> {
    let t = check_tau(tau)?;
    let p1 = 1.0 + t * t;
    let p4 = 1.0 + 4.0 * t * t;
    Ok(2.0 * t / p1 * (1.0 - (p1 / p4).sqrt()))
}

/// High-temperature coefficients (coth(ω/2T) → 2T/ω); `two_t_over_oc` is 2T/Ω_c.
pub fn coeffs_high_t(tau: f64, two_t_over_oc: f64) -> Result<DecayCoefficients, DecayError> {
    let t = check_tau(tau)?;
    if !(two_t_over_oc > 0.0) {
        return Err(DecayError::NonPositiveTemperature(two_t_over_oc));
    }
    Ok(DecayCoefficients::from_array(high_t_brackets(t)).scale(two_t_over_oc))
}

/// τ-derivatives of [`coeffs_high_t`].
pub fn coeffs_high_t_deriv(tau: f64, two_t_over_oc: f64) -> Result<DecayCoefficients, DecayError> {
    let t = check_tau(tau)?;
    if !(two_t_over_oc > 0.0) {
        return Err(DecayError::NonPositiveTemperature(two_t_over_oc));
    }
    let d = DecayCoefficients {
        a: 2.0 * t.atan(),
        b: 2.0 * ((2.0 * t).atan() - t.atan()),
        c: (3.0 * t * t / (1.0 + t * t)).ln_1p(),
    };
    Ok(d.scale(two_t_over_oc))
}

// k-th derivative in y of ln(1 + w²/y²) = 2 Re ln(y + iw) − 2 ln y.
fn log_bracket_deriv(w: f64, y: f64, k: i32, fact: f64) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let zk = Complex64::new(y, w).powi(-k);
    2.0 * sign * fact * (zk.re - y.powi(-k))
}

// k-th derivative in y of atan(w/y) = Im ln(y + iw).
fn atan_bracket_deriv(w: f64, y: f64, k: i32, fact: f64) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact * Complex64::new(y, w).powi(-k).im
}

fn term_deriv(z: f64, y: f64, k: i32) -> [f64; 3] {
    let fact: f64 = (1..k).map(f64::from).product();
    let l1 = log_bracket_deriv(z, y, k, fact);
    let l2 = log_bracket_deriv(2.0 * z, y, k, fact);
    [
        l1,
        0.5 * l2 - l1,
        2.0 * atan_bracket_deriv(z, y, k, fact) - atan_bracket_deriv(2.0 * z, y, k, fact),
    ]
}

/// Exact finite-temperature coefficients from the thermal series.
///
/// Terms n = 1..N are summed explicitly; the remainder Σ_{n>N} comes from
/// Euler–Maclaurin through the f''' correction. Summation stops once the
/// first omitted correction (∝ f⁽⁵⁾) is below `rel_tol` relative to
/// |A| + |B| + |C|.
pub fn coeffs_exact(tau: f64, spectrum: &BathSpectrum, ctrl: &SeriesControl) -> Result<DecayCoefficients, DecayError> {
    let tau = check_tau(tau)?;
    let temp = spectrum.temperature;
    if !(temp > 0.0) {
        return Err(DecayError::NonPositiveTemperature(temp));
    }
    let zero = zero_t_brackets(tau);
    if tau == 0.0 {
        return Ok(DecayCoefficients::default());
    }
    let c = temp / spectrum.omega_c;
    let z = c * tau;
    let mut sum = [0.0; 3];
    let mut total = zero;
    let mut last_term = 0.0;
    for n in 1..=ctrl.max_terms.max(1) {
        let y = n as f64 + c;
        let term = zero_t_brackets(z / y);
        for i in 0..3 {
            sum[i] += term[i];
        }
        last_term = term.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let integral = high_t_brackets(z / y);
        let d1 = term_deriv(z, y, 1);
        let d3 = term_deriv(z, y, 3);
        let d5 = term_deriv(z, y, 5);
        let mut err = 0.0f64;
        for i in 0..3 {
            let tail = y * integral[i] - 0.5 * term[i] - d1[i] / 12.0 + d3[i] / 720.0;
            total[i] = zero[i] + 2.0 * (sum[i] + tail);
            err = err.max(2.0 * d5[i].abs() / 30240.0);
        }
        let scale = total.iter().map(|v| v.abs()).sum::<f64>();
        if y >= 2.0 && err <= ctrl.rel_tol * scale {
            return Ok(DecayCoefficients::from_array(total));
        }
    }
    Err(DecayError::Convergence {
        partial: DecayCoefficients::from_array(total),
        last_term,
        terms: ctrl.max_terms,
    })
}

/// Coefficients for `regime` at τ. `Exact` at T = 0 falls back to the
/// zero-temperature closed form, which is its exact limit.
pub fn coeffs(tau: f64, spectrum: &BathSpectrum, regime: Regime) -> Result<DecayCoefficients, DecayError> {
    match regime {
        Regime::ZeroT => coeffs_zero_t(tau),
        Regime::HighT => coeffs_high_t(tau, 2.0 * spectrum.temperature / spectrum.omega_c),
        Regime::Exact if spectrum.temperature == 0.0 => coeffs_zero_t(tau),
        Regime::Exact => coeffs_exact(tau, spectrum, &SeriesControl::default()),
    }
}

/// Decoherence factor Γ(t); the qubit coherence is ρ_eg(0) e^{−Γ(t)}.
pub fn gamma(t: f64, spectrum: &BathSpectrum, squeeze: &SqueezeParams, regime: Regime) -> Result<f64, DecayError> {
    let k = coeffs(spectrum.tau(t), spectrum, regime)?;
    Ok(spectrum.lambda / PI * k.combine(squeeze))
}

/// dΓ/dt. Analytic for `ZeroT` and `HighT`; five-point central difference
/// of the series for `Exact`.
pub fn gamma_rate(t: f64, spectrum: &BathSpectrum, squeeze: &SqueezeParams, regime: Regime) -> Result<f64, DecayError> {
    let tau = check_tau(spectrum.tau(t))?;
    let pref = spectrum.lambda / PI * spectrum.omega_c;
    match regime {
        Regime::ZeroT => Ok(pref * coeffs_zero_t_deriv(tau)?.combine(squeeze)),
        Regime::Exact if spectrum.temperature == 0.0 => Ok(pref * coeffs_zero_t_deriv(tau)?.combine(squeeze)),
        Regime::HighT => {
            Ok(pref * coeffs_high_t_deriv(tau, 2.0 * spectrum.temperature / spectrum.omega_c)?.combine(squeeze))
        }
        Regime::Exact => {
            if t == 0.0 {
                return Ok(0.0);
            }
            let mut h = 1e-3 * t.max(1.0 / spectrum.omega_c);
            if t < 4.0 * h {
                h = 0.25 * t;
            }
            let g = |s: f64| gamma(s, spectrum, squeeze, Regime::Exact);
            Ok((-g(t + 2.0 * h)? + 8.0 * g(t + h)? - 8.0 * g(t - h)? + g(t - 2.0 * h)?) / (12.0 * h))
        }
    }
}

/// Long-time dephasing rate from the exact high-temperature solution,
/// κ = 2λT [cosh 2r − (ln 4/π) sinh 2r sin δθ].
///
/// Always positive because ln 4/π < 1. With this sign, squeezing at
/// δθ = π/2 lowers κ and δθ = 3π/2 raises it.
pub fn kappa_exact(spectrum: &BathSpectrum, squeeze: &SqueezeParams) -> Result<f64, DecayError> {
    let temp = spectrum.temperature;
    if !(temp > 0.0) {
        return Err(DecayError::NonPositiveTemperature(temp));
    }
    let r2 = 2.0 * squeeze.r;
    Ok(2.0 * spectrum.lambda * temp * (r2.cosh() - 4f64.ln() / PI * r2.sinh() * squeeze.delta_theta.sin()))
}

/// Born–Markov dephasing rate κ' = 2λT (cosh 2r − sinh 2r cos δθ).
pub fn kappa_markov(spectrum: &BathSpectrum, squeeze: &SqueezeParams) -> Result<f64, DecayError> {
    let temp = spectrum.temperature;
    if !(temp > 0.0) {
        return Err(DecayError::NonPositiveTemperature(temp));
    }
    let r2 = 2.0 * squeeze.r;
    Ok(2.0 * spectrum.lambda * temp * (r2.cosh() - r2.sinh() * squeeze.delta_theta.cos()))
}
