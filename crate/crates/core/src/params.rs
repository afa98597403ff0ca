//! Parameter types, validation and JSON configuration ingestion.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack on the 2×2 positivity bound |ρ_eg|² ≤ p_e p_g.
const POSITIVITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("{field} must be {requirement} (got {value})")]
    Invalid {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{field} must be a finite number")]
    NonFinite { field: &'static str },
    #[error("coherence exceeds positivity bound: |rho_eg|^2 = {modulus_sq} > p_e p_g = {bound}")]
    Positivity { modulus_sq: f64, bound: f64 },
    #[error("missing required mode parameter `{0}`")]
    MissingMode(&'static str),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

impl ParamError {
    fn invalid(field: &'static str, requirement: &'static str, value: f64) -> Self {
        ParamError::Invalid {
            field,
            requirement,
            value,
        }
    }
}

fn finite(field: &'static str, v: f64) -> Result<f64, ParamError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParamError::NonFinite { field })
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<f64, ParamError> {
    let v = finite(field, v)?;
    if v < 0.0 {
        return Err(ParamError::invalid(field, "≥ 0", v));
    }
    Ok(v)
}

fn positive(field: &'static str, v: f64) -> Result<f64, ParamError> {
    let v = finite(field, v)?;
    if v <= 0.0 {
        return Err(ParamError::invalid(field, "> 0", v));
    }
    Ok(v)
}

/// Reduce an angle to `[0, 2π)`. The result differs from the input by an
/// exact multiple of 2π up to rounding.
pub fn normalize_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Ohmic spectral density J(ω) = λ ω e^{−ω/Ω_c} at temperature T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpectrum {
    pub lambda: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

impl BathSpectrum {
    pub fn new(lambda: f64, omega_c: f64, temperature: f64) -> Result<Self, ParamError> {
        Ok(Self {
            lambda: non_negative("lambda", lambda)?,
            omega_c: positive("omega_c", omega_c)?,
            temperature: non_negative("temperature", temperature)?,
        })
    }

    /// J(ω).
    pub fn density(&self, omega: f64) -> f64 {
        self.lambda * omega * (-omega / self.omega_c).exp()
    }

    /// Dimensionless time τ = Ω_c t.
    pub fn tau(&self, t: f64) -> f64 {
        self.omega_c * t
    }
}

/// Uniform squeezing of every bath mode: strength r and phase offset
/// δθ = θ − 2φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub delta_theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, delta_theta: f64) -> Result<Self, ParamError> {
        Ok(Self {
            r: non_negative("r", r)?,
            delta_theta: normalize_angle(finite("delta_theta", delta_theta)?),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            r: 0.0,
            delta_theta: 0.0,
        }
    }
}

/// Two-level system state: populations and the coherence ρ_eg = ⟨e|ρ|g⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsState {
    pub p_e: f64,
    pub p_g: f64,
    pub coherence: Complex64,
}

impl TlsState {
    pub fn new(p_e: f64, coherence: Complex64) -> Result<Self, ParamError> {
        let p_e = finite("p_e", p_e)?;
        if !(0.0..=1.0).contains(&p_e) {
            return Err(ParamError::invalid("p_e", "in [0, 1]", p_e));
        }
        finite("coherence_re", coherence.re)?;
        finite("coherence_im", coherence.im)?;
        let p_g = 1.0 - p_e;
        let modulus_sq = coherence.norm_sqr();
        let bound = p_e * p_g;
        if modulus_sq > bound * (1.0 + POSITIVITY_SLACK) + f64::EPSILON * f64::EPSILON {
            return Err(ParamError::Positivity { modulus_sq, bound });
        }
        Ok(Self {
            p_e,
            p_g,
            coherence,
        })
    }

    /// Equal mixture with maximal real coherence.
    pub fn plus() -> Self {
        Self {
            p_e: 0.5,
            p_g: 0.5,
            coherence: Complex64::new(0.5, 0.0),
        }
    }
}

/// A single bath mode b_k with coupling g_k = |g_k| e^{iφ_k} and squeezing
/// ξ_k = r_k e^{iθ_k}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub omega_k: f64,
    pub g_abs: f64,
    pub phi_k: f64,
    pub r_k: f64,
    pub theta_k: f64,
}

impl ModeParams {
    pub fn new(omega_k: f64, g_abs: f64, phi_k: f64, r_k: f64, theta_k: f64) -> Result<Self, ParamError> {
        Ok(Self {
            omega_k: positive("omega_k", omega_k)?,
            g_abs: non_negative("g_abs", g_abs)?,
            phi_k: finite("phi_k", phi_k)?,
            r_k: non_negative("r_k", r_k)?,
            theta_k: finite("theta_k", theta_k)?,
        })
    }

    /// Mode with squeezing phase chosen so that θ_k − 2φ_k = δθ.
    pub fn with_squeeze(omega_k: f64, g_abs: f64, phi_k: f64, squeeze: SqueezeParams) -> Result<Self, ParamError> {
        Self::new(omega_k, g_abs, phi_k, squeeze.r, squeeze.delta_theta + 2.0 * phi_k)
    }

    /// μ_k = g_k / ω_k (complex).
    pub fn mu(&self) -> Complex64 {
        Complex64::from_polar(self.g_abs / self.omega_k, self.phi_k)
    }

    /// Δθ_k = θ_k − 2φ_k in `[0, 2π)`.
    pub fn delta_theta(&self) -> f64 {
        normalize_angle(self.theta_k - 2.0 * self.phi_k)
    }

    /// Displacement α_k(t) = μ_k (1 − e^{iω_k t}).
    pub fn alpha(&self, t: f64) -> Complex64 {
        let phase = self.omega_k * t;
        // 1 − e^{iφ} = 2 sin²(φ/2) − i sin φ, avoids cancellation near t = 0
        let s = (0.5 * phase).sin();
        self.mu() * Complex64::new(2.0 * s * s, -phase.sin())
    }

    /// Squeezing parameter ξ_k = r_k e^{iθ_k}.
    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.r_k, self.theta_k)
    }
}

/// Bare qubit splitting. Drops out of the interaction-picture dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TlsParams {
    pub omega_0: f64,
}

/// Raw JSON configuration. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub lambda: f64,
    pub omega_c: f64,
    pub temperature: f64,
    pub r: f64,
    pub delta_theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_0: Option<f64>,
}

impl RawConfig {
    pub fn new(lambda: f64, omega_c: f64, temperature: f64, r: f64, delta_theta: f64) -> Self {
        Self {
            lambda,
            omega_c,
            temperature,
            r,
            delta_theta,
            p_e: None,
            coherence_re: None,
            coherence_im: None,
            omega_k: None,
            g_abs: None,
            phi_k: None,
            omega_0: None,
        }
    }
}

/// Validated, immutable parameter set shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBundle {
    pub spectrum: BathSpectrum,
    pub squeeze: SqueezeParams,
    pub state: TlsState,
    pub tls: TlsParams,
    /// Present only when `omega_k` and `g_abs` were supplied.
    pub mode: Option<ModeParams>,
}

impl ParamBundle {
    pub fn mode(&self) -> Result<ModeParams, ParamError> {
        self.mode.ok_or(ParamError::MissingMode("omega_k"))
    }

    /// Round-trip back to raw form; `validate(b.to_raw()) == b`.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            lambda: self.spectrum.lambda,
            omega_c: self.spectrum.omega_c,
            temperature: self.spectrum.temperature,
            r: self.squeeze.r,
            delta_theta: self.squeeze.delta_theta,
            p_e: Some(self.state.p_e),
            coherence_re: Some(self.state.coherence.re),
            coherence_im: Some(self.state.coherence.im),
            omega_k: self.mode.map(|m| m.omega_k),
            g_abs: self.mode.map(|m| m.g_abs),
            phi_k: self.mode.map(|m| m.phi_k),
            omega_0: Some(self.tls.omega_0),
        }
    }
}

/// Check every invariant and populate derived quantities.
pub fn validate(raw: &RawConfig) -> Result<ParamBundle, ParamError> {
    let spectrum = BathSpectrum::new(raw.lambda, raw.omega_c, raw.temperature)?;
    let squeeze = SqueezeParams::new(raw.r, raw.delta_theta)?;
    let p_e = raw.p_e.unwrap_or(0.5);
    // omitted coherence defaults to the maximal real value √(p_e p_g)
    let coherence = match (raw.coherence_re, raw.coherence_im) {
        (None, None) if (0.0..=1.0).contains(&p_e) => Complex64::new((p_e * (1.0 - p_e)).sqrt(), 0.0),
        (re, im) => Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
    };
    let state = TlsState::new(p_e, coherence)?;
    let tls = TlsParams {
        omega_0: non_negative("omega_0", raw.omega_0.unwrap_or(0.0))?,
    };
    let mode = match (raw.omega_k, raw.g_abs) {
        (None, None) => {
            if raw.phi_k.is_some() {
                return Err(ParamError::MissingMode("omega_k"));
            }
            None
        }
        (Some(w), Some(g)) => Some(ModeParams::with_squeeze(w, g, raw.phi_k.unwrap_or(0.0), squeeze)?),
        (None, Some(_)) => return Err(ParamError::MissingMode("omega_k")),
        (Some(_), None) => return Err(ParamError::MissingMode("g_abs")),
    };
    Ok(ParamBundle {
        spectrum,
        squeeze,
        state,
        tls,
        mode,
    })
}

pub fn parse_config(text: &str) -> Result<ParamBundle, ParamError> {
    let raw: RawConfig = serde_json::from_str(text)?;
    validate(&raw)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ParamBundle, ParamError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParamError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn thermal_vacuum_limit_is_valid() {
        let b = validate(&RawConfig::new(0.1, 1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(b.spectrum.temperature, 0.0);
        assert_eq!(b.state, TlsState::plus());
        assert!(b.mode.is_none());
    }

    #[test]
    fn omitted_coherence_is_maximal_for_the_populations() {
        let raw = RawConfig {
            p_e: Some(1.0),
            ..RawConfig::new(0.1, 1.0, 0.0, 0.0, 0.0)
        };
        assert_eq!(validate(&raw).unwrap().state.coherence, Complex64::new(0.0, 0.0));
        let raw = RawConfig {
            p_e: Some(0.2),
            ..raw
        };
        assert!((validate(&raw).unwrap().state.coherence.re - 0.4).abs() < 1e-15);
    }

    #[test]
    fn negative_lambda_names_the_field() {
        let err = validate(&RawConfig::new(-1.0, 1.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(err.to_string().starts_with("lambda must be ≥ 0"), "{err}");
    }

    #[test]
    fn each_field_is_checked() {
        let cases = [
            (RawConfig::new(0.1, 0.0, 0.0, 0.0, 0.0), "omega_c"),
            (RawConfig::new(0.1, 1.0, -0.1, 0.0, 0.0), "temperature"),
            (RawConfig::new(0.1, 1.0, 0.0, -0.5, 0.0), "r"),
            (RawConfig::new(0.1, 1.0, 0.0, 0.0, f64::NAN), "delta_theta"),
        ];
        for (raw, field) in cases {
            let err = validate(&raw).unwrap_err();
            assert!(err.to_string().starts_with(field), "{err}");
        }
    }

    #[test]
    fn positivity_violation() {
        let mut raw = RawConfig::new(0.1, 1.0, 0.0, 0.0, 0.0);
        raw.p_e = Some(0.5);
        raw.coherence_re = Some(0.6);
        let err = validate(&raw).unwrap_err();
        assert!(matches!(err, ParamError::Positivity { .. }));
        assert!(err.to_string().contains("coherence exceeds positivity bound"));
    }

    #[test]
    fn delta_theta_is_normalized() {
        let b = validate(&RawConfig::new(0.1, 1.0, 0.0, 0.0, 7.0)).unwrap();
        assert!((b.squeeze.delta_theta - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(normalize_angle(-1e-300), 0.0);
    }

    #[test]
    fn mode_keys_must_come_together() {
        let mut raw = RawConfig::new(0.1, 1.0, 0.3, 0.0, 0.0);
        raw.omega_k = Some(1.0);
        assert!(matches!(validate(&raw), Err(ParamError::MissingMode("g_abs"))));
        raw.g_abs = Some(0.1);
        let m = validate(&raw).unwrap().mode.unwrap();
        assert!((m.mu().re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn mode_delta_theta_tracks_coupling_phase() {
        let sq = SqueezeParams::new(0.5, 1.0).unwrap();
        let m = ModeParams::with_squeeze(1.0, 0.1, 0.7, sq).unwrap();
        assert!((m.delta_theta() - 1.0).abs() < 1e-12);
        assert!((m.theta_k - 2.4).abs() < 1e-12);
    }

    #[test]
    fn alpha_at_quarter_period() {
        let m = ModeParams::new(1.0, 0.1, 0.0, 0.0, 0.0).unwrap();
        let a = m.alpha(std::f64::consts::FRAC_PI_2);
        assert!((a.re - 0.1).abs() < 1e-15 && (a.im + 0.1).abs() < 1e-15);
        assert_eq!(m.alpha(0.0), Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn normalization_stays_in_range(x in -1e4f64..1e4) {
            let y = normalize_angle(x);
            prop_assert!((0.0..TAU).contains(&y));
            let k = (x - y) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }

        #[test]
        fn validate_is_idempotent(
            lambda in 0.0f64..5.0, oc in 0.01f64..10.0, t in 0.0f64..10.0,
            r in 0.0f64..3.0, dth in -20.0f64..20.0, pe in 0.0f64..1.0, frac in 0.0f64..1.0,
            phase in 0.0f64..TAU,
        ) {
            let mut raw = RawConfig::new(lambda, oc, t, r, dth);
            let c = Complex64::from_polar(frac * (pe * (1.0 - pe)).sqrt(), phase);
            raw.p_e = Some(pe);
            raw.coherence_re = Some(c.re);
            raw.coherence_im = Some(c.im);
            raw.omega_k = Some(1.0);
            raw.g_abs = Some(0.1);
            let once = validate(&raw).unwrap();
            let twice = validate(&once.to_raw()).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
