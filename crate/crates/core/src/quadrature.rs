//! Adaptive Gauss–Kronrod quadrature, and the frequency integrals for the
//! decoherence factor and the bath-entropy rate evaluated with it.
//!
//! These integrals are the independent numerical route against which every
//! closed form in [`crate::decay`] and [`crate::bath`] is checked, so they
//! are written straight from the spectral-density integrands and never call
//! the closed forms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::params::{BathSpectrum, SqueezeParams};

// Gauss–Kronrod 7/15 abscissae and weights on [−1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

/// Integrands are patched with their analytic limit below ε = 10⁻⁶ Ω_c.
const ZERO_PATCH: f64 = 1e-6;
/// Upper frequency cutoff in units of Ω_c; the envelope e^{−ω/Ω_c} is 2·10⁻²² there.
const OMEGA_MAX_OVER_OC: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]")]
    Interval { a: f64, b: f64 },
    #[error("tolerance not reached within {subdivisions} subdivisions: best {} ± {:e}", best.value, best.abs_error_estimate)]
    Accuracy { best: QuadResult, subdivisions: usize },
    #[error("integrand is not finite at ω = {0}")]
    NonFinite(f64),
    #[error("time must be ≥ 0 (got {0})")]
    NegativeTime(f64),
    #[error("temperature must be > 0 (got {0})")]
    Temperature(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on panel width, used to resolve oscillations.
    pub max_width: Option<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            max_width: None,
            max_subdivisions: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken on position so the refinement order is deterministic
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Adaptive integration of `f` over `[a, b]` with default options.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate_with(
        f,
        a,
        b,
        &QuadOptions {
            rel_tol,
            abs_tol,
            ..QuadOptions::default()
        },
    )
}

/// Globally adaptive bisection: the panel with the largest |K15 − G7|
/// estimate is split until the summed estimate meets
/// max(abs_tol, rel_tol·|value|).
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::Interval { a, b });
    }
    let initial = match opts.max_width {
        Some(w) if w > 0.0 => ((b - a) / w).ceil().max(1.0) as usize,
        _ => 1,
    };
    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let mut value = 0.0;
    let mut error = 0.0;
    for i in 0..initial {
        let pa = a + width * i as f64;
        let pb = if i + 1 == initial { b } else { a + width * (i + 1) as f64 };
        let (v, e) = gk15(&f, pa, pb)?;
        value += v;
        error += e;
        heap.push(Panel { a: pa, b: pb, value: v, error: e });
    }
    let mut evaluations = 15 * initial;
    let mut splits = 0;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            break;
        }
        if splits >= opts.max_subdivisions {
            // resum for the reported best estimate
            let best: f64 = heap.iter().map(|p| p.value).sum();
            let err: f64 = heap.iter().map(|p| p.error).sum();
            return Err(QuadError::Accuracy {
                best: QuadResult {
                    value: best,
                    abs_error_estimate: err,
                    evaluations,
                },
                subdivisions: splits,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        splits += 1;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // summing once more removes drift from the running updates
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(QuadResult {
        value: panels.iter().map(|p| p.value).sum(),
        abs_error_estimate: panels.iter().map(|p| p.error).sum(),
        evaluations,
    })
}

/// How coth(ω/2T) enters the decoherence integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CothMode {
    /// coth → 1 (zero temperature).
    Unity,
    /// coth → 2T/ω.
    HighT,
    /// Full coth(ω/2T).
    Exact,
}

impl From<crate::decay::Regime> for CothMode {
    fn from(r: crate::decay::Regime) -> Self {
        match r {
            crate::decay::Regime::ZeroT => CothMode::Unity,
            crate::decay::Regime::HighT => CothMode::HighT,
            crate::decay::Regime::Exact => CothMode::Exact,
        }
    }
}

fn oscillation_options(t_eff: f64, omega_c: f64) -> QuadOptions {
    QuadOptions {
        max_width: Some(if t_eff > 0.0 {
            (PI / (4.0 * t_eff)).min(omega_c)
        } else {
            omega_c
        }),
        ..QuadOptions::default()
    }
}

/// Decoherence factor by direct quadrature of
/// Γ(t) = ∫ dω/2π · 4J(ω) coth(ω/2T) (1 − cos ωt)/ω² [cosh 2r − sinh 2r cos(ωt − δθ)].
pub fn gamma_quadrature(
    t: f64,
    spectrum: &BathSpectrum,
    squeeze: &SqueezeParams,
    mode: CothMode,
) -> Result<QuadResult, QuadError> {
    if !(t >= 0.0) {
        return Err(QuadError::NegativeTime(t));
    }
    let temp = spectrum.temperature;
    if mode == CothMode::HighT && !(temp > 0.0) {
        return Err(QuadError::Temperature(temp));
    }
    if t == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let ch = (2.0 * squeeze.r).cosh();
    let sh = (2.0 * squeeze.r).sinh();
    let dth = squeeze.delta_theta;
    let oc = spectrum.omega_c;
    let eps = ZERO_PATCH * oc;
    // thermal factor times ω, finite as ω → 0
    let omega_coth = |w: f64| -> f64 {
        match mode {
            CothMode::Unity => w,
            CothMode::HighT => 2.0 * temp,
            CothMode::Exact if temp == 0.0 => w,
            CothMode::Exact => {
                let x = w / (2.0 * temp);
                if x > 40.0 {
                    w
                } else {
                    w / x.tanh()
                }
            }
        }
    };
    let integrand = |w: f64| -> f64 {
        let bracket = ch - sh * (w * t - dth).cos();
        if w < eps {
            // (1 − cos ωt)/ω² → t²/2 and ω·coth(ω/2T) → 2T (or ω at T = 0)
            let thermal = match mode {
                CothMode::Unity => w,
                CothMode::Exact if temp == 0.0 => w,
                _ => 2.0 * temp,
            };
            return 4.0 * spectrum.lambda * thermal * 0.5 * t * t * bracket / (2.0 * PI);
        }
        let s = (0.5 * w * t).sin();
        let one_minus_cos = 2.0 * s * s;
        // J(ω) coth / ω² = λ e^{−ω/Ω_c} · (ω coth) / ω²
        4.0 * spectrum.lambda * (-w / oc).exp() * omega_coth(w) * one_minus_cos / (w * w) * bracket / (2.0 * PI)
    };
    let opts = oscillation_options(t, oc);
    integrate_with(integrand, 0.0, OMEGA_MAX_OVER_OC * oc, &opts)
}

/// Bath entropy rate by direct quadrature of
/// Ṡ_B = (2/T) ∫ dω/2π · J(ω) {cosh 2r sin ωt − sinh 2r [sin(2ωt − δθ) − sin(ωt − δθ)]}.
pub fn bath_entropy_quadrature(t: f64, spectrum: &BathSpectrum, squeeze: &SqueezeParams) -> Result<QuadResult, QuadError> {
    if !(t >= 0.0) {
        return Err(QuadError::NegativeTime(t));
    }
    let temp = spectrum.temperature;
    if !(temp > 0.0) {
        return Err(QuadError::Temperature(temp));
    }
    if t == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let ch = (2.0 * squeeze.r).cosh();
    let sh = (2.0 * squeeze.r).sinh();
    let dth = squeeze.delta_theta;
    let integrand = |w: f64| -> f64 {
        let brace = ch * (w * t).sin() - sh * ((2.0 * w * t - dth).sin() - (w * t - dth).sin());
        2.0 / temp * spectrum.density(w) * brace / (2.0 * PI)
    };
    let opts = oscillation_options(2.0 * t, spectrum.omega_c);
    integrate_with(integrand, 0.0, OMEGA_MAX_OVER_OC * spectrum.omega_c, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn kronrod_weights_integrate_polynomials_exactly() {
        // K15 is exact to degree 22, G7 to degree 13
        for deg in 0..=22 {
            let f = |x: f64| x.powi(deg);
            let (k, e) = gk15(&f, -1.0, 1.0).unwrap();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((k - exact).abs() < 1e-14, "deg {deg}");
            if deg <= 13 {
                assert!(e < 1e-14, "deg {deg}");
            }
        }
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate_adaptive(f64::sin, 0.0, PI, 1e-12, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        assert!(r.evaluations > 0 && r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn exponential_moment_after_cutoff() {
        let r = integrate_adaptive(|w| w * (-w).exp(), 0.0, 50.0, 1e-12, 1e-14).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn removable_singularity() {
        let f = |w: f64| {
            if w < 1e-6 {
                0.5 - w * w / 24.0
            } else {
                let s = (0.5 * w).sin();
                2.0 * s * s / (w * w)
            }
        };
        let r = integrate_adaptive(f, 0.0, 1.0, 1e-12, 1e-14).unwrap();
        // Σ_k (−1)^k / ((2k+2)! (2k+1)), summed independently
        let mut series = 0.0;
        let mut fact = 2.0;
        for k in 0..20 {
            let kf = k as f64;
            series += if k % 2 == 0 { 1.0 } else { -1.0 } / (fact * (2.0 * kf + 1.0));
            fact *= (2.0 * kf + 3.0) * (2.0 * kf + 4.0);
        }
        assert!((series - 0.486_385_376_235_322_7).abs() < 1e-15);
        assert!((r.value - series).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let f = |w: f64| (w * 13.0).cos() * (-w).exp();
        let a = integrate_adaptive(f, 0.0, 30.0, 1e-10, 1e-14).unwrap();
        let b = integrate_adaptive(f, 0.0, 30.0, 1e-10, 1e-14).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn accuracy_failure_carries_best_estimate() {
        let opts = QuadOptions {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_width: None,
            max_subdivisions: 3,
        };
        match integrate_with(|x: f64| x.sqrt(), 0.0, 1.0, &opts) {
            Err(QuadError::Accuracy { best, subdivisions }) => {
                assert_eq!(subdivisions, 3);
                assert!((best.value - 2.0 / 3.0).abs() < 1e-3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            integrate_adaptive(f64::sin, 1.0, 1.0, 1e-9, 1e-12),
            Err(QuadError::Interval { .. })
        ));
    }

    #[test]
    fn gamma_integral_values() {
        let s = BathSpectrum::new(PI, 1.0, 0.0).unwrap();
        let sq = SqueezeParams::vacuum();
        assert_eq!(gamma_quadrature(0.0, &s, &sq, CothMode::Unity).unwrap().value, 0.0);
        let r = gamma_quadrature(1.0, &s, &sq, CothMode::Unity).unwrap();
        assert!((r.value - LN_2).abs() < 1e-6 * LN_2);
        // T = 0 exact reduces to unity
        let e = gamma_quadrature(1.0, &s, &sq, CothMode::Exact).unwrap();
        assert!((e.value - r.value).abs() < 1e-12);
        assert!(gamma_quadrature(1.0, &s, &sq, CothMode::HighT).is_err());
    }

    #[test]
    fn frozen_exact_reference() {
        // 30-digit reference from an independent arbitrary-precision quadrature
        let golden: serde_json::Value =
            serde_json::from_str(include_str!("../tests/data/gamma_exact_golden.json")).unwrap();
        let s = BathSpectrum::new(golden["lambda"].as_f64().unwrap(), 1.0, golden["temperature"].as_f64().unwrap()).unwrap();
        let sq = SqueezeParams::new(golden["r"].as_f64().unwrap(), golden["delta_theta"].as_f64().unwrap()).unwrap();
        let tau = golden["tau"].as_f64().unwrap();
        let expected = golden["gamma"].as_f64().unwrap();
        let v = gamma_quadrature(tau, &s, &sq, CothMode::Exact).unwrap().value;
        assert!((v - expected).abs() < 1e-8 * expected, "{v} vs {expected}");
    }

    #[test]
    fn upper_cutoff_is_converged() {
        let s = BathSpectrum::new(0.3, 1.0, 2.0).unwrap();
        let sq = SqueezeParams::new(0.5, 1.0).unwrap();
        let t = 3.0;
        let base = gamma_quadrature(t, &s, &sq, CothMode::Exact).unwrap().value;
        let ch = 1f64.cosh();
        let sh = 1f64.sinh();
        let tail = integrate_with(
            |w: f64| {
                let s2 = (0.5 * w * t).sin();
                4.0 * 0.3 * (-w).exp() * w / (w / 4.0).tanh() * 2.0 * s2 * s2 / (w * w) * (ch - sh * (w * t - 1.0).cos())
                    / (2.0 * PI)
            },
            OMEGA_MAX_OVER_OC,
            2.0 * OMEGA_MAX_OVER_OC,
            &oscillation_options(t, 1.0),
        )
        .unwrap()
        .value;
        assert!(tail.abs() < 1e-12 * base);
    }

    #[test]
    fn bath_integral_values() {
        let s = BathSpectrum::new(PI, 1.0, 1.0).unwrap();
        assert_eq!(bath_entropy_quadrature(0.0, &s, &SqueezeParams::vacuum()).unwrap().value, 0.0);
        let r = bath_entropy_quadrature(1.0, &s, &SqueezeParams::vacuum()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6 * 0.5);
        let sq = SqueezeParams::new(1.0, PI).unwrap();
        let r = bath_entropy_quadrature(1.0, &s, &sq).unwrap();
        let expected = 0.5 * 2f64.cosh() + (-0.34) * 2f64.sinh();
        assert!((r.value - expected).abs() < 1e-6 * expected.abs());
        let cold = BathSpectrum::new(PI, 1.0, 0.0).unwrap();
        assert!(bath_entropy_quadrature(1.0, &cold, &sq).is_err());
    }
}
