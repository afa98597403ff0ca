//! Qubit side of the model: exact dephasing of the 2×2 state, its Bloch
//! vector and entropy, and the Born–Markov dephasing channel.

use num_complex::Complex64;
use thiserror::Error;

use crate::decay::{self, DecayError, Regime};
use crate::exec::Exec;
use crate::params::{BathSpectrum, SqueezeParams, TlsState};

const UNIT_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TlsError {
    #[error("{name} must be ≥ 0 (got {value})")]
    Negative { name: &'static str, value: f64 },
    #[error("Bloch norm must lie in [0, 1] (got {0})")]
    NormRange(f64),
    #[error("entropy rate is singular at u = 0; differentiate the entropy numerically instead")]
    Singular,
    #[error(transparent)]
    Decay(#[from] DecayError),
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, TlsError> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(TlsError::Negative { name, value })
    }
}

/// ρ_S = ½(1 + v·σ). Sign convention: v_y = −2 Im ρ_eg with ρ_eg = ⟨e|ρ|g⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub v_x: f64,
    pub v_y: f64,
    pub v_z: f64,
    pub u: f64,
}

impl BlochVector {
    pub fn new(v_x: f64, v_y: f64, v_z: f64) -> Self {
        Self {
            v_x,
            v_y,
            v_z,
            u: (v_x * v_x + v_y * v_y + v_z * v_z).sqrt(),
        }
    }
}

/// Coherence multiplied by e^{−Γ}; populations untouched.
pub fn evolve_system(initial: &TlsState, gamma_value: f64) -> Result<TlsState, TlsError> {
    non_negative("Γ", gamma_value)?;
    Ok(TlsState {
        coherence: initial.coherence * (-gamma_value).exp(),
        ..*initial
    })
}

pub fn bloch(state: &TlsState) -> BlochVector {
    BlochVector::new(2.0 * state.coherence.re, -2.0 * state.coherence.im, state.p_e - state.p_g)
}

fn x_ln_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// S_S = ln 2 − ½[(1+u) ln(1+u) + (1−u) ln(1−u)] in nats.
pub fn entropy_tls(u: f64) -> Result<f64, TlsError> {
    if !(u >= -UNIT_SLACK && u <= 1.0 + UNIT_SLACK) {
        return Err(TlsError::NormRange(u));
    }
    let u = u.clamp(0.0, 1.0);
    Ok((std::f64::consts::LN_2 - 0.5 * (x_ln_x(1.0 + u) + x_ln_x(1.0 - u))).max(0.0))
}

/// Ṡ_S = −½ u̇ ln((1+u)/(1−u)) with u̇ = v·v̇ / u.
pub fn entropy_rate_tls(v: &BlochVector, v_dot: [f64; 3]) -> Result<f64, TlsError> {
    if v.u > 1.0 + UNIT_SLACK {
        return Err(TlsError::NormRange(v.u));
    }
    if v.u == 0.0 {
        return Err(TlsError::Singular);
    }
    let u_dot = (v.v_x * v_dot[0] + v.v_y * v_dot[1] + v.v_z * v_dot[2]) / v.u;
    if u_dot == 0.0 {
        return Ok(0.0);
    }
    let u = v.u.min(1.0);
    // atanh(u) = ½ ln((1+u)/(1−u))
    Ok(-u_dot * u.atanh())
}

/// 2×2 density matrix in the (|e⟩, |g⟩) basis.
pub type Matrix2 = [[Complex64; 2]; 2];

pub fn density_matrix(state: &TlsState) -> Matrix2 {
    [
        [Complex64::new(state.p_e, 0.0), state.coherence],
        [state.coherence.conj(), Complex64::new(state.p_g, 0.0)],
    ]
}

/// Dephasing generator ½κ'([σ_z ρ, σ_z] + [σ_z, ρ σ_z]), computed by
/// explicit matrix products.
pub fn markov_generator(kappa_prime: f64, rho: &Matrix2) -> Matrix2 {
    let sz = [1.0, -1.0];
    let mul_l = |m: &Matrix2| -> Matrix2 { [[m[0][0] * sz[0], m[0][1] * sz[0]], [m[1][0] * sz[1], m[1][1] * sz[1]]] };
    let mul_r = |m: &Matrix2| -> Matrix2 { [[m[0][0] * sz[0], m[0][1] * sz[1]], [m[1][0] * sz[0], m[1][1] * sz[1]]] };
    let sz_rho = mul_l(rho);
    let rho_sz = mul_r(rho);
    let c1 = {
        let a = mul_r(&sz_rho);
        let b = mul_l(&sz_rho);
        sub(&a, &b)
    };
    let c2 = {
        let a = mul_l(&rho_sz);
        let b = mul_r(&rho_sz);
        sub(&a, &b)
    };
    let mut out = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = 0.5 * kappa_prime * (c1[i][j] + c2[i][j]);
        }
    }
    out
}

fn sub(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// Coherence factor of the Markov channel. The generator reduces to
/// κ'(σ_z ρ σ_z − ρ), so ρ̇_eg = −2κ' ρ_eg.
pub fn markov_decay_factor(kappa_prime: f64, t: f64) -> f64 {
    (-2.0 * kappa_prime * t).exp()
}

pub fn markov_solution(initial: &TlsState, kappa_prime: f64, t: f64) -> Result<TlsState, TlsError> {
    non_negative("κ'", kappa_prime)?;
    non_negative("t", t)?;
    Ok(TlsState {
        coherence: initial.coherence * markov_decay_factor(kappa_prime, t),
        ..*initial
    })
}

/// One row of a system trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemPoint {
    pub t: f64,
    pub gamma: f64,
    pub coherence_abs: f64,
    pub u: f64,
    pub entropy: f64,
    pub entropy_rate: f64,
    pub coherence_markov: Option<f64>,
    pub entropy_markov: Option<f64>,
}

/// Exact trajectory on `times`, with the Markov channel alongside when
/// T > 0. Ṡ_S uses u̇ = −Γ̇ (v_x² + v_y²)/u.
pub fn system_trajectory(
    times: &[f64],
    spectrum: &BathSpectrum,
    squeeze: &SqueezeParams,
    regime: Regime,
    initial: &TlsState,
    exec: Exec,
) -> Result<Vec<SystemPoint>, TlsError> {
    let kappa_prime = if spectrum.temperature > 0.0 {
        Some(decay::kappa_markov(spectrum, squeeze)?)
    } else {
        None
    };
    exec.try_map(times, |&t| {
        let g = decay::gamma(t, spectrum, squeeze, regime)?;
        let g_dot = decay::gamma_rate(t, spectrum, squeeze, regime)?;
        let state = evolve_system(initial, g.max(0.0))?;
        let v = bloch(&state);
        let entropy = entropy_tls(v.u)?;
        let entropy_rate = if v.u == 0.0 || g_dot == 0.0 {
            0.0
        } else {
            entropy_rate_tls(&v, [-g_dot * v.v_x, -g_dot * v.v_y, 0.0])?
        };
        let (coherence_markov, entropy_markov) = match kappa_prime {
            Some(kp) => {
                let m = markov_solution(initial, kp, t)?;
                (Some(m.coherence.norm()), Some(entropy_tls(bloch(&m).u)?))
            }
            None => (None, None),
        };
        Ok(SystemPoint {
            t,
            gamma: g,
            coherence_abs: state.coherence.norm(),
            u: v.u,
            entropy,
            entropy_rate,
            coherence_markov,
            entropy_markov,
        })
    })
}
