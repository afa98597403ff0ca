use crate::params::RawConfig;

use super::PresetArg;

/// Parameter sets behind `--preset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Zero temperature with r = 1, for the coefficient curves and A ± B, A ± C.
    Fig1,
    /// Single thermal mode, μ = 0.1, T/ω = 0.3, r = 0, equal mixture.
    Fig2,
    /// Strongly squeezed bath (r = 1) for the f(t, δθ) landscape.
    Fig3,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fig1 => Preset::Fig1,
            PresetArg::Fig2 => Preset::Fig2,
            PresetArg::Fig3 => Preset::Fig3,
        }
    }
}

impl Preset {
    pub fn config(self) -> RawConfig {
        match self {
            Preset::Fig1 => RawConfig::new(0.1, 1.0, 0.0, 1.0, 0.0),
            Preset::Fig2 => RawConfig {
                p_e: Some(0.5),
                coherence_re: Some(0.5),
                omega_k: Some(1.0),
                g_abs: Some(0.1),
                phi_k: Some(0.0),
                ..RawConfig::new(0.1, 1.0, 0.3, 0.0, 0.0)
            },
            Preset::Fig3 => RawConfig {
                omega_k: Some(1.0),
                g_abs: Some(0.1),
                phi_k: Some(0.0),
                ..RawConfig::new(0.1, 1.0, 1.0, 1.0, 0.0)
            },
        }
    }
}
