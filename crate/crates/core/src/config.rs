//! System parameters and the physical quantities derived from them.
//!
//! Everything is linear and SI internally; dB and dBm appear only in the
//! field `noise_density_dbm_hz` and in report boundaries elsewhere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact SI speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of light in m/s.
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { c: SPEED_OF_LIGHT }
    }
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

fn default_trials() -> u64 {
    10_000
}

/// All scalar parameters of the BS + pinching-antenna link.
///
/// Serialized field names are the short symbols used in run configs
/// (`f_c`, `N_B`, `L_G`, ...). Unknown keys are rejected on parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Carrier frequency, Hz.
    #[serde(rename = "f_c")]
    pub carrier_hz: f64,
    /// Effective refractive index of the dielectric waveguide.
    pub n_eff: f64,
    /// Number of BS antennas.
    #[serde(rename = "N_B")]
    pub n_b: usize,
    /// Number of waveguides.
    #[serde(rename = "K")]
    pub k: usize,
    /// Pinching antennas per waveguide.
    #[serde(rename = "N_G")]
    pub n_g: usize,
    /// BS-UE path-loss exponent.
    pub alpha: f64,
    /// Pinching-antenna-to-UE path-loss exponent.
    pub beta: f64,
    /// BS-UE distance, m.
    #[serde(rename = "L_B")]
    pub l_b: f64,
    /// Default reference-antenna-to-UE distance, m.
    #[serde(rename = "L_G")]
    pub l_g: f64,
    /// Optional per-waveguide distances overriding `l_g`.
    #[serde(
        rename = "L_G_per_waveguide",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub l_g_per_waveguide: Option<Vec<f64>>,
    /// Total transmit power, W.
    #[serde(rename = "P_t")]
    pub p_t: f64,
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Speed of light, m/s.
    #[serde(default = "default_c")]
    pub c: f64,
}

impl Default for SystemConfig {
    /// The reference scenario: 3.5 GHz, 64 BS antennas, 4 waveguides with
    /// 8 pinching antennas each, L_B = 200 m, L_G = 100 m, α = 2.4, β = 2,
    /// 1 W over 100 MHz at -170 dBm/Hz.
    fn default() -> Self {
        Self {
            carrier_hz: 3.5e9,
            n_eff: 1.5,
            n_b: 64,
            k: 4,
            n_g: 8,
            alpha: 2.4,
            beta: 2.0,
            l_b: 200.0,
            l_g: 100.0,
            l_g_per_waveguide: None,
            p_t: 1.0,
            noise_density_dbm_hz: -170.0,
            bandwidth_hz: 100e6,
            seed: 0,
            trials: default_trials(),
            c: SPEED_OF_LIGHT,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SystemConfig {
    /// Checks every invariant. `alpha >= beta >= 2` is the usual regime
    /// but only positivity is enforced.
    pub fn validate(&self) -> Result<()> {
        positive("f_c", self.carrier_hz)?;
        positive("c", self.c)?;
        if !(self.n_eff.is_finite() && self.n_eff > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "n_eff must exceed 1, got {}",
                self.n_eff
            )));
        }
        if self.n_b == 0 {
            return Err(Error::InvalidConfig("N_B must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.n_g == 0 {
            return Err(Error::InvalidConfig("N_G must be at least 1".into()));
        }
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("L_B", self.l_b)?;
        positive("L_G", self.l_g)?;
        if let Some(d) = &self.l_g_per_waveguide {
            if d.len() != self.k {
                return Err(Error::InvalidConfig(format!(
                    "L_G_per_waveguide has {} entries, K = {}",
                    d.len(),
                    self.k
                )));
            }
            for &v in d {
                positive("L_G_per_waveguide entry", v)?;
            }
        }
        positive("P_t", self.p_t)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        if !self.noise_density_dbm_hz.is_finite() {
            return Err(Error::InvalidConfig("noise_density_dbm_hz must be finite".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants { c: self.c }
    }

    /// Free-space and guided wavelengths `(λ, λ_G)` in meters.
    pub fn wavelengths(&self) -> Result<(f64, f64)> {
        positive("f_c", self.carrier_hz)?;
        if !(self.n_eff > 1.0) {
            return Err(Error::InvalidConfig("n_eff must exceed 1".into()));
        }
        let lambda = self.c / self.carrier_hz;
        Ok((lambda, lambda / self.n_eff))
    }

    /// Free-space wavelength λ = c / f_c.
    pub fn lambda(&self) -> f64 {
        self.c / self.carrier_hz
    }

    /// Guided wavelength λ_G = λ / n_eff.
    pub fn lambda_g(&self) -> f64 {
        self.lambda() / self.n_eff
    }

    /// Path-loss constant η = c² / (16 π² f_c²) = (λ / 4π)².
    pub fn eta(&self) -> f64 {
        let r = self.c / (4.0 * PI * self.carrier_hz);
        r * r
    }

    /// Noise power σ² in watts: PSD (dBm/Hz) times bandwidth.
    pub fn noise_power(&self) -> f64 {
        10f64.powf((self.noise_density_dbm_hz - 30.0) / 10.0) * self.bandwidth_hz
    }

    /// Transmit SNR P_t / σ².
    pub fn transmit_snr(&self) -> f64 {
        self.p_t / self.noise_power()
    }

    /// Per-waveguide reference-antenna-to-UE distances (length K).
    pub fn distances(&self) -> Vec<f64> {
        match &self.l_g_per_waveguide {
            Some(d) => d.clone(),
            None => vec![self.l_g; self.k],
        }
    }

    /// L_B^α / L_G^β using the scalar L_G.
    pub fn path_loss_ratio(&self) -> f64 {
        self.l_b.powf(self.alpha) / self.l_g.powf(self.beta)
    }
}

/// Linear to dB.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dB to linear.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
