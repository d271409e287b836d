//! Power splits and transmit weights for the four transmission schemes.
//!
//! Waveguide weights carry only power by default: the phase a waveguide port
//! needs is produced physically by where its pinching antennas sit, so the
//! digital weight stays real and nonnegative ([`PhaseMode::Placement`]).
//! [`PhaseMode::Digital`] applies the same phases as complex weights, which
//! is handy for checking the two routes against each other.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::channel::{BsChannel, JointChannel};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::phase_distance;
use crate::{PHASE_TOLERANCE, UNIT_NORM_TOLERANCE};

/// BS-PAS cooperation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Conventional baseline: all power on the BS array, no waveguides.
    BsOnly,
    /// Standalone deployment: independent waveguide units, equal power.
    Sd,
    /// Semi-cooperative: waveguides co-phased with each other.
    Scd,
    /// Full-cooperative: joint MRT over the BS and every waveguide.
    Fcd,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::BsOnly, Scheme::Sd, Scheme::Scd, Scheme::Fcd];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::BsOnly => "bs_only",
            Scheme::Sd => "sd",
            Scheme::Scd => "scd",
            Scheme::Fcd => "fcd",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs_only" | "bs-only" | "bsonly" | "bo" => Ok(Scheme::BsOnly),
            "sd" => Ok(Scheme::Sd),
            "scd" => Ok(Scheme::Scd),
            "fcd" => Ok(Scheme::Fcd),
            other => Err(Error::InvalidConfig(alloc::format!("unknown scheme `{other}`"))),
        }
    }
}

/// How waveguide phase corrections are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// Phases come from antenna placement; digital weights are real.
    #[default]
    Placement,
    /// Phases are applied as complex digital weights.
    Digital,
}

/// Unit-norm weight vector of length `N_B + K`, BS block first.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub scheme: Scheme,
    pub weights: Vec<Complex64>,
}

impl Beamformer {
    pub fn new(scheme: Scheme, weights: Vec<Complex64>) -> Result<Self> {
        let bf = Self { scheme, weights };
        let n = bf.norm();
        if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::NonUnitBeamformer(n));
        }
        Ok(bf)
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Share of the total transmit power given to the BS array and to each
/// waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub bs_fraction: f64,
    pub waveguide_fractions: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(bs_fraction: f64, waveguide_fractions: Vec<f64>) -> Result<Self> {
        let total = bs_fraction + waveguide_fractions.iter().sum::<f64>();
        let nonneg = bs_fraction >= 0.0 && waveguide_fractions.iter().all(|&f| f >= 0.0);
        if !nonneg || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(alloc::format!(
                "power fractions must be nonnegative and sum to 1, got {total}"
            )));
        }
        Ok(Self { bs_fraction, waveguide_fractions })
    }

    pub fn waveguide_total(&self) -> f64 {
        self.waveguide_fractions.iter().sum()
    }
}

/// Port gains p_k = η N_G / L_k^β for the configured distances.
pub fn port_gains(cfg: &SystemConfig) -> Vec<f64> {
    let eta_ng = cfg.eta() * cfg.n_g as f64;
    cfg.distances().iter().map(|d| eta_ng / d.powf(cfg.beta)).collect()
}

/// RF-chain-proportional power split. FCD is rejected because its split
/// depends on the channel realization.
pub fn static_power_allocation(scheme: Scheme, cfg: &SystemConfig) -> Result<PowerAllocation> {
    let n_b = cfg.n_b as f64;
    let k = cfg.k as f64;
    let chains = n_b + k;
    match scheme {
        Scheme::BsOnly => PowerAllocation::new(1.0, vec![0.0; cfg.k]),
        Scheme::Sd => PowerAllocation::new(n_b / chains, vec![1.0 / chains; cfg.k]),
        Scheme::Scd => {
            let pool = k / chains;
            let split = scd_waveguide_weights(&port_gains(cfg))?;
            PowerAllocation::new(n_b / chains, split.iter().map(|w| pool * w).collect())
        }
        Scheme::Fcd => Err(Error::UnsupportedScheme("fcd")),
    }
}

/// Optimal split of the waveguide pool for coherently combined ports:
/// w_k = p_k / Σp, which achieves (Σ √(p_k w_k))² = Σ p_k.
pub fn scd_waveguide_weights(gains: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = gains.iter().find(|&&p| !(p > 0.0 && p.is_finite())) {
        return Err(Error::NonPositiveGain(bad));
    }
    let total: f64 = gains.iter().sum();
    Ok(gains.iter().map(|p| p / total).collect())
}

/// Coherent combining gain (Σ √(p_k w_k))² of a pool split.
pub fn coherent_gain(gains: &[f64], weights: &[f64]) -> f64 {
    let s: f64 = gains.iter().zip(weights).map(|(p, w)| (p * w).sqrt()).sum();
    s * s
}

fn bs_mrt_block(bs: &BsChannel, power: f64) -> Result<Vec<Complex64>> {
    let norm = bs.norm_sqr().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroChannel);
    }
    let a = power.sqrt() / norm;
    Ok(bs.coefficients.iter().map(|h| h.conj() * a).collect())
}

/// BS-only baseline: MRT on the BS array, zero weight on the `k` waveguides.
pub fn make_bs_only_beamformer(bs: &BsChannel, k: usize) -> Result<Beamformer> {
    let mut w = bs_mrt_block(bs, 1.0)?;
    w.resize(bs.len() + k, Complex64::new(0.0, 0.0));
    Beamformer::new(Scheme::BsOnly, w)
}

/// SD: MRT with power N_B/(N_B+K) on the BS, √(1/(N_B+K)) on every waveguide.
pub fn make_sd_beamformer(bs: &BsChannel, cfg: &SystemConfig) -> Result<Beamformer> {
    let chains = (bs.len() + cfg.k) as f64;
    let mut w = bs_mrt_block(bs, bs.len() as f64 / chains)?;
    w.extend(core::iter::repeat_n(Complex64::new((1.0 / chains).sqrt(), 0.0), cfg.k));
    Beamformer::new(Scheme::Sd, w)
}

/// SCD: MRT with power N_B/(N_B+K) on the BS and the waveguide pool
/// K/(N_B+K) split in proportion to the port gains.
///
/// `gains` are the port amplitudes √(η N_G / L_k^β) and `anchors` the φ_k.
/// In [`PhaseMode::Placement`] the anchors must already be equal modulo 2π.
pub fn make_scd_beamformer(
    bs: &BsChannel,
    gains: &[f64],
    anchors: &[f64],
    mode: PhaseMode,
) -> Result<Beamformer> {
    if gains.len() != anchors.len() {
        return Err(Error::DimensionMismatch { expected: gains.len(), got: anchors.len() });
    }
    let k = gains.len();
    let chains = (bs.len() + k) as f64;
    let pool = k as f64 / chains;
    let p: Vec<f64> = gains.iter().map(|g| g * g).collect();
    let split = scd_waveguide_weights(&p)?;

    let mut w = bs_mrt_block(bs, bs.len() as f64 / chains)?;
    match mode {
        PhaseMode::Placement => {
            for (index, &a) in anchors.iter().enumerate().skip(1) {
                let error = phase_distance(a, anchors[0]);
                if error > PHASE_TOLERANCE {
                    return Err(Error::MisalignedAnchors { index, error });
                }
            }
            w.extend(split.iter().map(|s| Complex64::new((pool * s).sqrt(), 0.0)));
        }
        PhaseMode::Digital => {
            let phi1 = anchors.first().copied().unwrap_or(0.0);
            w.extend(
                split
                    .iter()
                    .zip(anchors)
                    .map(|(s, phi)| Complex64::from_polar((pool * s).sqrt(), -(phi1 - phi))),
            );
        }
    }
    Beamformer::new(Scheme::Scd, w)
}

/// FCD: joint MRT w = h^H / ‖h‖, so h·w = ‖h‖.
pub fn make_fcd_beamformer(h: &JointChannel) -> Result<Beamformer> {
    let norm = h.norm_sqr().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroChannel);
    }
    Beamformer::new(Scheme::Fcd, h.vector.iter().map(|v| v.conj() / norm).collect())
}

/// Average FCD power split over fading, with E‖h̃_B‖² = N_B:
/// BS gets N_B / (N_B + N_G Σ L_B^α/L_k^β), waveguide k gets the rest in
/// proportion to 1/L_k^β.
pub fn fcd_average_power_ratios(cfg: &SystemConfig) -> Result<PowerAllocation> {
    let n_b = cfg.n_b as f64;
    let n_g = cfg.n_g as f64;
    let lb = cfg.l_b.powf(cfg.alpha);
    let lk: Vec<f64> = cfg.distances().iter().map(|d| d.powf(cfg.beta)).collect();
    let bs = n_b / (n_b + n_g * lk.iter().map(|l| lb / l).sum::<f64>());
    let wg: Vec<f64> = lk
        .iter()
        .map(|&l| n_g / (n_b * l / lb + n_g * lk.iter().map(|m| l / m).sum::<f64>()))
        .collect();
    // the closed forms sum to one only up to rounding; renormalize the tail
    let total = bs + wg.iter().sum::<f64>();
    PowerAllocation::new(bs / total, wg.iter().map(|w| w / total).collect())
}
