//! Closed-form average SNRs and joint transmission gains.
//!
//! All expressions take per-waveguide distances; the equal-distance tables
//! are the special case `distances = [L_G; K]`.

#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::beamforming::Scheme;
use crate::config::{to_db, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub scheme: Scheme,
    pub snr_linear: f64,
    pub snr_db: f64,
}

impl SnrReport {
    pub fn new(scheme: Scheme, snr_linear: f64) -> Self {
        Self { scheme, snr_linear, snr_db: to_db(snr_linear) }
    }
}

/// SNR gains of the joint schemes over the BS-only baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointGains {
    pub v_sd: f64,
    pub v_scd: f64,
    pub v_fcd: f64,
}

/// Parameter values above which SD / SCD beat the BS-only baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// α above which SD wins: L_B^α / L_G^β = N_B / N_G.
    pub alpha_sd: f64,
    /// α above which SCD wins: L_B^α / L_G^β = N_B / (N_G K).
    pub alpha_scd: f64,
    /// N_G above which SD wins: N_B L_G^β / L_B^α.
    pub ng_sd: f64,
    /// N_G above which SCD wins: N_B L_G^β / (K L_B^α).
    pub ng_scd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub v_sd: f64,
    pub v_scd: f64,
    pub v_fcd: f64,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRatios {
    /// lim V_SCD / V_SD as L_B^α/L_G^β → ∞, equal to K.
    pub scd_over_sd_limit: f64,
    /// lim V_FCD / V_SCD as L_B^α/L_G^β → ∞, equal to 1 + N_B/K.
    pub fcd_over_scd_limit: f64,
    /// V_FCD / V_SCD at the configured parameters.
    pub fcd_over_scd_exact: f64,
}

/// Average channel gain E|h·w|² of `scheme` for the given distances.
pub fn average_channel_gain(scheme: Scheme, cfg: &SystemConfig, distances: &[f64]) -> f64 {
    let eta = cfg.eta();
    let n_b = cfg.n_b as f64;
    let n_g = cfg.n_g as f64;
    let k = distances.len() as f64;
    let lb = cfg.l_b.powf(cfg.alpha);
    let inv_sum: f64 = distances.iter().map(|d| 1.0 / d.powf(cfg.beta)).sum();
    match scheme {
        Scheme::BsOnly => eta * n_b / lb,
        Scheme::Sd => eta * n_b * n_b / (lb * (n_b + k)) + eta * n_g / (n_b + k) * inv_sum,
        Scheme::Scd => eta * n_b * n_b / (lb * (n_b + k)) + eta * n_g * k / (n_b + k) * inv_sum,
        Scheme::Fcd => eta * n_b / lb + eta * n_g * inv_sum,
    }
}

/// Average received SNR of `scheme` with per-waveguide `distances`.
pub fn analytic_snr(scheme: Scheme, cfg: &SystemConfig, distances: &[f64]) -> SnrReport {
    SnrReport::new(scheme, average_channel_gain(scheme, cfg, distances) * cfg.transmit_snr())
}

/// Gains as functions of the path-loss ratio r = L_B^α / L_G^β.
pub fn joint_gains(n_b: f64, k: f64, n_g: f64, ratio: f64) -> JointGains {
    let share = n_b / (n_b + k);
    JointGains {
        v_sd: share + n_g * k / (n_b * (n_b + k)) * ratio,
        v_scd: share + n_g * k * k / (n_b * (n_b + k)) * ratio,
        v_fcd: 1.0 + n_g * k / n_b * ratio,
    }
}

/// V_FCD / V_SCD written out directly.
pub fn fcd_over_scd(n_b: f64, k: f64, n_g: f64, ratio: f64) -> f64 {
    1.0 + (n_b * k + n_b * k * n_g * ratio) / (n_b * n_b + k * k * n_g * ratio)
}

pub fn thresholds(cfg: &SystemConfig) -> Thresholds {
    let n_b = cfg.n_b as f64;
    let n_g = cfg.n_g as f64;
    let k = cfg.k as f64;
    let lg = cfg.l_g.powf(cfg.beta);
    let lb = cfg.l_b.powf(cfg.alpha);
    let ln_lb = cfg.l_b.ln();
    Thresholds {
        alpha_sd: (n_b / n_g * lg).ln() / ln_lb,
        alpha_scd: (n_b / (n_g * k) * lg).ln() / ln_lb,
        ng_sd: n_b * lg / lb,
        ng_scd: n_b * lg / (k * lb),
    }
}

/// Joint transmission gains at equal waveguide distances `L_G`, plus the
/// break-even thresholds.
pub fn gain_ratios(cfg: &SystemConfig) -> GainReport {
    let g = joint_gains(cfg.n_b as f64, cfg.k as f64, cfg.n_g as f64, cfg.path_loss_ratio());
    GainReport { v_sd: g.v_sd, v_scd: g.v_scd, v_fcd: g.v_fcd, thresholds: thresholds(cfg) }
}

pub fn asymptotic_ratios(cfg: &SystemConfig) -> AsymptoticRatios {
    let n_b = cfg.n_b as f64;
    let k = cfg.k as f64;
    AsymptoticRatios {
        scd_over_sd_limit: k,
        fcd_over_scd_limit: 1.0 + n_b / k,
        fcd_over_scd_exact: fcd_over_scd(n_b, k, cfg.n_g as f64, cfg.path_loss_ratio()),
    }
}

/// N_B·(V_FCD − 1) = N_G K L_B^α / L_G^β, the coefficient in
/// V_FCD = 1 + coefficient / N_B.
pub fn fcd_gain_coefficient(cfg: &SystemConfig) -> f64 {
    cfg.n_g as f64 * cfg.k as f64 * cfg.path_loss_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn paper() -> SystemConfig {
        SystemConfig { c: 3e8, ..SystemConfig::default() }
    }

    #[test]
    fn reference_snrs_in_db() {
        let cfg = paper();
        let d = cfg.distances();
        let db = |s| analytic_snr(s, &cfg, &d).snr_db;
        assert!((db(Scheme::BsOnly) - 39.51).abs() < 0.005);
        assert!((db(Scheme::Sd) - 40.25).abs() < 0.005);
        assert!((db(Scheme::Scd) - 42.35).abs() < 0.005);
        assert!((db(Scheme::Fcd) - 51.98).abs() < 0.005);
    }

    #[test]
    fn no_waveguides_collapses_to_bs_only() {
        let cfg = paper();
        let bo = analytic_snr(Scheme::BsOnly, &cfg, &[]).snr_linear;
        for s in [Scheme::Sd, Scheme::Scd, Scheme::Fcd] {
            let v = analytic_snr(s, &cfg, &[]).snr_linear;
            assert!(((v - bo) / bo).abs() < 1e-14);
        }
    }

    #[test]
    fn per_waveguide_forms_match_equal_distance_tables() {
        let cfg = paper();
        let eta = cfg.eta();
        let (n_b, k, n_g) = (64.0, 4.0, 8.0);
        let lb = cfg.l_b.powf(cfg.alpha);
        let lg = cfg.l_g.powf(cfg.beta);
        let t = cfg.transmit_snr();
        let table = [
            (Scheme::BsOnly, eta * n_b / lb * t),
            (Scheme::Sd, (eta * n_b * n_b / (lb * (n_b + k)) + eta * n_g * k / (lg * (n_b + k))) * t),
            (Scheme::Scd, (eta * n_b * n_b / (lb * (n_b + k)) + eta * n_g * k * k / (lg * (n_b + k))) * t),
            (Scheme::Fcd, (eta * n_b / lb + eta * n_g * k / lg) * t),
        ];
        for (s, v) in table {
            let got = analytic_snr(s, &cfg, &cfg.distances()).snr_linear;
            assert!(((got - v) / v).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn reference_gains_and_thresholds() {
        let r = gain_ratios(&paper());
        assert!((r.v_sd - 1.186).abs() < 1e-3);
        assert!((r.v_scd - 1.921).abs() < 1e-3);
        assert!((r.v_fcd - 17.65).abs() < 0.02, "{}", r.v_fcd);
        assert!((r.thresholds.alpha_sd - 2.13).abs() < 0.01);
        assert!((r.thresholds.alpha_scd - 1.87).abs() < 0.01);

        let flat = SystemConfig { alpha: 2.0, beta: 2.0, ..paper() };
        let t = thresholds(&flat);
        assert!((t.ng_sd - 16.0).abs() < 1e-12);
        assert!((t.ng_scd - 4.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_toy_threshold_equals_alpha() {
        let cfg = SystemConfig { n_b: 8, n_g: 8, k: 1, l_b: 50.0, l_g: 50.0, alpha: 2.7, beta: 2.7, ..paper() };
        let t = thresholds(&cfg);
        assert!((t.alpha_sd - 2.7).abs() < 1e-12);
        assert!((t.ng_sd - 8.0).abs() < 1e-9);
    }

    #[test]
    fn gains_times_baseline_give_scheme_snr() {
        for (alpha, n_b, k, n_g) in [(2.4, 64, 4, 8), (2.0, 16, 2, 3), (3.5, 128, 9, 1), (2.2, 1, 1, 1)] {
            let cfg = SystemConfig { alpha, n_b, k, n_g, ..paper() };
            let d = cfg.distances();
            let bo = analytic_snr(Scheme::BsOnly, &cfg, &d).snr_linear;
            let g = gain_ratios(&cfg);
            for (s, v) in [(Scheme::Sd, g.v_sd), (Scheme::Scd, g.v_scd), (Scheme::Fcd, g.v_fcd)] {
                let snr = analytic_snr(s, &cfg, &d).snr_linear;
                assert!(((v * bo - snr) / snr).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eq27_matches_gain_quotient_and_is_two_at_k_equal_nb() {
        for (n_b, k, n_g, r) in [(64.0, 4.0, 8.0, 33.3), (10.0, 10.0, 3.0, 0.7), (5.0, 50.0, 2.0, 1e3)] {
            let g = joint_gains(n_b, k, n_g, r);
            assert!((fcd_over_scd(n_b, k, n_g, r) - g.v_fcd / g.v_scd).abs() < 1e-12);
        }
        for n in [1.0, 4.0, 64.0, 300.0] {
            for r in [1e-3, 1.0, 33.3, 1e6] {
                assert!((fcd_over_scd(n, n, 8.0, r) - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_limits() {
        let a = asymptotic_ratios(&paper());
        assert_eq!((a.scd_over_sd_limit, a.fcd_over_scd_limit), (4.0, 17.0));

        let g = joint_gains(64.0, 4.0, 8.0, 1e6);
        assert!((g.v_scd / g.v_sd / 4.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fcd_coefficient_is_about_1066() {
        let c = fcd_gain_coefficient(&paper());
        assert!((c - 1065.67).abs() < 0.01, "{c}");
    }

    #[test]
    fn gains_increase_in_ng_and_ratio() {
        let grid: Vec<f64> = vec![0.01, 0.3, 1.0, 10.0, 1e3];
        for &r in &grid {
            for n_g in 1..20 {
                let a = joint_gains(64.0, 4.0, n_g as f64, r);
                let b = joint_gains(64.0, 4.0, n_g as f64 + 1.0, r);
                let c = joint_gains(64.0, 4.0, n_g as f64, r * 1.5);
                for (x, y, z) in [(a.v_sd, b.v_sd, c.v_sd), (a.v_scd, b.v_scd, c.v_scd), (a.v_fcd, b.v_fcd, c.v_fcd)] {
                    assert!(y > x && z > x);
                }
                assert!(a.v_fcd > 1.0);
            }
        }
    }
}
