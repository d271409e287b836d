//! BS-UE Rayleigh channel, coherent waveguide ports and the joint MISO
//! channel of length `N_B + K`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::beamforming::Beamformer;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{wrap_phase, PlacementResult};
use crate::{PHASE_TOLERANCE, UNIT_NORM_TOLERANCE};

/// Small-scale BS channel h̃_B and its large-scale amplitude √(η / L_B^α).
#[derive(Debug, Clone, PartialEq)]
pub struct BsChannel {
    pub coefficients: Vec<Complex64>,
    pub scale: f64,
}

impl BsChannel {
    pub fn new(coefficients: Vec<Complex64>, cfg: &SystemConfig) -> Self {
        Self { coefficients, scale: bs_scale(cfg) }
    }

    /// ‖h̃_B‖².
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// √(η / L_B^α).
pub fn bs_scale(cfg: &SystemConfig) -> f64 {
    (cfg.eta() / cfg.l_b.powf(cfg.alpha)).sqrt()
}

/// Coherent port amplitude √(η N_G / L^β) of a waveguide at distance `l`.
pub fn waveguide_gain(distance: f64, cfg: &SystemConfig) -> f64 {
    (cfg.eta() * cfg.n_g as f64 / distance.powf(cfg.beta)).sqrt()
}

/// Port coefficient √(η N_G / L^β)·e^{−jφ}.
pub fn waveguide_port(distance: f64, phase: f64, cfg: &SystemConfig) -> Complex64 {
    Complex64::from_polar(waveguide_gain(distance, cfg), -phase)
}

/// Draws `cfg.n_b` i.i.d. CN(0, 1) coefficients (each quadrature has
/// variance 1/2, so every |h̃| is Rayleigh(1/√2)).
pub fn sample_bs_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> BsChannel {
    let coefficients = (0..cfg.n_b).map(|_| sample_cn01(rng)).collect();
    BsChannel::new(coefficients, cfg)
}

pub(crate) fn sample_cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Equivalent RF-port channel of a coherently placed waveguide.
///
/// Requires every antenna phase to be congruent to the anchor; otherwise the
/// per-antenna sum does not collapse and [`Error::IncoherentPlacement`] is
/// returned.
pub fn waveguide_channel(placement: &PlacementResult, distance: f64, cfg: &SystemConfig) -> Result<Complex64> {
    if placement.phases.len() != cfg.n_g {
        return Err(Error::DimensionMismatch { expected: cfg.n_g, got: placement.phases.len() });
    }
    placement.check_congruence(PHASE_TOLERANCE)?;
    Ok(waveguide_port(distance, placement.phase_anchor, cfg))
}

/// The aggregate channel `[√(η/L_B^α) h̃_B, h_G,1, …, h_G,K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointChannel {
    pub bs: BsChannel,
    pub waveguide_gains: Vec<f64>,
    /// φ_k in `[0, 2π)`.
    pub waveguide_phases: Vec<f64>,
    pub vector: Vec<Complex64>,
}

impl JointChannel {
    /// Concatenates the scaled BS channel with the given waveguide ports.
    pub fn new(bs: BsChannel, ports: &[Complex64]) -> Self {
        let mut vector = Vec::with_capacity(bs.len() + ports.len());
        vector.extend(bs.coefficients.iter().map(|c| c * bs.scale));
        vector.extend_from_slice(ports);
        Self {
            waveguide_gains: ports.iter().map(|p| p.norm()).collect(),
            waveguide_phases: ports.iter().map(|p| wrap_phase(-p.arg())).collect(),
            bs,
            vector,
        }
    }

    pub fn n_b(&self) -> usize {
        self.bs.len()
    }

    pub fn k(&self) -> usize {
        self.waveguide_gains.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|c| c.norm_sqr()).sum()
    }

    /// h·w (no conjugation; `w` is a column vector).
    pub fn apply(&self, w: &[Complex64]) -> Result<Complex64> {
        if w.len() != self.vector.len() {
            return Err(Error::DimensionMismatch { expected: self.vector.len(), got: w.len() });
        }
        Ok(self.vector.iter().zip(w).map(|(h, w)| h * w).sum())
    }
}

/// Builds the joint channel, checking the sizes against `cfg`.
pub fn joint_channel(bs: BsChannel, ports: &[Complex64], cfg: &SystemConfig) -> Result<JointChannel> {
    if bs.len() != cfg.n_b {
        return Err(Error::DimensionMismatch { expected: cfg.n_b, got: bs.len() });
    }
    if ports.len() != cfg.k {
        return Err(Error::DimensionMismatch { expected: cfg.k, got: ports.len() });
    }
    Ok(JointChannel::new(bs, ports))
}

/// Instantaneous channel gain |h·w|².
pub fn channel_gain(h: &JointChannel, w: &Beamformer) -> Result<f64> {
    let norm = w.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::NonUnitBeamformer(norm));
    }
    Ok(h.apply(&w.weights)?.norm_sqr())
}

/// Instantaneous received SNR |h·w|² P_t / σ².
pub fn received_snr(h: &JointChannel, w: &Beamformer, cfg: &SystemConfig) -> Result<f64> {
    Ok(channel_gain(h, w)? * cfg.transmit_snr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::Scheme;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_variance_single_antenna() {
        let cfg = SystemConfig { n_b: 1, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sample_bs_channel(&cfg, &mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn gamma_mean_for_64_antennas() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_bs_channel(&cfg, &mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 64.0).abs() < 0.3, "{mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SystemConfig::default();
        let a = sample_bs_channel(&cfg, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_bs_channel(&cfg, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn waveguide_magnitudes() {
        let cfg = SystemConfig { n_g: 1, beta: 2.0, ..Default::default() };
        assert!((waveguide_gain(1.0, &cfg) - cfg.eta().sqrt()).abs() < 1e-15);

        let cfg = SystemConfig { c: 3e8, ..Default::default() };
        assert!((waveguide_gain(100.0, &cfg) - 1.929e-4).abs() < 1e-7);
    }

    #[test]
    fn waveguide_channel_rejects_incoherent_placement() {
        let cfg = SystemConfig { n_g: 2, ..Default::default() };
        let p = PlacementResult {
            positions: vec![Default::default(); 2],
            phases: vec![0.5, 0.5 + 0.1],
            phase_anchor: 0.5,
            integer_offsets: vec![0, 0],
        };
        assert!(matches!(waveguide_channel(&p, 100.0, &cfg), Err(Error::IncoherentPlacement { .. })));
        let p = PlacementResult { phases: vec![0.5, 0.5 + 2.0 * core::f64::consts::PI], ..p };
        let h = waveguide_channel(&p, 100.0, &cfg).unwrap();
        assert!((h.arg() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_layout() {
        let cfg = SystemConfig { n_b: 2, k: 2, ..Default::default() };
        let bs = BsChannel::new(vec![c(1.0, 0.0), c(0.0, 1.0)], &cfg);
        let ports = [c(2.0, 0.0), c(0.0, -3.0)];
        let h = joint_channel(bs.clone(), &ports, &cfg).unwrap();
        assert_eq!(h.vector.len(), 4);
        assert_eq!(h.vector[0], c(bs.scale, 0.0));
        assert_eq!(h.vector[1], c(0.0, bs.scale));
        assert_eq!(&h.vector[2..], &ports);
        assert!((h.waveguide_phases[1] - core::f64::consts::FRAC_PI_2).abs() < 1e-15);

        let only_bs = JointChannel::new(bs.clone(), &[]);
        assert_eq!(only_bs.vector.len(), 2);
        assert!(joint_channel(bs, &ports[..1], &cfg).is_err());
    }

    #[test]
    fn joint_norm_identity() {
        let cfg = SystemConfig { l_g_per_waveguide: Some(vec![60.0, 80.0, 100.0, 140.0]), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bs = sample_bs_channel(&cfg, &mut rng);
        let ports: Vec<_> = cfg.distances().iter().zip([0.1, 2.0, 4.0, 6.0]).map(|(&d, p)| waveguide_port(d, p, &cfg)).collect();
        let expected = cfg.eta() / cfg.l_b.powf(cfg.alpha) * bs.norm_sqr()
            + cfg.distances().iter().map(|d| cfg.eta() * cfg.n_g as f64 / d.powf(cfg.beta)).sum::<f64>();
        let h = joint_channel(bs, &ports, &cfg).unwrap();
        assert!(((h.norm_sqr() - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn snr_mrt_orthogonal_and_rotation() {
        let cfg = SystemConfig { n_b: 1, k: 1, ..Default::default() };
        let bs = BsChannel::new(vec![c(0.3, -0.4)], &cfg);
        let h = JointChannel::new(bs, &[c(1e-4, 2e-4)]);
        let n = h.norm_sqr().sqrt();
        let mrt = Beamformer::new(Scheme::Fcd, h.vector.iter().map(|v| v.conj() / n).collect()).unwrap();
        let snr = received_snr(&h, &mrt, &cfg).unwrap();
        assert!(((snr - h.norm_sqr() * cfg.transmit_snr()) / snr).abs() < 1e-12);

        // orthogonal: w ⟂ h^H means h·w = 0
        let (a, b) = (h.vector[0], h.vector[1]);
        let ortho: Vec<_> = [b, -a].iter().map(|v| v / n).collect();
        let w = Beamformer::new(Scheme::Fcd, ortho).unwrap();
        assert!(received_snr(&h, &w, &cfg).unwrap() < 1e-20 * cfg.transmit_snr());

        let rot = Complex64::from_polar(1.0, 1.234);
        let w2 = Beamformer::new(Scheme::Fcd, mrt.weights.iter().map(|v| v * rot).collect()).unwrap();
        let snr2 = received_snr(&h, &w2, &cfg).unwrap();
        assert!(((snr2 - snr) / snr).abs() < 1e-12);
    }

    #[test]
    fn snr_rejects_non_unit_beamformer() {
        let cfg = SystemConfig { n_b: 1, k: 1, ..Default::default() };
        let h = JointChannel::new(BsChannel::new(vec![c(1.0, 0.0)], &cfg), &[c(1.0, 0.0)]);
        let w = Beamformer { scheme: Scheme::Sd, weights: vec![c(1.0, 0.0), c(1.0, 0.0)] };
        assert!(matches!(received_snr(&h, &w, &cfg), Err(Error::NonUnitBeamformer(_))));
    }
}
