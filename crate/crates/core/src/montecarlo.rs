//! Monte-Carlo estimation of average received SNR and statistical checks of
//! the closed forms.
//!
//! Every trial owns its random stream: a ChaCha8 generator keyed by the run
//! seed with the trial index as stream id. Trials are grouped into chunks of
//! [`CHUNK_SIZE`]; each chunk is accumulated in trial order and the chunk
//! moments are merged by [`tree_reduce`]. The serial driver here and any
//! parallel driver that computes the same chunks therefore agree bit for bit.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::beamforming::{
    coherent_gain, make_bs_only_beamformer, make_fcd_beamformer, make_scd_beamformer, make_sd_beamformer,
    scd_waveguide_weights, PhaseMode, Scheme,
};
use crate::channel::{channel_gain, sample_bs_channel, waveguide_gain, waveguide_port, JointChannel};
use crate::config::SystemConfig;
use crate::geometry::wrap_phase;
use crate::stats::{ks_critical_value, ks_statistic, tree_reduce, Moments};

const TWO_PI: f64 = 2.0 * PI;

/// Trials per reduction chunk.
pub const CHUNK_SIZE: u64 = 1024;

/// Significance level of the KS uniformity test.
pub const KS_LEVEL: f64 = 0.01;

/// Agreement band, in standard errors, between an empirical mean and its
/// closed form.
pub const SIGMA_BAND: f64 = 3.0;

/// How the random waveguide phases of a trial are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRandomization {
    /// φ_k ~ U(0, 2π) directly.
    #[default]
    Direct,
    /// L_k ~ U(L_G − λ/2, L_G + λ/2) and φ_k = 2π L_k / λ mod 2π.
    DistanceJitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub scheme: Scheme,
    pub mean_snr_linear: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_moments(scheme: Scheme, m: Moments, seed: u64) -> Self {
        Self { scheme, mean_snr_linear: m.mean, std_error: m.std_error(), trials: m.n, seed }
    }

    pub fn mean_db(&self) -> f64 {
        crate::config::to_db(self.mean_snr_linear)
    }

    /// Standard error mapped to dB to first order: (10 / ln 10)·σ/μ.
    pub fn std_error_db(&self) -> f64 {
        10.0 / core::f64::consts::LN_10 * self.std_error / self.mean_snr_linear
    }

    /// `|mean − reference| ≤ 3σ`.
    pub fn agrees_with(&self, reference: f64) -> bool {
        within_band(self.mean_snr_linear, self.std_error, reference)
    }
}

fn within_band(mean: f64, se: f64, reference: f64) -> bool {
    // a zero-variance estimator still carries rounding
    let slack = 1e-12 * reference.abs().max(mean.abs());
    (mean - reference).abs() <= SIGMA_BAND * se + slack
}

/// Resultant G e^{−jΩ} = Σ a_k e^{−jφ_k} of a set of waveguide phasors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorSum {
    pub magnitude: f64,
    /// Ω in `[0, 2π)`.
    pub angle: f64,
}

impl PhasorSum {
    pub fn new(amplitudes: &[f64], phases: &[f64]) -> Self {
        let z: Complex64 = amplitudes.iter().zip(phases).map(|(&a, &p)| Complex64::from_polar(a, -p)).sum();
        Self { magnitude: z.norm(), angle: wrap_phase(-z.arg()) }
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws the waveguide phases and distances of one trial.
fn draw_waveguides<R: Rng>(cfg: &SystemConfig, mode: PhaseRandomization, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let base = cfg.distances();
    match mode {
        PhaseRandomization::Direct => {
            let phases = (0..cfg.k).map(|_| rng.random_range(0.0..TWO_PI)).collect();
            (base, phases)
        }
        PhaseRandomization::DistanceJitter => {
            let lambda = cfg.lambda();
            let d: Vec<f64> = base.iter().map(|&l| l + lambda * (rng.random::<f64>() - 0.5)).collect();
            let phases = d.iter().map(|&l| wrap_phase(TWO_PI * l / lambda)).collect();
            (d, phases)
        }
    }
}

/// Random inputs of one trial, shared by every scheme.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    pub bs: crate::channel::BsChannel,
    pub distances: Vec<f64>,
    /// Waveguide phases as drawn (the SD realization).
    pub phases: Vec<f64>,
}

impl TrialDraw {
    /// Draws h̃_B first, then the waveguide randomness, from the stream of
    /// `(seed, trial)`.
    pub fn sample(cfg: &SystemConfig, mode: PhaseRandomization, seed: u64, trial: u64) -> Self {
        let mut rng = trial_rng(seed, trial);
        let bs = sample_bs_channel(cfg, &mut rng);
        let (distances, phases) = draw_waveguides(cfg, mode, &mut rng);
        Self { bs, distances, phases }
    }

    /// Instantaneous channel gain |h·w|² of `scheme` on this draw.
    ///
    /// SD uses the drawn phases as they are; SCD aligns every waveguide to
    /// the first drawn phase; FCD places every anchor at zero.
    pub fn channel_gain(&self, scheme: Scheme, cfg: &SystemConfig) -> f64 {
        let k = self.distances.len();
        let phases: Vec<f64> = match scheme {
            Scheme::BsOnly | Scheme::Sd => self.phases.clone(),
            Scheme::Scd => alloc::vec![self.phases[0]; k],
            Scheme::Fcd => alloc::vec![0.0; k],
        };
        let ports: Vec<Complex64> =
            self.distances.iter().zip(&phases).map(|(&d, &p)| waveguide_port(d, p, cfg)).collect();
        let h = JointChannel::new(self.bs.clone(), &ports);

        let w = match scheme {
            Scheme::BsOnly => make_bs_only_beamformer(&h.bs, k),
            Scheme::Sd => make_sd_beamformer(&h.bs, cfg),
            Scheme::Scd => {
                let gains: Vec<f64> = self.distances.iter().map(|&d| waveguide_gain(d, cfg)).collect();
                make_scd_beamformer(&h.bs, &gains, &phases, PhaseMode::Placement)
            }
            Scheme::Fcd => make_fcd_beamformer(&h),
        };
        // a CN(0,1) draw is never exactly zero, so construction cannot fail here
        let w = w.expect("beamformer construction on a sampled channel");
        channel_gain(&h, &w).expect("unit-norm beamformer of matching length")
    }
}

/// Instantaneous channel gain |h·w|² of `scheme` in trial `trial`.
///
/// All schemes see the same BS draw and the same waveguide draw for a given
/// `(seed, trial)`.
pub fn trial_channel_gain(scheme: Scheme, cfg: &SystemConfig, mode: PhaseRandomization, seed: u64, trial: u64) -> f64 {
    TrialDraw::sample(cfg, mode, seed, trial).channel_gain(scheme, cfg)
}

/// Channel gains of all four schemes (in [`Scheme::ALL`] order) on one draw.
pub fn trial_channel_gains(cfg: &SystemConfig, mode: PhaseRandomization, seed: u64, trial: u64) -> [f64; 4] {
    let d = TrialDraw::sample(cfg, mode, seed, trial);
    Scheme::ALL.map(|s| d.channel_gain(s, cfg))
}

/// Number of chunks covering `trials`.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(CHUNK_SIZE)
}

/// Trial indices of chunk `chunk`.
pub fn chunk_range(chunk: u64, trials: u64) -> core::ops::Range<u64> {
    let start = chunk * CHUNK_SIZE;
    start..(start + CHUNK_SIZE).min(trials)
}

/// Moments of `f(trial)` over the trials of chunk `chunk`, in trial order.
pub fn chunk_moments<F: Fn(u64) -> f64>(chunk: u64, trials: u64, f: F) -> Moments {
    chunk_range(chunk, trials).map(f).collect()
}

/// Per-component moments of a vector-valued `f` over chunk `chunk`.
pub fn chunk_moments_n<const N: usize, F: Fn(u64) -> [f64; N]>(chunk: u64, trials: u64, f: F) -> [Moments; N] {
    let mut m = [Moments::default(); N];
    for t in chunk_range(chunk, trials) {
        for (acc, x) in m.iter_mut().zip(f(t)) {
            acc.push(x);
        }
    }
    m
}

/// Serial chunked estimate of E{f(trial)}.
pub fn run_moments<F: Fn(u64) -> f64>(trials: u64, f: F) -> Moments {
    let parts: Vec<Moments> = (0..chunk_count(trials)).map(|c| chunk_moments(c, trials, &f)).collect();
    tree_reduce(&parts)
}

/// Reduces per-chunk vector moments component by component.
pub fn reduce_n<const N: usize>(parts: &[[Moments; N]]) -> [Moments; N] {
    core::array::from_fn(|i| {
        let column: Vec<Moments> = parts.iter().map(|p| p[i]).collect();
        tree_reduce(&column)
    })
}

/// Serial chunked estimate of every component of E{f(trial)}.
pub fn run_moments_n<const N: usize, F: Fn(u64) -> [f64; N]>(trials: u64, f: F) -> [Moments; N] {
    let parts: Vec<[Moments; N]> = (0..chunk_count(trials)).map(|c| chunk_moments_n(c, trials, &f)).collect();
    reduce_n(&parts)
}

/// Monte-Carlo average received SNR with direct phase draws.
pub fn estimate_snr(scheme: Scheme, cfg: &SystemConfig, trials: u64, seed: u64) -> McEstimate {
    estimate_snr_with(scheme, cfg, trials, seed, PhaseRandomization::Direct)
}

pub fn estimate_snr_with(
    scheme: Scheme,
    cfg: &SystemConfig,
    trials: u64,
    seed: u64,
    mode: PhaseRandomization,
) -> McEstimate {
    let gamma = cfg.transmit_snr();
    let m = run_moments(trials.max(1), |t| trial_channel_gain(scheme, cfg, mode, seed, t) * gamma);
    McEstimate::from_moments(scheme, m, seed)
}

/// Estimates of all four schemes from one set of draws, in
/// [`Scheme::ALL`] order. Each entry equals the single-scheme estimate bit
/// for bit.
pub fn estimate_all(cfg: &SystemConfig, trials: u64, seed: u64, mode: PhaseRandomization) -> [McEstimate; 4] {
    let gamma = cfg.transmit_snr();
    let m = run_moments_n(trials.max(1), |t| trial_channel_gains(cfg, mode, seed, t).map(|g| g * gamma));
    estimates_from(m, seed)
}

/// Wraps per-scheme moments (in [`Scheme::ALL`] order) as estimates.
pub fn estimates_from(m: [Moments; 4], seed: u64) -> [McEstimate; 4] {
    core::array::from_fn(|i| McEstimate::from_moments(Scheme::ALL[i], m[i], seed))
}

/// Outcome of a KS test against U(0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Draws φ_k ~ U(0, 2π) for the given amplitudes, and tests the resultant
/// angle Ω for uniformity on `[0, 2π)` at the 1% level.
pub fn validate_uniform_phase(amplitudes: &[f64], samples: usize, seed: u64) -> KsOutcome {
    let angles: Vec<f64> = (0..samples as u64)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let phases: Vec<f64> = amplitudes.iter().map(|_| rng.random_range(0.0..TWO_PI)).collect();
            PhasorSum::new(amplitudes, &phases).angle
        })
        .collect();
    let statistic = ks_statistic(&angles, |x| x / TWO_PI);
    let critical_value = ks_critical_value(samples, KS_LEVEL);
    KsOutcome { statistic, critical_value, samples, passed: statistic < critical_value }
}

/// An empirical mean checked against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub empirical: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub passed: bool,
}

impl MeanCheck {
    pub fn new(m: Moments, analytic: f64) -> Self {
        let se = m.std_error();
        Self { empirical: m.mean, std_error: se, analytic, passed: within_band(m.mean, se, analytic) }
    }

    /// Deviation in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            (self.empirical - self.analytic) / self.std_error
        } else {
            0.0
        }
    }
}

/// Checks E{G²} = Σ 1/L_k^β for uniform phases with amplitudes
/// √(1/L_k^β) at the configured distances.
pub fn validate_g_squared(cfg: &SystemConfig, samples: u64, seed: u64) -> MeanCheck {
    let amps: Vec<f64> = cfg.distances().iter().map(|d| (1.0 / d.powf(cfg.beta)).sqrt()).collect();
    let analytic = amps.iter().map(|a| a * a).sum();
    let m = run_moments(samples, |i| {
        let mut rng = trial_rng(seed, i);
        let phases: Vec<f64> = amps.iter().map(|_| rng.random_range(0.0..TWO_PI)).collect();
        let g = PhasorSum::new(&amps, &phases).magnitude;
        g * g
    });
    MeanCheck::new(m, analytic)
}

/// Draws a point uniformly from the probability simplex of dimension `k`.
pub fn random_simplex_point<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

/// True when the proportional split is at least as good as every one of
/// `draws` random simplex splits.
pub fn proportional_split_is_optimal<R: Rng>(gains: &[f64], draws: usize, rng: &mut R) -> bool {
    let Ok(w) = scd_waveguide_weights(gains) else {
        return false;
    };
    let best = coherent_gain(gains, &w);
    let total: f64 = gains.iter().sum();
    if ((best - total) / total).abs() > 1e-12 {
        return false;
    }
    (0..draws).all(|_| coherent_gain(gains, &random_simplex_point(rng, gains.len())) <= best * (1.0 + 1e-12))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    /// Average SD channel gain against its closed form.
    pub sd: MeanCheck,
    /// Average SCD channel gain against its closed form.
    pub scd: MeanCheck,
    /// Mean of the SD cross term ‖h̃_B‖·G·cos Ω, which should vanish.
    pub cross_term: MeanCheck,
    /// Proportional waveguide split beats 1000 random splits.
    pub proportional_split: bool,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.sd.passed && self.scd.passed && self.cross_term.passed && self.proportional_split
    }
}

/// Runs the SD/SCD average-gain checks, the vanishing cross term and the
/// optimal-split check on `cfg` with direct phase draws.
pub fn validate_propositions(cfg: &SystemConfig, trials: u64, seed: u64) -> PropositionReport {
    validate_propositions_with(cfg, trials, seed, PhaseRandomization::Direct)
}

/// As [`validate_propositions`] with a chosen phase randomization. Closed
/// forms are evaluated at the nominal distances.
pub fn validate_propositions_with(
    cfg: &SystemConfig,
    trials: u64,
    seed: u64,
    mode: PhaseRandomization,
) -> PropositionReport {
    use crate::analytics::average_channel_gain;
    let d = cfg.distances();

    let [sd, scd, cross] = run_moments_n(trials.max(1), |t| {
        let draw = TrialDraw::sample(cfg, mode, seed, t);
        let amps: Vec<f64> = draw.distances.iter().map(|x| (1.0 / x.powf(cfg.beta)).sqrt()).collect();
        let s = PhasorSum::new(&amps, &draw.phases);
        [
            draw.channel_gain(Scheme::Sd, cfg),
            draw.channel_gain(Scheme::Scd, cfg),
            draw.bs.norm_sqr().sqrt() * s.magnitude * s.angle.cos(),
        ]
    });

    let gains = crate::beamforming::port_gains(cfg);
    // a stream no trial index reaches
    let mut rng = trial_rng(seed, u64::MAX);

    PropositionReport {
        sd: MeanCheck::new(sd, average_channel_gain(Scheme::Sd, cfg, &d)),
        scd: MeanCheck::new(scd, average_channel_gain(Scheme::Scd, cfg, &d)),
        cross_term: MeanCheck::new(cross, 0.0),
        proportional_split: proportional_split_is_optimal(&gains, 1000, &mut rng),
    }
}
