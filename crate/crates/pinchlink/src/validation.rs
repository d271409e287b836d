//! The `validate` report: statistical checks of the closed forms plus the
//! reference numbers that do not reproduce.

use std::fmt;

use pinchlink_core::analytics::{analytic_snr, fcd_gain_coefficient, fcd_over_scd};
use pinchlink_core::channel::sample_bs_channel;
use pinchlink_core::config::SPEED_OF_LIGHT;
use pinchlink_core::geometry::{nearest_phase_position, phase_delay, wrap_phase};
use pinchlink_core::montecarlo::{
    trial_rng, validate_g_squared, validate_propositions_with, validate_uniform_phase, KsOutcome, MeanCheck,
    PhaseRandomization, PropositionReport, KS_LEVEL, SIGMA_BAND,
};
use pinchlink_core::stats::{ks_critical_value, ks_statistic};
use pinchlink_core::{Point3, Scheme, SystemConfig, WaveguideSpec};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::parallel;

/// Samples used by the distribution tests.
pub const KS_SAMPLES: usize = 100_000;

/// Trial count below which the 3σ checks have little power.
pub const MIN_RECOMMENDED_TRIALS: u64 = 10_000;

/// Value of N_B·(V_FCD − 1) quoted in the literature for the reference
/// scenario.
pub const LITERATURE_FCD_COEFFICIENT: f64 = 1224.0;

/// Literature values for the two-waveguide placement example: anchors φ_1,
/// φ_2, the SCD-aligned x of waveguide 2 and the FCD-aligned x of both.
pub const LITERATURE_ANCHORS: [f64; 2] = [2.748, 0.846];
pub const LITERATURE_SCD_X: f64 = 20.017;
pub const LITERATURE_FCD_X: [f64; 2] = [19.975, 19.935];

#[derive(Debug, Clone, Serialize)]
pub struct SchemeAgreement {
    pub scheme: Scheme,
    pub analytic_snr_db: f64,
    pub mc_snr_db: f64,
    pub mc_stderr_db: f64,
    pub z_score: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformPhaseCheck {
    pub k: usize,
    pub amplitudes: String,
    pub outcome: KsOutcome,
}

/// Placement example recomputed for one value of c.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleGeometry {
    pub c: f64,
    pub anchors: [f64; 2],
    pub scd_x: f64,
    pub fcd_x: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancies {
    /// N_B·(V_FCD − 1) at the reference scenario.
    pub fcd_coefficient: f64,
    pub fcd_coefficient_literature: f64,
    /// V_FCD/V_SCD with K = N_B = 64 at the reference scenario.
    pub fcd_over_scd_at_k_equal_nb: f64,
    pub example: Vec<ExampleGeometry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub trials: u64,
    pub seed: u64,
    pub agreement: Vec<SchemeAgreement>,
    pub propositions: PropositionReport,
    pub propositions_jitter: PropositionReport,
    pub uniform_phase: Vec<UniformPhaseCheck>,
    pub g_squared: MeanCheck,
    pub bs_gain_gamma: KsOutcome,
    pub discrepancies: Discrepancies,
}

impl ValidationReport {
    pub fn run(cfg: &SystemConfig, trials: u64, seed: u64) -> Self {
        let trials = trials.max(1);
        let d = cfg.distances();
        let agreement = parallel::estimate_all(cfg, trials, seed, PhaseRandomization::Direct)
            .into_iter()
            .map(|e| {
                let analytic = analytic_snr(e.scheme, cfg, &d).snr_linear;
                let z = if e.std_error > 0.0 { (e.mean_snr_linear - analytic) / e.std_error } else { 0.0 };
                SchemeAgreement {
                    scheme: e.scheme,
                    analytic_snr_db: pinchlink_core::config::to_db(analytic),
                    mc_snr_db: e.mean_db(),
                    mc_stderr_db: e.std_error_db(),
                    z_score: z,
                    passed: e.agrees_with(analytic),
                }
            })
            .collect();

        let port_amps: Vec<f64> = d.iter().map(|l| (1.0 / l.powf(cfg.beta)).sqrt()).collect();
        let mut uniform_phase: Vec<UniformPhaseCheck> = [1usize, 2, 4, 8]
            .into_iter()
            .map(|k| UniformPhaseCheck {
                k,
                amplitudes: "equal".into(),
                outcome: validate_uniform_phase(&vec![1.0; k], KS_SAMPLES, seed),
            })
            .collect();
        uniform_phase.push(UniformPhaseCheck {
            k: cfg.k,
            amplitudes: "configured distances".into(),
            outcome: validate_uniform_phase(&port_amps, KS_SAMPLES, seed),
        });

        Self {
            trials,
            seed,
            agreement,
            propositions: validate_propositions_with(cfg, trials, seed, PhaseRandomization::Direct),
            propositions_jitter: validate_propositions_with(cfg, trials, seed, PhaseRandomization::DistanceJitter),
            uniform_phase,
            g_squared: validate_g_squared(cfg, trials, seed),
            bs_gain_gamma: bs_gain_gamma_test(cfg, KS_SAMPLES, seed),
            discrepancies: discrepancies(),
        }
    }

    pub fn passed(&self) -> bool {
        self.agreement.iter().all(|a| a.passed)
            && self.propositions.passed()
            && self.propositions_jitter.passed()
            && self.uniform_phase.iter().all(|u| u.outcome.passed)
            && self.g_squared.passed
            && self.bs_gain_gamma.passed
    }
}

/// KS test of ‖h̃_B‖² against Gamma(N_B, 1).
pub fn bs_gain_gamma_test(cfg: &SystemConfig, samples: usize, seed: u64) -> KsOutcome {
    let gamma = Gamma::new(cfg.n_b as f64, 1.0).expect("N_B ≥ 1 is a valid shape");
    let xs: Vec<f64> = (0..samples as u64)
        .map(|i| sample_bs_channel(cfg, &mut trial_rng(seed, i)).norm_sqr())
        .collect();
    let statistic = ks_statistic(&xs, |x| gamma.cdf(x));
    let critical_value = ks_critical_value(samples, KS_LEVEL);
    KsOutcome { statistic, critical_value, samples, passed: statistic < critical_value }
}

/// The two-waveguide example: UE at (30, 5, 0), feeds at (0, 0, 10) and
/// (0, 30, 10), references 20 m along +x, 3.5 GHz, n_eff = 1.5.
pub fn example_geometry(c: f64) -> ExampleGeometry {
    let cfg = SystemConfig { c, n_g: 1, k: 2, ..SystemConfig::default() };
    let ue = Point3::new(30.0, 5.0, 0.0);
    let wg = [0.0, 30.0].map(|y| {
        WaveguideSpec::along_x(Point3::new(0.0, y, 10.0), 20.0, 60.0).expect("example waveguide is valid")
    });
    let anchors = wg.map(|w| wrap_phase(phase_delay(w.reference, w.feed, ue, &cfg)));
    let x = |w: &WaveguideSpec, target| {
        nearest_phase_position(w, ue, target, &cfg).expect("example placement is feasible").x
    };
    ExampleGeometry { c, anchors, scd_x: x(&wg[1], anchors[0]), fcd_x: [x(&wg[0], 0.0), x(&wg[1], 0.0)] }
}

pub fn discrepancies() -> Discrepancies {
    let reference = SystemConfig::default();
    let n_b = reference.n_b as f64;
    Discrepancies {
        fcd_coefficient: fcd_gain_coefficient(&reference),
        fcd_coefficient_literature: LITERATURE_FCD_COEFFICIENT,
        fcd_over_scd_at_k_equal_nb: fcd_over_scd(n_b, n_b, reference.n_g as f64, reference.path_loss_ratio()),
        example: vec![example_geometry(3.0e8), example_geometry(SPEED_OF_LIGHT)],
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn mean_line(f: &mut fmt::Formatter<'_>, name: &str, m: &MeanCheck) -> fmt::Result {
    writeln!(
        f,
        "  {name:<28} {:>12.5e} vs {:>12.5e}  z = {:+.2}  {}",
        m.empirical,
        m.analytic,
        m.z_score(),
        verdict(m.passed)
    )
}

fn propositions(f: &mut fmt::Formatter<'_>, title: &str, p: &PropositionReport) -> fmt::Result {
    writeln!(f, "{title}")?;
    mean_line(f, "SD average channel gain", &p.sd)?;
    mean_line(f, "SCD average channel gain", &p.scd)?;
    mean_line(f, "SD cross term", &p.cross_term)?;
    writeln!(f, "  {:<28} {}", "proportional waveguide split", verdict(p.proportional_split))
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation: {} trials, seed {}, bands at {SIGMA_BAND} standard errors", self.trials, self.seed)?;
        writeln!(f, "average SNR, Monte Carlo vs closed form")?;
        for a in &self.agreement {
            writeln!(
                f,
                "  {:<8} {:>8.3} dB vs {:>8.3} dB (± {:.3})  z = {:+.2}  {}",
                a.scheme.name(),
                a.mc_snr_db,
                a.analytic_snr_db,
                a.mc_stderr_db,
                a.z_score,
                verdict(a.passed)
            )?;
        }
        propositions(f, "average gains, uniform phase draws", &self.propositions)?;
        propositions(f, "average gains, distance jitter", &self.propositions_jitter)?;
        writeln!(f, "resultant phase uniformity (KS, 1% level)")?;
        for u in &self.uniform_phase {
            writeln!(
                f,
                "  K = {:<3} {:<22} D = {:.5} < {:.5}  {}",
                u.k,
                u.amplitudes,
                u.outcome.statistic,
                u.outcome.critical_value,
                verdict(u.outcome.passed)
            )?;
        }
        mean_line(f, "E{G^2}", &self.g_squared)?;
        writeln!(
            f,
            "  {:<28} D = {:.5} < {:.5}  {}",
            "BS gain ~ Gamma(N_B, 1)",
            self.bs_gain_gamma.statistic,
            self.bs_gain_gamma.critical_value,
            verdict(self.bs_gain_gamma.passed)
        )?;

        let d = &self.discrepancies;
        writeln!(f, "reference numbers that do not reproduce (informational)")?;
        writeln!(
            f,
            "  N_B*(V_FCD - 1) at the reference scenario: computed {:.2}, literature {:.0}",
            d.fcd_coefficient, d.fcd_coefficient_literature
        )?;
        writeln!(f, "  V_FCD/V_SCD at K = N_B = 64: {:.6} (3 dB)", d.fcd_over_scd_at_k_equal_nb)?;
        for e in &d.example {
            writeln!(
                f,
                "  two-waveguide example, c = {}: anchors {:.3}, {:.3} (literature {:.3}, {:.3}); \
                 SCD x {:.3} (literature {:.3}); FCD x {:.3}, {:.3} (literature {:.3}, {:.3})",
                e.c,
                e.anchors[0],
                e.anchors[1],
                LITERATURE_ANCHORS[0],
                LITERATURE_ANCHORS[1],
                e.scd_x,
                LITERATURE_SCD_X,
                e.fcd_x[0],
                e.fcd_x[1],
                LITERATURE_FCD_X[0],
                LITERATURE_FCD_X[1]
            )?;
        }
        writeln!(f, "overall: {}", verdict(self.passed()))
    }
}
