//! Parameter sweeps and the figure presets.

use std::fmt;
use std::str::FromStr;

use pinchlink_core::analytics::analytic_snr;
use pinchlink_core::config::from_db;
use pinchlink_core::montecarlo::PhaseRandomization;
use pinchlink_core::{Scheme, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Total transmit power in dBW (0 dB = 1 W).
    TransmitPowerDb,
    Alpha,
    NB,
    KWaveguides,
    NG,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 5] = [
        SweepVariable::TransmitPowerDb,
        SweepVariable::Alpha,
        SweepVariable::NB,
        SweepVariable::KWaveguides,
        SweepVariable::NG,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::TransmitPowerDb => "transmit_power_db",
            SweepVariable::Alpha => "alpha",
            SweepVariable::NB => "n_b",
            SweepVariable::KWaveguides => "k_waveguides",
            SweepVariable::NG => "n_g",
        }
    }

    /// Copy of `cfg` with this variable set to `value`.
    pub fn apply(self, cfg: &SystemConfig, value: f64) -> AppResult<SystemConfig> {
        let count = || -> AppResult<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(AppError::Config(format!("{} must be a positive integer, got {value}", self.name())))
            }
        };
        let mut out = cfg.clone();
        match self {
            SweepVariable::TransmitPowerDb => out.p_t = from_db(value),
            SweepVariable::Alpha => out.alpha = value,
            SweepVariable::NB => out.n_b = count()?,
            SweepVariable::KWaveguides => {
                out.k = count()?;
                if cfg.l_g_per_waveguide.is_some() {
                    return Err(AppError::Config("cannot sweep K with per-waveguide distances set".into()));
                }
            }
            SweepVariable::NG => out.n_g = count()?,
        }
        out.validate()?;
        Ok(out)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| AppError::Config(format!("unknown sweep variable {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepRange {
    /// `start, start + step, ...` up to and including `stop`.
    Linear { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl SweepRange {
    pub fn validate(&self) -> AppResult<()> {
        match self {
            SweepRange::Linear { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(AppError::Config(format!("sweep step must be positive, got {step}")));
                }
                if !(start.is_finite() && stop.is_finite() && stop >= start) {
                    return Err(AppError::Config(format!("empty sweep range {start}..{stop}")));
                }
            }
            SweepRange::List(v) => {
                if v.is_empty() {
                    return Err(AppError::Config("empty sweep value list".into()));
                }
                if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                    return Err(AppError::Config(format!("non-finite sweep value {x}")));
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            SweepRange::Linear { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                // multiply rather than accumulate, then trim float noise
                (0..n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
            }
            SweepRange::List(v) => v.clone(),
        }
    }
}

impl FromStr for SweepRange {
    type Err = AppError;

    /// `start:stop:step` or a comma-separated list.
    fn from_str(s: &str) -> AppResult<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| AppError::Config(format!("bad number {t:?} in range {s:?}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [a, b, c] => SweepRange::Linear { start: num(a)?, stop: num(b)?, step: num(c)? },
            [_] => SweepRange::List(s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<AppResult<_>>()?),
            _ => return Err(AppError::Config(format!("range {s:?} is neither start:stop:step nor a list"))),
        };
        range.validate()?;
        Ok(range)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub schemes: Vec<Scheme>,
    pub mc_enabled: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> AppResult<()> {
        if self.schemes.is_empty() {
            return Err(AppError::Config("sweep needs at least one scheme".into()));
        }
        self.range.validate()
    }
}

/// Parses a comma-separated scheme list; an empty string gives an empty list.
pub fn parse_schemes(s: &str) -> AppResult<Vec<Scheme>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Scheme>().map_err(|_| AppError::Config(format!("unknown scheme {t:?}"))))
        .collect()
}

/// One sweep with its fixed parameters and output file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepJob {
    pub label: String,
    pub spec: SweepSpec,
    pub cfg: SystemConfig,
}

pub const PRESETS: [&str; 5] = ["fig4", "fig5", "fig6", "fig7", "fig8"];

/// Path-loss exponents compared in the K and N_G sweeps.
pub const PRESET_ALPHAS: [f64; 2] = [2.4, 2.0];

/// Expands a preset into its sweeps on top of `base`.
pub fn preset(name: &str, base: &SystemConfig, mc_enabled: bool) -> AppResult<Vec<SweepJob>> {
    let linear = |start, stop, step| SweepRange::Linear { start, stop, step };
    let job = |label: String, variable, range, cfg: SystemConfig| SweepJob {
        label,
        spec: SweepSpec { variable, range, schemes: Scheme::ALL.to_vec(), mc_enabled },
        cfg,
    };
    let per_alpha = |variable, range: SweepRange| -> Vec<SweepJob> {
        PRESET_ALPHAS
            .iter()
            .map(|&alpha| {
                let cfg = SystemConfig { alpha, ..base.clone() };
                job(format!("{name}_alpha{alpha:.1}"), variable, range.clone(), cfg)
            })
            .collect()
    };
    let jobs = match name {
        "fig4" => vec![job(name.into(), SweepVariable::TransmitPowerDb, linear(0.0, 20.0, 1.0), base.clone())],
        "fig5" => vec![job(name.into(), SweepVariable::Alpha, linear(2.0, 4.0, 0.1), base.clone())],
        "fig6" => vec![job(name.into(), SweepVariable::NB, linear(1.0, 128.0, 1.0), base.clone())],
        "fig7" => per_alpha(SweepVariable::KWaveguides, linear(1.0, 64.0, 1.0)),
        "fig8" => per_alpha(SweepVariable::NG, linear(1.0, 32.0, 1.0)),
        _ => {
            return Err(AppError::Config(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(jobs)
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub variable: SweepVariable,
    pub value: f64,
    pub analytic_snr_db: f64,
    pub mc_snr_db: Option<f64>,
    pub mc_stderr_db: Option<f64>,
    pub trials: Option<u64>,
    pub seed: u64,
}

/// Runs every point of `job` in order. Rows are point-major, schemes in
/// the order given by the spec.
pub fn run_sweep(job: &SweepJob, trials: u64, seed: u64, mode: PhaseRandomization) -> AppResult<Vec<SweepRow>> {
    job.spec.validate()?;
    let mut rows = Vec::new();
    for value in job.spec.range.points() {
        let cfg = job.spec.variable.apply(&job.cfg, value)?;
        let d = cfg.distances();
        let mc = job.spec.mc_enabled.then(|| parallel::estimate_all(&cfg, trials, seed, mode));
        for &scheme in &job.spec.schemes {
            let est = mc.map(|m| m[Scheme::ALL.iter().position(|&s| s == scheme).expect("scheme in ALL")]);
            rows.push(SweepRow {
                scheme,
                variable: job.spec.variable,
                value,
                analytic_snr_db: analytic_snr(scheme, &cfg, &d).snr_db,
                mc_snr_db: est.map(|e| e.mean_db()),
                mc_stderr_db: est.map(|e| e.std_error_db()),
                trials: est.map(|e| e.trials),
                seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_points_include_stop() {
        let p = "2:4:0.1".parse::<SweepRange>().unwrap().points();
        assert_eq!(p.len(), 21);
        assert_eq!(p[3], 2.3);
        assert_eq!(*p.last().unwrap(), 4.0);
        assert_eq!("1,2, 8".parse::<SweepRange>().unwrap().points(), vec![1.0, 2.0, 8.0]);
    }

    #[test]
    fn bad_ranges_are_config_errors() {
        for s in ["1:2:0", "3:1:1", "", "a:b:c", "1:2"] {
            assert!(s.parse::<SweepRange>().is_err(), "{s}");
        }
    }

    #[test]
    fn counts_must_be_integral() {
        let cfg = SystemConfig::default();
        assert!(SweepVariable::NB.apply(&cfg, 2.5).is_err());
        assert!(SweepVariable::NG.apply(&cfg, 0.0).is_err());
        assert_eq!(SweepVariable::KWaveguides.apply(&cfg, 7.0).unwrap().k, 7);
        assert!((SweepVariable::TransmitPowerDb.apply(&cfg, 20.0).unwrap().p_t - 100.0).abs() < 1e-12);
    }

    #[test]
    fn empty_scheme_list_is_rejected() {
        assert!(parse_schemes("").unwrap().is_empty());
        let job = SweepJob {
            label: "x".into(),
            spec: SweepSpec { variable: SweepVariable::Alpha, range: SweepRange::List(vec![2.0]), schemes: vec![], mc_enabled: false },
            cfg: SystemConfig::default(),
        };
        assert!(matches!(run_sweep(&job, 1, 0, PhaseRandomization::Direct), Err(AppError::Config(_))));
    }

    #[test]
    fn presets_expand() {
        let base = SystemConfig::default();
        for name in PRESETS {
            let jobs = preset(name, &base, false).unwrap();
            assert!(!jobs.is_empty());
        }
        let fig7 = preset("fig7", &base, false).unwrap();
        assert_eq!(fig7.iter().map(|j| j.label.as_str()).collect::<Vec<_>>(), ["fig7_alpha2.4", "fig7_alpha2.0"]);
        assert_eq!(fig7[1].cfg.alpha, 2.0);
        assert!(preset("fig9", &base, false).is_err());
    }

    #[test]
    fn analytic_rows_leave_mc_columns_empty() {
        let jobs = preset("fig4", &SystemConfig::default(), false).unwrap();
        let rows = run_sweep(&jobs[0], 100, 1, PhaseRandomization::Direct).unwrap();
        assert_eq!(rows.len(), 21 * 4);
        assert!(rows.iter().all(|r| r.mc_snr_db.is_none() && r.trials.is_none()));
    }
}
