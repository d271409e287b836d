use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pinchlink_core::analytics::{analytic_snr, asymptotic_ratios, fcd_gain_coefficient, gain_ratios};
use pinchlink_core::beamforming::{fcd_average_power_ratios, static_power_allocation};
use pinchlink_core::geometry::{align_fcd, align_scd, PlacementResult};
use pinchlink_core::montecarlo::PhaseRandomization;
use pinchlink_core::{Scheme, SystemConfig};

use crate::config_file::RunConfig;
use crate::error::{exit, AppError, AppResult};
use crate::output::{write_run, RunInputs, TOOL, VERSION};
use crate::sweep::{self, parse_schemes, SweepJob, SweepRange, SweepSpec, SweepVariable};
use crate::validation::{ValidationReport, MIN_RECOMMENDED_TRIALS};

#[derive(Debug, Parser)]
#[command(name = "pinchlink", version, about = "Joint BS / pinching-antenna link analysis and simulation")]
pub struct Cli {
    /// Config file (TOML); defaults to the reference scenario.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for CSV files and manifests.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// RNG seed; overrides PINCHLINK_SEED and the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte-Carlo trials per point; overrides the config file.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,
    /// Skip Monte Carlo and emit closed forms only.
    #[arg(long, global = true)]
    pub no_mc: bool,
    /// How SD waveguide phases are randomized.
    #[arg(long, global = true, value_enum, default_value_t = PhaseMode::Direct)]
    pub phase_mode: PhaseMode,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseMode {
    Direct,
    DistanceJitter,
}

impl From<PhaseMode> for PhaseRandomization {
    fn from(m: PhaseMode) -> Self {
        match m {
            PhaseMode::Direct => PhaseRandomization::Direct,
            PhaseMode::DistanceJitter => PhaseRandomization::DistanceJitter,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form SNRs, gains and power splits; placements if the config has a scenario.
    Analyze,
    /// Monte-Carlo SNR of every scheme next to its closed form.
    Mc,
    /// Sweep one parameter, either a figure preset or a custom range.
    Sweep(SweepArgs),
    /// Statistical validation of the closed forms.
    Validate,
    /// Break-even path-loss exponents and N_G values.
    Thresholds,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// fig4 (power), fig5 (alpha), fig6 (N_B), fig7 (K), fig8 (N_G).
    #[arg(long, conflicts_with_all = ["variable", "range"])]
    pub preset: Option<String>,
    /// transmit_power_db, alpha, n_b, k_waveguides or n_g.
    #[arg(long, requires = "range")]
    pub variable: Option<String>,
    /// start:stop:step or a comma-separated list.
    #[arg(long, requires = "variable")]
    pub range: Option<String>,
    /// Comma-separated schemes.
    #[arg(long, default_value = "bs_only,sd,scd,fcd")]
    pub schemes: String,
}

struct Context {
    run: RunConfig,
    out: Option<PathBuf>,
    trials: u64,
    mc: bool,
    mode: PhaseRandomization,
}

impl Context {
    fn new(cli: &Cli) -> AppResult<Self> {
        let mut run = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        run.resolve_seed(cli.seed)?;
        if let Some(t) = cli.trials {
            if t == 0 {
                return Err(AppError::Config("--trials must be at least 1".into()));
            }
            run.system.trials = t;
        }
        Ok(Self {
            trials: run.system.trials,
            run,
            out: cli.out.clone(),
            mc: !cli.no_mc,
            mode: cli.phase_mode.into(),
        })
    }

    fn cfg(&self) -> &SystemConfig {
        &self.run.system
    }

    fn seed(&self) -> u64 {
        self.run.system.seed
    }

    fn execute(&self, command: &str, job: &SweepJob) -> AppResult<Vec<sweep::SweepRow>> {
        let rows = sweep::run_sweep(job, self.trials, self.seed(), self.mode)?;
        if let Some(dir) = &self.out {
            let run = RunConfig { system: job.cfg.clone(), scenario: self.run.scenario.clone() };
            let inputs = RunInputs {
                tool: TOOL,
                version: VERSION,
                command,
                label: &job.label,
                spec: &job.spec,
                seed: self.seed(),
                trials: self.trials,
                phase_randomization: self.mode,
                config: &run,
            };
            let (csv, _) = write_run(dir, &inputs, &rows)?;
            eprintln!("wrote {}", csv.display());
        }
        Ok(rows)
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG_ERROR } else { exit::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> AppResult<u8> {
    if let Some(n) = cli.threads {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Analyze => analyze(&ctx, false),
        Command::Mc => analyze(&ctx, ctx.mc),
        Command::Sweep(args) => run_sweep(&ctx, args),
        Command::Validate => validate(&ctx),
        Command::Thresholds => thresholds(&ctx),
    }
}

fn single_point(ctx: &Context, label: &str, mc: bool) -> SweepJob {
    SweepJob {
        label: label.into(),
        spec: SweepSpec {
            variable: SweepVariable::TransmitPowerDb,
            range: SweepRange::List(vec![pinchlink_core::config::to_db(ctx.cfg().p_t)]),
            schemes: Scheme::ALL.to_vec(),
            mc_enabled: mc,
        },
        cfg: ctx.cfg().clone(),
    }
}

fn analyze(ctx: &Context, mc: bool) -> AppResult<u8> {
    let cfg = ctx.cfg();
    let placements = match &ctx.run.scenario {
        Some(s) => {
            let wgs = s.specs()?;
            Some((align_scd(&wgs, s.ue(), cfg)?, align_fcd(&wgs, s.ue(), cfg)?, s.ue()))
        }
        None => None,
    };

    let label = if mc { "mc" } else { "analyze" };
    let rows = ctx.execute(label, &single_point(ctx, label, mc))?;
    let mut out = std::io::stdout().lock();
    let w = &mut out;
    let io = |e: std::io::Error| AppError::Write { path: "<stdout>".into(), source: e };

    writeln!(w, "lambda = {:.6} m, lambda_G = {:.6} m, eta = {:.5e}", cfg.lambda(), cfg.lambda_g(), cfg.eta()).map_err(io)?;
    writeln!(w, "transmit SNR = {:.3} dB", pinchlink_core::config::to_db(cfg.transmit_snr())).map_err(io)?;
    writeln!(w, "{:<8} {:>14} {:>14} {:>12}", "scheme", "analytic [dB]", "MC [dB]", "MC stderr").map_err(io)?;
    for r in &rows {
        let mc_val = r.mc_snr_db.map_or("-".to_string(), |v| format!("{v:.3}"));
        let mc_se = r.mc_stderr_db.map_or("-".to_string(), |v| format!("{v:.4}"));
        writeln!(w, "{:<8} {:>14.3} {:>14} {:>12}", r.scheme.name(), r.analytic_snr_db, mc_val, mc_se).map_err(io)?;
    }
    let g = gain_ratios(cfg);
    writeln!(w, "gains over BS-only: V_SD = {:.4}, V_SCD = {:.4}, V_FCD = {:.4}", g.v_sd, g.v_scd, g.v_fcd).map_err(io)?;
    writeln!(w, "N_B*(V_FCD - 1) = {:.2}", fcd_gain_coefficient(cfg)).map_err(io)?;
    let a = asymptotic_ratios(cfg);
    writeln!(
        w,
        "V_FCD/V_SCD = {:.4} (large-ratio limits: V_SCD/V_SD -> {}, V_FCD/V_SCD -> {:.4})",
        a.fcd_over_scd_exact, a.scd_over_sd_limit, a.fcd_over_scd_limit
    )
    .map_err(io)?;
    for s in [Scheme::Sd, Scheme::Scd] {
        let p = static_power_allocation(s, cfg)?;
        writeln!(w, "{} power: BS {:.4}, waveguides {:?}", s.name(), p.bs_fraction, rounded(&p.waveguide_fractions)).map_err(io)?;
    }
    let f = fcd_average_power_ratios(cfg)?;
    writeln!(w, "fcd average power: BS {:.4}, waveguides {:?}", f.bs_fraction, rounded(&f.waveguide_fractions)).map_err(io)?;

    if let Some((scd, fcd, ue)) = placements {
        for (name, set) in [("scd", &scd), ("fcd", &fcd)] {
            writeln!(w, "{name} placement").map_err(io)?;
            for (k, p) in set.iter().enumerate() {
                write_placement(w, k, p, ue).map_err(io)?;
            }
        }
    }
    Ok(exit::SUCCESS)
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e6).round() / 1e6).collect()
}

fn write_placement(w: &mut impl Write, k: usize, p: &PlacementResult, ue: pinchlink_core::Point3) -> std::io::Result<()> {
    let r = p.reference();
    writeln!(
        w,
        "  waveguide {}: reference ({:.4}, {:.4}, {:.4}), anchor {:.6} rad, distance to UE {:.3} m",
        k + 1,
        r.x,
        r.y,
        r.z,
        p.phase_anchor,
        r.distance(ue)
    )?;
    let xs: Vec<String> = p.positions.iter().map(|q| format!("({:.4}, {:.4}, {:.4})", q.x, q.y, q.z)).collect();
    writeln!(w, "    antennas {}", xs.join(" "))
}

fn run_sweep(ctx: &Context, args: &SweepArgs) -> AppResult<u8> {
    let jobs = match (&args.preset, &args.variable, &args.range) {
        (Some(p), _, _) => {
            let mut jobs = sweep::preset(p, ctx.cfg(), ctx.mc)?;
            let schemes = parse_schemes(&args.schemes)?;
            for j in &mut jobs {
                j.spec.schemes = schemes.clone();
            }
            jobs
        }
        (None, Some(v), Some(r)) => {
            let variable: SweepVariable = v.parse()?;
            vec![SweepJob {
                label: format!("sweep_{variable}"),
                spec: SweepSpec {
                    variable,
                    range: r.parse()?,
                    schemes: parse_schemes(&args.schemes)?,
                    mc_enabled: ctx.mc,
                },
                cfg: ctx.cfg().clone(),
            }]
        }
        _ => return Err(AppError::Config("sweep needs --preset or --variable with --range".into())),
    };
    for job in &jobs {
        job.spec.validate()?;
    }
    let mut out = std::io::stdout().lock();
    for job in &jobs {
        let rows = ctx.execute("sweep", job)?;
        if ctx.out.is_none() {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in &rows {
                w.serialize(r).map_err(|e| AppError::Write { path: "<stdout>".into(), source: e.into() })?;
            }
        } else {
            println!("{}: {} rows", job.label, rows.len());
        }
    }
    Ok(exit::SUCCESS)
}

fn validate(ctx: &Context) -> AppResult<u8> {
    if ctx.trials < MIN_RECOMMENDED_TRIALS {
        eprintln!(
            "warning: {} trials give little statistical power; at least {MIN_RECOMMENDED_TRIALS} are recommended",
            ctx.trials
        );
    }
    let report = ValidationReport::run(ctx.cfg(), ctx.trials, ctx.seed());
    print!("{report}");
    if let Some(dir) = &ctx.out {
        std::fs::create_dir_all(dir).map_err(|source| AppError::Write { path: dir.clone(), source })?;
        let path = dir.join("validation.txt");
        std::fs::write(&path, report.to_string()).map_err(|source| AppError::Write { path, source })?;
    }
    if report.passed() {
        Ok(exit::SUCCESS)
    } else {
        Err(AppError::Statistical("one or more checks failed".into()))
    }
}

fn thresholds(ctx: &Context) -> AppResult<u8> {
    let cfg = ctx.cfg();
    let g = gain_ratios(cfg);
    let t = g.thresholds;
    println!("alpha*_SD  = {:.4}  (SD beats BS-only for larger alpha)", t.alpha_sd);
    println!("alpha*_SCD = {:.4}  (SCD beats BS-only for larger alpha)", t.alpha_scd);
    println!("N_G*_SD    = {:.4}", t.ng_sd);
    println!("N_G*_SCD   = {:.4}", t.ng_scd);
    println!("V_SD = {:.4}, V_SCD = {:.4}, V_FCD = {:.4}", g.v_sd, g.v_scd, g.v_fcd);
    let d = cfg.distances();
    for s in Scheme::ALL {
        println!("{:<8} {:.3} dB", s.name(), analytic_snr(s, cfg, &d).snr_db);
    }
    Ok(exit::SUCCESS)
}
