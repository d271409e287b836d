//! Run configuration files.
//!
//! A config is a TOML document whose top-level keys are the [`SystemConfig`]
//! fields (`f_c`, `N_B`, `L_G`, ...) plus an optional `[scenario]` table
//! holding the geometry:
//!
//! ```toml
//! f_c = 3.5e9
//! N_B = 64
//!
//! [scenario]
//! ue = [30.0, 5.0, 0.0]
//!
//! [[scenario.waveguides]]
//! feed = [0.0, 0.0, 10.0]
//! reference = [20.0, 0.0, 10.0]
//! length = 60.0
//! ```
//!
//! Missing system keys take the reference-scenario defaults. Unknown keys
//! anywhere are an error.

use std::path::Path;

use pinchlink_core::{Point3, SystemConfig, WaveguideSpec};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "PINCHLINK_SEED";

fn default_direction() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideEntry {
    pub feed: [f64; 3],
    pub reference: [f64; 3],
    /// Axis direction away from the feed; need not be normalized.
    #[serde(default = "default_direction")]
    pub direction: [f64; 3],
    /// Usable length from the feed, m.
    pub length: f64,
}

impl WaveguideEntry {
    pub fn spec(&self) -> AppResult<WaveguideSpec> {
        Ok(WaveguideSpec::new(
            self.feed.into(),
            self.direction.into(),
            self.reference.into(),
            self.length,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ue: [f64; 3],
    pub waveguides: Vec<WaveguideEntry>,
}

impl Scenario {
    pub fn ue(&self) -> Point3 {
        self.ue.into()
    }

    pub fn specs(&self) -> AppResult<Vec<WaveguideSpec>> {
        self.waveguides.iter().map(WaveguideEntry::spec).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub scenario: Option<Scenario>,
}

impl RunConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| AppError::Config(e.to_string()))?;
        let scenario = table
            .remove("scenario")
            .map(|v| v.try_into::<Scenario>())
            .transpose()
            .map_err(|e| AppError::Config(format!("[scenario]: {e}")))?;

        // overlay the file on the defaults so partial configs work
        let mut merged = toml::Table::try_from(SystemConfig::default()).map_err(|e| AppError::Config(e.to_string()))?;
        merged.extend(table);
        let system: SystemConfig = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| AppError::Config(e.to_string()))?;

        let cfg = Self { system, scenario };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> AppResult<()> {
        self.system.validate()?;
        if let Some(s) = &self.scenario {
            if s.waveguides.len() != self.system.k {
                return Err(AppError::Config(format!(
                    "scenario lists {} waveguides but K = {}",
                    s.waveguides.len(),
                    self.system.k
                )));
            }
            if !s.ue.iter().all(|x| x.is_finite()) {
                return Err(AppError::Config("scenario UE position must be finite".into()));
            }
            s.specs()?;
        }
        Ok(())
    }

    /// Canonical TOML text; parsing it back gives an equal config.
    pub fn to_toml(&self) -> String {
        let mut table = toml::Table::try_from(&self.system).expect("config is representable as TOML");
        if let Some(s) = &self.scenario {
            table.insert("scenario".into(), toml::Value::try_from(s).expect("scenario is representable as TOML"));
        }
        toml::to_string(&table).expect("TOML table serializes")
    }

    /// Applies the seed override precedence: explicit value, then
    /// `PINCHLINK_SEED`, then the file.
    pub fn resolve_seed(&mut self, cli: Option<u64>) -> AppResult<()> {
        let env = match std::env::var(SEED_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| AppError::Config(format!("{SEED_ENV}={v:?} is not a u64")))?,
            ),
            Err(std::env::VarError::NotPresent) => None,
            Err(e) => return Err(AppError::Config(format!("{SEED_ENV}: {e}"))),
        };
        if let Some(seed) = cli.or(env) {
            self.system.seed = seed;
        }
        Ok(())
    }
}
