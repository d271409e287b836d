use alloc::string::String;

/// Errors raised by the models in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("placement infeasible on a waveguide of length {length_limit} m: {reason}")]
    PlacementInfeasible { length_limit: f64, reason: &'static str },

    #[error("antenna {index} is off the common phase by {error:.3e} rad")]
    IncoherentPlacement { index: usize, error: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("beamformer norm {0} is not 1")]
    NonUnitBeamformer(f64),

    #[error("channel is identically zero")]
    ZeroChannel,

    #[error("waveguide {index} anchor differs from waveguide 1 by {error:.3e} rad")]
    MisalignedAnchors { index: usize, error: f64 },

    #[error("scheme {0} has no static power allocation")]
    UnsupportedScheme(&'static str),

    #[error("channel gains must be positive, got {0}")]
    NonPositiveGain(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
