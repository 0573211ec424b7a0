use thiserror::Error;

pub type Result<T> = std::result::Result<T, RouterError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouterError {
    #[error("gamma1 must be strictly positive, got {0}")]
    NonPositiveGamma1(f64),

    #[error("{name} must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("closed-form mean numbers are lossless; gamma_c = {0} requires the general scattering route")]
    LossyNotSupported(f64),

    #[error("mean photon number must be finite and non-negative, got {0}")]
    InvalidMeanNumber(f64),

    #[error("input port must be in 1..=4, got {0}")]
    InvalidPort(u8),

    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("quadrature under-resolved: halving the step changed {channel} by {relative_change:e} relative")]
    QuadratureUnderResolved {
        channel: &'static str,
        relative_change: f64,
    },

    #[error("time grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("pulse not contained in time window: {0}")]
    PulseNotContained(String),

    #[error("drives must share one frequency (detunings {0} and {1})")]
    MixedFrequencies(f64, f64),
}

impl RouterError {
    /// Numerical-resolution failures, as opposed to invalid input.
    pub fn is_resolution_failure(&self) -> bool {
        matches!(
            self,
            RouterError::QuadratureUnderResolved { .. }
                | RouterError::GridTooCoarse(_)
                | RouterError::PulseNotContained(_)
        )
    }
}
