use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pulse duration exceeds total time: 2*tau = {two_tau} > T = {total}")]
    PulseTooLong { two_tau: f64, total: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("unsupported composition: squeeze {0} lies off the fixed squeeze axis")]
    UnsupportedSqueezeAxis(String),

    #[error("truncation too small: dim {dim}, {detail}")]
    Truncation { dim: usize, detail: String },

    #[error("insensitive operating point: |dP/deta| = {slope:e}")]
    InsensitiveOperatingPoint { slope: f64 },

    #[error("alpha = 0: use the squeezing-only sensitivity instead")]
    AlphaZero,

    #[error("HL scaling undefined for n_bar = {n_bar} (needs n_bar > 1)")]
    ScalingUndefined { n_bar: f64 },

    #[error("engine/oracle mismatch: fidelity {fidelity} below 1 - {tolerance:e}")]
    Mismatch { fidelity: f64, tolerance: f64 },
}
