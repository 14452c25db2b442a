use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {reason} (n = {n}, length = {length})")]
    InvalidGrid { n: usize, length: f64, reason: &'static str },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam { name: &'static str, value: f64, reason: &'static str },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("grid mismatch: {context} (left: n = {left_n}, L = {left_len}; right: n = {right_n}, L = {right_len})")]
    GridMismatch {
        context: &'static str,
        left_n: usize,
        left_len: f64,
        right_n: usize,
        right_len: f64,
    },

    #[error("inverse transform of a Hermitian spectrum left imaginary residue {residue:.3e} (tolerance {tol:.3e})")]
    RealityLoss { residue: f64, tol: f64 },

    #[error("transform self-check failed for size {n}: round-trip error {err:.3e} exceeds {tol:.3e}")]
    TransformHealth { n: usize, err: f64, tol: f64 },

    #[error("time step {dt} violates the stability guard {bound:.6e} for this flow")]
    StabilityGuard { dt: f64, bound: f64 },

    #[error("blow-up detected at step {step} (t = {time:.6e}): {detail}")]
    Blowup { step: usize, time: f64, detail: String },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
