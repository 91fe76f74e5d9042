use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or ambiguous run configuration (unknown unit, missing flag, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the domain of a physics routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Doppler-shifted drive frequency `v·k − ω` vanished.
    #[error("degenerate Doppler denominator: v·k − ω = {0:e}")]
    DegenerateDoppler(f64),

    /// First-order expansion in `v⊥0/c` used outside its validity range.
    #[error("relativistic regime: v⊥0/c = {0:e} exceeds 0.1")]
    Relativistic(f64),

    /// Probe point sits on a node of the Bessel profile.
    #[error("probe point at a node of J_ℓ (|Ψ| = {0:e}); move the probe")]
    Node(f64),

    #[error("quadrature did not converge after {nodes} nodes: last iterates {last:?} and {previous:?}")]
    Quadrature {
        nodes: usize,
        last: (f64, f64),
        previous: (f64, f64),
    },

    #[error("step size underflow at ζ = {0}")]
    StepUnderflow(f64),

    #[error("species file {path}: {message}")]
    Species { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}
