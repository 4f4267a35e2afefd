use thiserror::Error;

use crate::codes::{Syndrome, ZMask};

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "depth {depth} codewords hold {support} kets, over the materialization budget of {budget}"
    )]
    DepthUnsupported {
        depth: u32,
        support: usize,
        budget: usize,
    },

    #[error("concatenation depth must be at least 1, got {0}")]
    InvalidDepth(u32),

    #[error("{engine} engine does not support {code} at depth {depth}")]
    ScaleExceeded {
        engine: &'static str,
        code: String,
        depth: u32,
    },

    #[error("residual {mask} has diagonal elements ({zero}, {one}), not ±1")]
    NotClassifiable { mask: ZMask, zero: f64, one: f64 },

    #[error("syndrome {0:?} has no weight ≤ 1 correction")]
    Uncorrectable(Syndrome),

    #[error("logical amplitudes are not normalized: |α|² + |β|² = {0}")]
    NotNormalized(f64),

    #[error("|α|² must lie in [0, 1], got {0}")]
    AlphaSqOutOfRange(f64),

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("invalid δt range [{lo}, {hi}] with {samples} samples")]
    InvalidRange { lo: f64, hi: f64, samples: usize },

    #[error("state widths differ: {0} vs {1} qubits")]
    WidthMismatch(usize, usize),

    #[error("unknown code `{0}`")]
    UnknownCode(String),

    #[error("unknown engine `{0}`")]
    UnknownEngine(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
