//! Exact failure probabilities for the 7-qubit and 5-qubit codes, plain and
//! concatenated once, under always-on nearest-neighbour σz⊗σz coupling.
//!
//! The crate is organised bottom-up:
//!
//! - [`codes`]: codewords, Z-syndromes and concatenated expansion.
//! - [`phasestate`]: sparse signed superpositions and the diagonal ZZ evolution.
//! - [`recovery`]: error classification, orthogonal correctible sets, and the
//!   brute-force and factorized failure-probability engines.
//! - [`closedform`]: the analytic curves, leading-order coefficients, the
//!   concatenation recursion and its thresholds.
//! - [`curve`]: δt sweeps over any engine.

pub mod closedform;
pub mod codes;
pub mod curve;
mod error;
pub mod phasestate;
pub mod recovery;

pub use codes::{
    build_code, expand_concatenated, z_syndrome, BasisString, Code, CodeKind, ConcatLayout,
    Logical, SignedKet, Syndrome, ZMask,
};
pub use error::{Error, Result};
pub use phasestate::{LogicalAmplitudes, SparseState};
pub use recovery::{Engine, FailureResult, LogicalAction};
