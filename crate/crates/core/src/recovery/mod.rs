//! Ideal Z-error recovery: classification of corrected errors, orthogonal
//! correctible sets, and exact failure probabilities.
//!
//! Recovery is modelled as ideal syndrome measurement followed by a fixed
//! correction. Outcomes with different syndromes decohere; error patterns that
//! share a syndrome (a *sector*) interfere before the success probability is
//! taken. The failure probability is one minus the summed squared overlap of
//! every corrected sector with the initial logical state.

mod brute;
mod decoder;
mod factorized;
mod sets;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{z_syndrome, Code, CodeKind, Logical, Syndrome, ZMask};
use crate::error::{Error, Result};
use crate::phasestate::LogicalAmplitudes;

pub use brute::{failure_probability_brute, BruteEngine};
pub use decoder::outer_correction;
pub use factorized::{failure_probability_factorized, FactorizedEngine};
pub use sets::{
    block_images_orthogonal, embedded_block_diag, nonzero_odd_supports, single_block_orthogonal_set,
};

/// Diagonal elements closer than this to zero count as orthogonal.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalKind {
    I,
    Z,
}

/// Net logical effect of a corrected error: `±I` or `±Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalAction {
    pub kind: LogicalKind,
    /// Sign picked up by `|0_L⟩`.
    pub sign: i8,
}

impl LogicalAction {
    pub const IDENTITY: LogicalAction = LogicalAction {
        kind: LogicalKind::I,
        sign: 1,
    };

    /// Reads the action off the two diagonal elements `⟨0_L|R|0_L⟩`, `⟨1_L|R|1_L⟩`.
    pub fn from_diagonal(mask: ZMask, zero: f64, one: f64) -> Result<Self> {
        let unit = |v: f64| (v.abs() - 1.0).abs() < ORTHOGONALITY_TOLERANCE;
        if !unit(zero) || !unit(one) {
            return Err(Error::NotClassifiable { mask, zero, one });
        }
        let kind = if zero.signum() == one.signum() {
            LogicalKind::I
        } else {
            LogicalKind::Z
        };
        Ok(LogicalAction {
            kind,
            sign: zero.signum() as i8,
        })
    }

    /// `⟨Ψ0| action |Ψ0⟩` for `Ψ0 = α|0_L⟩ + β|1_L⟩`.
    pub fn overlap(&self, amps: &LogicalAmplitudes) -> f64 {
        let base = match self.kind {
            LogicalKind::I => 1.0,
            LogicalKind::Z => amps.imbalance(),
        };
        f64::from(self.sign) * base
    }

    pub fn is_z(&self) -> bool {
        self.kind == LogicalKind::Z
    }
}

impl fmt::Display for LogicalAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { '-' } else { '+' };
        write!(f, "{s}{:?}", self.kind)
    }
}

/// Corrects a depth-1 Z error and reports what the residual does to the codewords.
pub fn classify_z_error(code: &Code, mask: ZMask) -> Result<LogicalAction> {
    let syndrome = z_syndrome(code, mask);
    let correction = code
        .correction(syndrome)
        .ok_or(Error::Uncorrectable(syndrome))?;
    classify_residual(code, mask ^ correction)
}

/// Action of an already-corrected residual on the codewords.
pub(crate) fn classify_residual(code: &Code, residual: ZMask) -> Result<LogicalAction> {
    LogicalAction::from_diagonal(
        residual,
        code.diag_element(Logical::Zero, residual),
        code.diag_element(Logical::One, residual),
    )
}

pub(crate) fn failure_result(
    engine: Engine,
    code: CodeKind,
    depth: u32,
    amps: &LogicalAmplitudes,
    delta_t: f64,
    p_fail: f64,
) -> FailureResult {
    FailureResult {
        delta_t,
        // rounding can leave a few ulps below zero near δt = 0
        p_fail: p_fail.max(0.0),
        engine,
        code,
        depth,
        alpha_sq: amps.alpha_sq(),
    }
}

/// Measurement record that decides which corrected patterns interfere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectorKey {
    pub inner_syndromes: Vec<Syndrome>,
    pub outer_syndrome: Syndrome,
}

impl SectorKey {
    /// Dense index with `bits` bits per syndrome, outer syndrome on top.
    pub fn pack(&self, bits: usize) -> usize {
        let inner = self
            .inner_syndromes
            .iter()
            .enumerate()
            .fold(0usize, |acc, (b, s)| acc | (usize::from(s.0) << (bits * b)));
        inner | (usize::from(self.outer_syndrome.0) << (bits * self.inner_syndromes.len()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    Brute,
    Factorized,
    ClosedForm,
    Perturbative,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::Factorized => "factorized",
            Engine::ClosedForm => "closed",
            Engine::Perturbative => "perturbative",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brute" => Ok(Engine::Brute),
            "factorized" | "factorised" => Ok(Engine::Factorized),
            "closed" | "closedform" | "closed-form" => Ok(Engine::ClosedForm),
            "perturbative" | "pert" => Ok(Engine::Perturbative),
            other => Err(Error::UnknownEngine(other.to_string())),
        }
    }
}

/// One evaluated point of a failure-probability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureResult {
    pub delta_t: f64,
    pub p_fail: f64,
    pub engine: Engine,
    pub code: CodeKind,
    pub depth: u32,
    pub alpha_sq: f64,
}

/// Amplitude `cos^(pairs−k) · (i sin)^k` of a U-generated pattern using `k` pairs, for every `k`.
pub(crate) fn pattern_amplitudes(pairs: usize, delta_t: f64) -> Vec<num_complex::Complex64> {
    let (c, s) = (delta_t.cos(), delta_t.sin());
    let i_sin = num_complex::Complex64::new(0.0, s);
    (0..=pairs)
        .map(|k| i_sin.powi(k as i32) * c.powi((pairs - k) as i32))
        .collect()
}

/// Z mask generated on one block by the adjacent pairs selected in `subset`.
pub(crate) fn pair_subset_mask(subset: u64, n_physical: usize) -> u64 {
    (0..n_physical - 1)
        .filter(|j| subset >> j & 1 == 1)
        .fold(0, |acc, j| acc ^ (0b11 << j))
}
