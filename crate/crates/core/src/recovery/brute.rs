//! State-level exact engine.
//!
//! Depth 1 evaluates the failure probability directly from inner products of
//! the evolved state. Depth 2 enumerates every Z pattern U generates on the
//! full register, decodes it physically (inner blocks, then the block level),
//! and scores the residual against the materialized depth-2 codewords.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::codes::{
    expand_concatenated, z_syndrome, CodeKind, ConcatLayout, Logical, SignedKet, Syndrome, ZMask,
};
use crate::error::{Error, Result};
use crate::phasestate::{apply_z_mask, evolve, inner, LogicalAmplitudes, SparseState};

use super::{outer_correction, pattern_amplitudes, Engine, FailureResult};

/// Largest register the depth-2 enumeration accepts.
pub const MAX_BRUTE_QUBITS: usize = 25;

const FAILED: u32 = u32::MAX;

#[derive(Clone, Debug)]
enum Plan {
    Direct(ConcatLayout),
    Enumerated(Enumeration),
}

#[derive(Clone, Debug)]
struct Enumeration {
    pairs: usize,
    /// Per pattern: number of pairs used, dense sector index, residual id.
    pairs_used: Vec<u8>,
    sector: Vec<u32>,
    residual: Vec<u32>,
    n_sectors: usize,
    /// `(⟨0|Z_r|0⟩, ⟨1|Z_r|1⟩)` per residual id.
    diagonals: Vec<(f64, f64)>,
}

/// Brute-force engine; the depth-2 enumeration is built once and reused across δt.
#[derive(Clone, Debug)]
pub struct BruteEngine {
    kind: CodeKind,
    depth: u32,
    plan: Plan,
}

impl BruteEngine {
    pub fn new(layout: &ConcatLayout) -> Result<Self> {
        let plan = match layout.depth {
            1 => Plan::Direct(layout.clone()),
            2 if layout.n_total() <= MAX_BRUTE_QUBITS => Plan::Enumerated(enumerate(layout)?),
            depth => {
                return Err(Error::ScaleExceeded {
                    engine: "brute",
                    code: layout.kind().to_string(),
                    depth,
                })
            }
        };
        Ok(BruteEngine {
            kind: layout.kind(),
            depth: layout.depth,
            plan,
        })
    }

    pub fn failure_probability(
        &self,
        amps: &LogicalAmplitudes,
        delta_t: f64,
    ) -> Result<FailureResult> {
        let success = match &self.plan {
            Plan::Direct(layout) => direct_success(layout, amps, delta_t)?,
            Plan::Enumerated(e) => e.success(amps, delta_t),
        };
        Ok(super::failure_result(
            Engine::Brute,
            self.kind,
            self.depth,
            amps,
            delta_t,
            1.0 - success,
        ))
    }
}

/// `|⟨Ψ0|UΨ0⟩|² + Σ_n |⟨σ_n Ψ0|UΨ0⟩|²`.
fn direct_success(layout: &ConcatLayout, amps: &LogicalAmplitudes, delta_t: f64) -> Result<f64> {
    let psi = SparseState::from_logical(layout, *amps)?;
    let evolved = evolve(&psi, layout, delta_t);
    let mut success = inner(&psi, &evolved)?.norm_sqr();
    for q in 1..=layout.n_total() {
        let flipped = apply_z_mask(&psi, ZMask::from_qubits(&[q]));
        success += inner(&flipped, &evolved)?.norm_sqr();
    }
    Ok(success)
}

fn parity(x: u64) -> u64 {
    u64::from(x.count_ones() & 1)
}

fn mean_parity_sign(word: &[SignedKet], mask: u64) -> f64 {
    let odd = word
        .iter()
        .filter(|k| parity(k.string.0 & mask) == 1)
        .count();
    (word.len() as f64 - 2.0 * odd as f64) / word.len() as f64
}

fn enumerate(layout: &ConcatLayout) -> Result<Enumeration> {
    let code = &layout.code;
    let n = code.n_physical;
    let bits = code.x_checks().len();
    let block_full = code.full_mask();

    let pair_bits: Vec<usize> = (0..layout.n_total())
        .filter(|j| layout.pair_mask() >> j & 1 == 1)
        .collect();
    // Block-level checks expressed as physical masks over whole blocks.
    let outer_checks: Vec<u64> = code
        .x_checks()
        .iter()
        .map(|&x| {
            (0..n)
                .filter(|b| x >> b & 1 == 1)
                .fold(0, |acc, b| acc | block_full << (b * n))
        })
        .collect();

    let total = 1usize << pair_bits.len();
    let mut pairs_used = Vec::with_capacity(total);
    let mut sector = Vec::with_capacity(total);
    let mut residual = Vec::with_capacity(total);
    let mut residual_ids: HashMap<u64, u32> = HashMap::new();
    let mut residual_masks: Vec<u64> = Vec::new();

    for p in 0..total as u64 {
        let error = pair_bits
            .iter()
            .enumerate()
            .filter(|(i, _)| p >> i & 1 == 1)
            .fold(0u64, |acc, (_, &j)| acc ^ (0b11 << j));

        let mut corrected = error;
        let mut erased = Vec::new();
        let mut key = 0usize;
        for b in 0..n {
            let block = ZMask(error >> (b * n) & block_full);
            let s = z_syndrome(code, block);
            let fix = code.correction(s).unwrap_or_else(|| {
                erased.push(b);
                code.representative(s)
            });
            corrected ^= fix.0 << (b * n);
            key |= usize::from(s.0) << (bits * b);
        }

        let outer = outer_checks.iter().enumerate().fold(0u8, |acc, (i, &x)| {
            acc | ((parity(corrected & x) as u8) << i)
        });
        key |= usize::from(outer) << (bits * n);

        let id = match outer_correction(code, Syndrome(outer), &erased) {
            None => FAILED,
            Some(c) => {
                let r = (0..n)
                    .filter(|b| c.0 >> b & 1 == 1)
                    .fold(corrected, |acc, b| acc ^ (code.logical_z().0 << (b * n)));
                *residual_ids.entry(r).or_insert_with(|| {
                    residual_masks.push(r);
                    (residual_masks.len() - 1) as u32
                })
            }
        };
        pairs_used.push(p.count_ones() as u8);
        sector.push(key as u32);
        residual.push(id);
    }

    let zero = expand_concatenated(layout, Logical::Zero)?;
    let one = expand_concatenated(layout, Logical::One)?;
    let diagonals: Vec<(f64, f64)> = residual_masks
        .par_iter()
        .map(|&r| (mean_parity_sign(&zero, r), mean_parity_sign(&one, r)))
        .collect();
    for (&r, &(d0, d1)) in residual_masks.iter().zip(&diagonals) {
        let unit = |d: f64| (d.abs() - 1.0).abs() < super::ORTHOGONALITY_TOLERANCE;
        if !unit(d0) || !unit(d1) {
            return Err(Error::NotClassifiable {
                mask: ZMask(r),
                zero: d0,
                one: d1,
            });
        }
    }

    Ok(Enumeration {
        pairs: pair_bits.len(),
        pairs_used,
        sector,
        residual,
        n_sectors: 1 << (bits * (n + 1)),
        diagonals,
    })
}

impl Enumeration {
    fn success(&self, amps: &LogicalAmplitudes, delta_t: f64) -> f64 {
        let amp = pattern_amplitudes(self.pairs, delta_t);
        let overlap: Vec<f64> = self
            .diagonals
            .iter()
            .map(|&(d0, d1)| amps.alpha_sq() * d0 + amps.beta_sq() * d1)
            .collect();
        let mut sectors = vec![Complex64::new(0.0, 0.0); self.n_sectors];
        for ((&k, &s), &r) in self.pairs_used.iter().zip(&self.sector).zip(&self.residual) {
            if r != FAILED {
                sectors[s as usize] += amp[k as usize] * overlap[r as usize];
            }
        }
        sectors.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Exact failure probability by direct state evaluation (depth 1) or full
/// pattern enumeration (depth 2, at most 25 qubits).
pub fn failure_probability_brute(
    layout: &ConcatLayout,
    amps: &LogicalAmplitudes,
    delta_t: f64,
) -> Result<FailureResult> {
    BruteEngine::new(layout)?.failure_probability(amps, delta_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn steane_basis_states_never_fail() {
        let engine = BruteEngine::new(&ConcatLayout::of(CodeKind::Steane7, 1).unwrap()).unwrap();
        for l in [Logical::Zero, Logical::One] {
            for i in 0..20 {
                let dt = 0.157 * f64::from(i);
                let p = engine
                    .failure_probability(&LogicalAmplitudes::basis(l), dt)
                    .unwrap();
                assert!(p.p_fail.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn steane_symmetric_amps_follow_product_of_cosines() {
        let engine = BruteEngine::new(&ConcatLayout::of(CodeKind::Steane7, 1).unwrap()).unwrap();
        for i in 0..20 {
            let dt = 0.157 * f64::from(i);
            let want = 1.0 - (dt.cos() * (2.0 * dt).cos() * (3.0 * dt).cos()).powi(2);
            let got = engine
                .failure_probability(&LogicalAmplitudes::symmetric(), dt)
                .unwrap()
                .p_fail;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn steane_depth_two_is_out_of_scale() {
        let layout = ConcatLayout::of(CodeKind::Steane7, 2).unwrap();
        assert!(matches!(
            BruteEngine::new(&layout),
            Err(Error::ScaleExceeded { .. })
        ));
    }

    #[test]
    fn laflamme_depth_two_recovers_at_quarter_period() {
        let engine = BruteEngine::new(&ConcatLayout::of(CodeKind::Laflamme5, 2).unwrap()).unwrap();
        let p = engine
            .failure_probability(&LogicalAmplitudes::symmetric(), FRAC_PI_2)
            .unwrap();
        assert!(p.p_fail.abs() < 1e-9, "{}", p.p_fail);
        let p0 = engine
            .failure_probability(&LogicalAmplitudes::from_alpha_sq(0.2).unwrap(), 0.0)
            .unwrap();
        assert!(p0.p_fail.abs() < 1e-12);
    }
}
