//! Block-factorized exact engine.
//!
//! Inner blocks are independent, so each block is summarized by a transfer
//! table `t[syndrome][flag]`: the summed amplitude of its U-generated patterns
//! with that syndrome whose corrected residual does (flag 1) or does not act
//! as logical Z. Only the block-flag pattern reaches the outer decoder. Summing
//! `|amplitude|²` over every tuple of inner syndromes then collapses to
//! per-block Gram matrices `G(f, f') = Σ_s t[s][f]·t[s][f']*`.

use num_complex::Complex64;

use crate::codes::{z_syndrome, CodeKind, ConcatLayout, Syndrome, ZMask};
use crate::error::{Error, Result};
use crate::phasestate::LogicalAmplitudes;

use super::{
    classify_residual, outer_correction, pair_subset_mask, pattern_amplitudes, Engine,
    FailureResult, LogicalAction,
};

#[derive(Clone, Copy, Debug)]
struct BlockPattern {
    pairs_used: usize,
    syndrome: Syndrome,
    flag: usize,
    sign: f64,
}

/// Precomputed δt-independent structure; evaluate many δt against it.
#[derive(Clone, Debug)]
pub struct FactorizedEngine {
    kind: CodeKind,
    depth: u32,
    n: usize,
    n_syndromes: usize,
    correctable: Vec<bool>,
    patterns: Vec<BlockPattern>,
    /// Block-flag patterns grouped by outer syndrome.
    by_outer_syndrome: Vec<Vec<usize>>,
    /// `outcomes[e][f]`: action after outer recovery of flag pattern `f` when block
    /// `e − 1` is erased (`e = 0`: none); `None` on failure.
    outcomes: Vec<Vec<Option<LogicalAction>>>,
}

impl FactorizedEngine {
    pub fn new(layout: &ConcatLayout) -> Result<Self> {
        if layout.depth > 2 {
            return Err(Error::ScaleExceeded {
                engine: "factorized",
                code: layout.kind().to_string(),
                depth: layout.depth,
            });
        }
        let code = &layout.code;
        let n = code.n_physical;
        let correctable: Vec<bool> = (0..code.n_syndromes())
            .map(|s| code.correction(Syndrome(s as u8)).is_some())
            .collect();

        let mut patterns = Vec::with_capacity(1 << (n - 1));
        for subset in 0..1u64 << (n - 1) {
            let mask = ZMask(pair_subset_mask(subset, n));
            let syndrome = z_syndrome(code, mask);
            let fix = code
                .correction(syndrome)
                .unwrap_or_else(|| code.representative(syndrome));
            let action = classify_residual(code, mask ^ fix)?;
            patterns.push(BlockPattern {
                pairs_used: subset.count_ones() as usize,
                syndrome,
                flag: usize::from(action.is_z()),
                sign: f64::from(action.sign),
            });
        }

        let mut by_outer_syndrome = vec![Vec::new(); code.n_syndromes()];
        let mut outcomes = Vec::new();
        if layout.depth == 2 {
            for f in 0..1usize << n {
                by_outer_syndrome[z_syndrome(code, ZMask(f as u64)).0 as usize].push(f);
            }
            let erasures: Vec<Vec<usize>> = std::iter::once(vec![])
                .chain((0..n).map(|b| vec![b]))
                .collect();
            for erased in &erasures {
                let row = (0..1usize << n)
                    .map(|f| {
                        let flags = ZMask(f as u64);
                        outer_correction(code, z_syndrome(code, flags), erased)
                            .map(|c| classify_residual(code, flags ^ c))
                            .transpose()
                    })
                    .collect::<Result<Vec<_>>>()?;
                outcomes.push(row);
            }
        }

        Ok(FactorizedEngine {
            kind: layout.kind(),
            depth: layout.depth,
            n,
            n_syndromes: code.n_syndromes(),
            correctable,
            patterns,
            by_outer_syndrome,
            outcomes,
        })
    }

    fn transfer_table(&self, delta_t: f64) -> Vec<[Complex64; 2]> {
        let amp = pattern_amplitudes(self.n - 1, delta_t);
        let mut t = vec![[Complex64::new(0.0, 0.0); 2]; self.n_syndromes];
        for p in &self.patterns {
            t[p.syndrome.0 as usize][p.flag] += amp[p.pairs_used] * p.sign;
        }
        t
    }

    /// Gram matrices over correctable and over erased syndromes.
    fn grams(&self, t: &[[Complex64; 2]]) -> [[[Complex64; 2]; 2]; 2] {
        let mut g = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
        for (s, row) in t.iter().enumerate() {
            let class = usize::from(!self.correctable[s]);
            for f in 0..2 {
                for h in 0..2 {
                    g[class][f][h] += row[f] * row[h].conj();
                }
            }
        }
        g
    }

    pub fn failure_probability(&self, amps: &LogicalAmplitudes, delta_t: f64) -> FailureResult {
        let t = self.transfer_table(delta_t);
        let success = if self.depth == 1 {
            t.iter()
                .enumerate()
                .filter(|(s, _)| self.correctable[*s])
                .map(|(_, row)| {
                    let z = LogicalAction {
                        kind: super::LogicalKind::Z,
                        sign: 1,
                    };
                    (row[0] + row[1] * z.overlap(amps)).norm_sqr()
                })
                .sum::<f64>()
        } else {
            let g = self.grams(&t);
            let mut total = 0.0;
            for (e, row) in self.outcomes.iter().enumerate() {
                let class_of = |b: usize| usize::from(e == b + 1);
                for group in &self.by_outer_syndrome {
                    for &f in group {
                        let Some(lf) = row[f] else { continue };
                        for &h in group {
                            let Some(lh) = row[h] else { continue };
                            let weight = (0..self.n).fold(Complex64::new(1.0, 0.0), |acc, b| {
                                acc * g[class_of(b)][f >> b & 1][h >> b & 1]
                            });
                            total += lf.overlap(amps) * lh.overlap(amps) * weight.re;
                        }
                    }
                }
            }
            total
        };
        super::failure_result(
            Engine::Factorized,
            self.kind,
            self.depth,
            amps,
            delta_t,
            1.0 - success,
        )
    }
}

/// Exact failure probability at depth 1 or 2 via per-block transfer tables.
pub fn failure_probability_factorized(
    layout: &ConcatLayout,
    amps: &LogicalAmplitudes,
    delta_t: f64,
) -> Result<FailureResult> {
    Ok(FactorizedEngine::new(layout)?.failure_probability(amps, delta_t))
}
