//! Sparse signed superpositions over computational-basis strings and the
//! exact diagonal evolution generated by nearest-neighbour σzσz coupling.
//!
//! Every operator here is diagonal in the computational basis, so a state's
//! support never changes after construction; only amplitudes move.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::codes::{expand_concatenated, ConcatLayout, Logical, ZMask};
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped at construction.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

const NORM_TOLERANCE: f64 = 1e-12;

/// Terms per reduction chunk. Fixed so sums do not depend on the thread count.
const CHUNK: usize = 1 << 14;

/// Logical amplitudes `α|0_L⟩ + β|1_L⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl LogicalAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(LogicalAmplitudes { alpha, beta })
    }

    /// Real non-negative amplitudes with the given `|α|²`.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(Error::AlphaSqOutOfRange(alpha_sq));
        }
        Ok(LogicalAmplitudes {
            alpha: Complex64::new(alpha_sq.sqrt(), 0.0),
            beta: Complex64::new((1.0 - alpha_sq).sqrt(), 0.0),
        })
    }

    /// `(|0_L⟩ + |1_L⟩)/√2`, the state that maximizes the failure probability.
    pub fn symmetric() -> Self {
        Self::from_alpha_sq(0.5).expect("0.5 is in range")
    }

    pub fn basis(logical: Logical) -> Self {
        match logical {
            Logical::Zero => Self::from_alpha_sq(1.0),
            Logical::One => Self::from_alpha_sq(0.0),
        }
        .expect("basis amplitudes are in range")
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// `|α|² − |β|²`, the overlap `⟨Ψ0|Z_L|Ψ0⟩`.
    pub fn imbalance(&self) -> f64 {
        self.alpha_sq() - self.beta_sq()
    }
}

/// A normalized superposition stored as parallel arrays sorted by basis string.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n_qubits: usize,
    strings: Vec<u64>,
    amps: Vec<Complex64>,
}

impl SparseState {
    /// Builds a state from arbitrary terms; duplicates are summed, near-zero
    /// amplitudes pruned, and the support sorted. No normalization is applied.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (u64, Complex64)>) -> Self {
        let mut terms: Vec<(u64, Complex64)> = terms.into_iter().collect();
        terms.par_sort_unstable_by_key(|t| t.0);
        let mut strings = Vec::with_capacity(terms.len());
        let mut amps: Vec<Complex64> = Vec::with_capacity(terms.len());
        for (s, a) in terms {
            debug_assert!(n_qubits >= 64 || s < 1 << n_qubits);
            if strings.last() == Some(&s) {
                *amps.last_mut().unwrap() += a;
            } else {
                strings.push(s);
                amps.push(a);
            }
        }
        let (strings, amps) = strings
            .into_iter()
            .zip(amps)
            .filter(|(_, a)| a.norm() > PRUNE_THRESHOLD)
            .unzip();
        SparseState {
            n_qubits,
            strings,
            amps,
        }
    }

    /// `α·|0_L⟩ + β·|1_L⟩` at the layout's depth.
    pub fn from_logical(layout: &ConcatLayout, amps: LogicalAmplitudes) -> Result<Self> {
        let mut terms = Vec::new();
        for (logical, coeff) in [(Logical::Zero, amps.alpha), (Logical::One, amps.beta)] {
            if coeff.norm() <= PRUNE_THRESHOLD {
                continue;
            }
            let word = expand_concatenated(layout, logical)?;
            let scale = coeff / (word.len() as f64).sqrt();
            terms.extend(
                word.into_iter()
                    .map(|k| (k.string.0, scale * f64::from(k.sign))),
            );
        }
        Ok(Self::from_terms(layout.n_total(), terms))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> &[u64] {
        &self.strings
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, string: u64) -> Complex64 {
        match self.strings.binary_search(&string) {
            Ok(i) => self.amps[i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        let partial: Vec<f64> = self
            .amps
            .par_chunks(CHUNK)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        pairwise_sum(&partial, 0.0, |a, b| a + b)
    }

    fn map_amplitudes(&self, f: impl Fn(u64, Complex64) -> Complex64 + Sync) -> SparseState {
        let amps = self
            .strings
            .par_iter()
            .zip(self.amps.par_iter())
            .with_min_len(CHUNK)
            .map(|(&s, &a)| f(s, a))
            .collect();
        SparseState {
            n_qubits: self.n_qubits,
            strings: self.strings.clone(),
            amps,
        }
    }
}

/// Sum over intra-block adjacent pairs of +1 (bits agree) or −1 (bits differ).
pub fn zz_phase_exponent(string: u64, layout: &ConcatLayout) -> i32 {
    let differing = ((string ^ (string >> 1)) & layout.pair_mask()).count_ones() as i32;
    layout.pairs() as i32 - 2 * differing
}

/// Applies `U(δt) = Π exp(iδt σz σz)` over the layout's interacting pairs.
pub fn evolve(state: &SparseState, layout: &ConcatLayout, delta_t: f64) -> SparseState {
    assert_eq!(
        state.n_qubits,
        layout.n_total(),
        "state width does not match layout"
    );
    let pairs = layout.pairs() as i32;
    let pair_mask = layout.pair_mask();
    let phases: Vec<Complex64> = (-pairs..=pairs)
        .map(|s| Complex64::from_polar(1.0, f64::from(s) * delta_t))
        .collect();
    state.map_amplitudes(|s, a| {
        let differing = ((s ^ (s >> 1)) & pair_mask).count_ones() as i32;
        // index of exponent (pairs - 2·differing) in the table
        a * phases[(2 * pairs - 2 * differing) as usize]
    })
}

/// Applies `Π_{q ∈ mask} σz_q`.
pub fn apply_z_mask(state: &SparseState, mask: ZMask) -> SparseState {
    state.map_amplitudes(|s, a| {
        if (s & mask.0).count_ones().is_multiple_of(2) {
            a
        } else {
            -a
        }
    })
}

/// `⟨a|b⟩`, by merge-join over the sorted supports with a fixed reduction order.
pub fn inner(a: &SparseState, b: &SparseState) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::WidthMismatch(a.n_qubits, b.n_qubits));
    }
    let partial: Vec<Complex64> = a
        .strings
        .par_chunks(CHUNK)
        .zip(a.amps.par_chunks(CHUNK))
        .map(|(sa, aa)| {
            let mut j = b.strings.partition_point(|&s| s < sa[0]);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&s, &amp) in sa.iter().zip(aa) {
                while j < b.strings.len() && b.strings[j] < s {
                    j += 1;
                }
                if j == b.strings.len() {
                    break;
                }
                if b.strings[j] == s {
                    acc += amp.conj() * b.amps[j];
                }
            }
            acc
        })
        .collect();
    Ok(pairwise_sum(&partial, Complex64::new(0.0, 0.0), |x, y| {
        x + y
    }))
}

fn pairwise_sum<T: Copy>(values: &[T], zero: T, add: impl Fn(T, T) -> T + Copy) -> T {
    match values.len() {
        0 => zero,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            add(pairwise_sum(l, zero, add), pairwise_sum(r, zero, add))
        }
    }
}
