//! Orthogonal correctible sets and the supports that survive block factorization.

use crate::codes::{Code, Logical, ZMask};

use super::ORTHOGONALITY_TOLERANCE;

/// `⟨ξ|Z_mask|ξ⟩` for `mask` acting on the first block of the depth-2 codeword `ξ`.
///
/// Distinct outer kets differ on at least one block where the inner words are
/// orthogonal, so only diagonal outer terms survive: the average over the
/// outer kets of the inner diagonal element selected by the ket's first symbol.
pub fn embedded_block_diag(code: &Code, logical: Logical, mask: ZMask) -> f64 {
    let outer = code.word(logical);
    let total: f64 = outer
        .iter()
        .map(|k| code.diag_element(Logical::from_bit(k.string.0), mask))
        .sum();
    total / outer.len() as f64
}

/// True when `Z_a` and `Z_b` on one block map both depth-2 codewords to orthogonal states.
pub fn block_images_orthogonal(code: &Code, a: ZMask, b: ZMask) -> bool {
    let diff = a ^ b;
    [Logical::Zero, Logical::One]
        .into_iter()
        .all(|l| embedded_block_diag(code, l, diff).abs() < ORTHOGONALITY_TOLERANCE)
}

/// All non-identity masks of one block, by weight and then by sorted qubit list.
fn candidate_order(n: usize) -> Vec<ZMask> {
    let mut masks: Vec<ZMask> = (1..1u64 << n).map(ZMask).collect();
    masks.sort_by_key(|m| (m.weight(), m.qubits()));
    masks
}

/// Greedy maximal set of single-block masks whose images are mutually
/// orthogonal and orthogonal to the unerrored codeword.
pub fn single_block_orthogonal_set(code: &Code) -> Vec<ZMask> {
    let mut chosen: Vec<ZMask> = Vec::new();
    for m in candidate_order(code.n_physical) {
        let fits = block_images_orthogonal(code, m, ZMask::IDENTITY)
            && chosen.iter().all(|&c| block_images_orthogonal(code, m, c));
        if fits {
            chosen.push(m);
        }
    }
    chosen
}

/// Non-empty qubit sets `S` (1-based) with `⟨0_L|Z_S|0_L⟩ ≠ 0`, by exhaustive scan.
pub fn nonzero_odd_supports(code: &Code) -> Vec<Vec<usize>> {
    candidate_order(code.n_physical)
        .into_iter()
        .filter(|&m| code.diag_element(Logical::Zero, m).abs() > ORTHOGONALITY_TOLERANCE)
        .map(ZMask::qubits)
        .collect()
}
