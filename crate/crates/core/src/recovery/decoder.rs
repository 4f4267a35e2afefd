//! Block-level decoding rule shared by both depth-2 engines.

use crate::codes::{z_syndrome, Code, Syndrome, ZMask};

/// Correction applied at the block level for outer syndrome `outer`, given
/// the (0-based) blocks whose inner syndrome had no weight ≤ 1 correction.
///
/// The returned mask is over blocks: bit `b` means "apply logical Z to block b".
/// `None` means recovery fails.
///
/// With no erased block this is the ordinary correction table. A single
/// erased block is located, so only its two hypotheses are allowed: no error,
/// or a logical Z on that block. Two or more erasures are not recoverable.
pub fn outer_correction(code: &Code, outer: Syndrome, erased: &[usize]) -> Option<ZMask> {
    match erased {
        [] => code.correction(outer),
        &[b] => {
            let flip = ZMask(1 << b);
            if outer.is_trivial() {
                Some(ZMask::IDENTITY)
            } else if z_syndrome(code, flip) == outer {
                Some(flip)
            } else {
                None
            }
        }
        _ => None,
    }
}
