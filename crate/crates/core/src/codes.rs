//! Codewords, Z-error syndromes and concatenated expansion for the 7-qubit
//! (Steane) and 5-qubit (Laflamme) codes.
//!
//! Qubit `m` (1-based, left-to-right in a ket string) lives at bit `m - 1`,
//! so the ket `|0001111⟩` is the mask `0b1111000`. In a depth-2 layout the
//! qubit `(block b, position m)` lives at bit `b * n + (m - 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of kets a single materialized logical word may hold.
///
/// Large enough for the depth-2 Steane words (8 · 8^7 kets).
pub const DEFAULT_SUPPORT_BUDGET: usize = 1 << 24;

/// A computational-basis string; bit `m - 1` holds qubit `m`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct BasisString(pub u64);

impl BasisString {
    /// Parses a ket string such as `"0001111"` (qubit 1 first).
    pub fn from_ket(ket: &str) -> Self {
        let bits = ket
            .bytes()
            .enumerate()
            .filter(|&(_, c)| c == b'1')
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        BasisString(bits)
    }

    /// Renders the string in ket order, qubit 1 first.
    pub fn to_ket(self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|i| if self.0 >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// A set of qubits carrying σz, as a bit mask.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ZMask(pub u64);

impl ZMask {
    pub const IDENTITY: ZMask = ZMask(0);

    /// Builds a mask from 1-based qubit indices.
    pub fn from_qubits(qubits: &[usize]) -> Self {
        ZMask(qubits.iter().fold(0, |acc, &q| {
            debug_assert!(q >= 1, "qubit indices are 1-based");
            acc | (1 << (q - 1))
        }))
    }

    /// 1-based qubit indices in increasing order.
    pub fn qubits(self) -> Vec<usize> {
        (0..64)
            .filter(|&i| self.0 >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_odd(self) -> bool {
        self.weight() % 2 == 1
    }
}

impl std::ops::BitXor for ZMask {
    type Output = ZMask;
    fn bitxor(self, rhs: ZMask) -> ZMask {
        ZMask(self.0 ^ rhs.0)
    }
}

impl fmt::Display for ZMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.qubits();
        if q.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = q.iter().map(|i| format!("Z{i}")).collect();
        write!(f, "{}", parts.join(""))
    }
}

/// A basis string with a ±1 sign; the common 1/√8 magnitude is implicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedKet {
    pub string: BasisString,
    pub sign: i8,
}

impl SignedKet {
    fn parse(sign: i8, ket: &str) -> Self {
        SignedKet {
            string: BasisString::from_ket(ket),
            sign,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeKind {
    Steane7,
    Laflamme5,
}

impl CodeKind {
    pub const ALL: [CodeKind; 2] = [CodeKind::Steane7, CodeKind::Laflamme5];

    pub fn n_physical(self) -> usize {
        match self {
            CodeKind::Steane7 => 7,
            CodeKind::Laflamme5 => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Steane7 => "steane7",
            CodeKind::Laflamme5 => "laflamme5",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "steane7" | "steane" | "7" => Ok(CodeKind::Steane7),
            "laflamme5" | "laflamme" | "5" => Ok(CodeKind::Laflamme5),
            other => Err(Error::UnknownCode(other.to_string())),
        }
    }
}

/// Logical basis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logical {
    Zero,
    One,
}

impl Logical {
    pub fn from_bit(bit: u64) -> Self {
        if bit & 1 == 0 {
            Logical::Zero
        } else {
            Logical::One
        }
    }
}

/// Z-error syndrome: bit `i` is the parity of the error against X-check `i`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Syndrome(pub u8);

impl Syndrome {
    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

/// Stabilizer generator `sign · X^x Z^z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilizerGenerator {
    pub x: u64,
    pub z: u64,
    pub sign: i8,
}

impl StabilizerGenerator {
    /// Applies the generator to a signed word, returning the image as (string, sign) pairs.
    fn apply(&self, word: &[SignedKet]) -> Vec<(u64, i8)> {
        let mut image: Vec<(u64, i8)> = word
            .iter()
            .map(|k| {
                let phase = if (self.z & k.string.0).count_ones().is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                (k.string.0 ^ self.x, k.sign * phase * self.sign)
            })
            .collect();
        image.sort_unstable();
        image
    }

    fn stabilizes(&self, word: &[SignedKet]) -> bool {
        let mut original: Vec<(u64, i8)> = word.iter().map(|k| (k.string.0, k.sign)).collect();
        original.sort_unstable();
        self.apply(word) == original
    }
}

/// A distance-3 code restricted to the Z-error machinery the ZZ interaction can reach.
#[derive(Clone, Debug)]
pub struct Code {
    pub kind: CodeKind,
    pub n_physical: usize,
    pub zero_word: Vec<SignedKet>,
    pub one_word: Vec<SignedKet>,
    generators: Vec<StabilizerGenerator>,
    x_checks: Vec<u64>,
    corrections: Vec<Option<ZMask>>,
    representatives: Vec<ZMask>,
    logical_z: ZMask,
}

impl Code {
    pub fn word(&self, logical: Logical) -> &[SignedKet] {
        match logical {
            Logical::Zero => &self.zero_word,
            Logical::One => &self.one_word,
        }
    }

    /// Full stabilizer generator set, each verified against both codewords.
    pub fn generators(&self) -> &[StabilizerGenerator] {
        &self.generators
    }

    /// X-parts of the generators that anticommute with some Z error.
    pub fn x_checks(&self) -> &[u64] {
        &self.x_checks
    }

    pub fn n_syndromes(&self) -> usize {
        1 << self.x_checks.len()
    }

    /// All-qubit mask of one block.
    pub fn full_mask(&self) -> u64 {
        (1u64 << self.n_physical) - 1
    }

    /// Minimal-weight correction for `syndrome`, or `None` when no weight ≤ 1 Z error produces it.
    pub fn correction(&self, syndrome: Syndrome) -> Option<ZMask> {
        self.corrections[syndrome.0 as usize]
    }

    /// Lowest-weight mask (ties: smallest integer) producing `syndrome`.
    pub fn representative(&self, syndrome: Syndrome) -> ZMask {
        self.representatives[syndrome.0 as usize]
    }

    /// Minimum-weight physical realization of the logical Z.
    pub fn logical_z(&self) -> ZMask {
        self.logical_z
    }

    /// `⟨ξ_L| Z_mask |ξ_L⟩`, exact on the signed support.
    pub fn diag_element(&self, logical: Logical, mask: ZMask) -> f64 {
        let word = self.word(logical);
        let total: i64 = word
            .iter()
            .map(|k| {
                if (k.string.0 & mask.0).count_ones().is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            })
            .sum();
        total as f64 / word.len() as f64
    }
}

/// Builds one of the two codes from its codeword kets, deriving and
/// verifying the stabilizer generators and the Z-correction table.
pub fn build_code(kind: CodeKind) -> Code {
    let (zero_word, one_word) = match kind {
        CodeKind::Steane7 => (
            [
                "0000000", "0001111", "0110011", "0111100", "1010101", "1011010", "1100110",
                "1101001",
            ]
            .map(|k| SignedKet::parse(1, k))
            .to_vec(),
            [
                "1111111", "1110000", "1001100", "1000011", "0101010", "0100101", "0011001",
                "0010110",
            ]
            .map(|k| SignedKet::parse(1, k))
            .to_vec(),
        ),
        CodeKind::Laflamme5 => (
            [
                (-1, "00000"),
                (1, "01111"),
                (-1, "10011"),
                (1, "11100"),
                (1, "10101"),
                (1, "11010"),
                (1, "00110"),
                (1, "01001"),
            ]
            .map(|(s, k)| SignedKet::parse(s, k))
            .to_vec(),
            [
                (-1, "11111"),
                (1, "10000"),
                (1, "01100"),
                (-1, "00011"),
                (-1, "01010"),
                (-1, "00101"),
                (1, "11001"),
                (1, "10110"),
            ]
            .map(|(s, k)| SignedKet::parse(s, k))
            .to_vec(),
        ),
    };
    let n = kind.n_physical();

    let support: Vec<u64> = zero_word.iter().map(|k| k.string.0).collect();
    assert!(
        support.contains(&0)
            && support
                .iter()
                .all(|a| support.iter().all(|b| support.contains(&(a ^ b)))),
        "zero word support of {kind} is not a linear subspace"
    );
    let x_basis = gf2_basis(&support);

    let mut generators = Vec::new();
    for &x in &x_basis {
        let found = (0..1u64 << n)
            .flat_map(|z| [1i8, -1].map(|sign| StabilizerGenerator { x, z, sign }))
            .find(|g| g.stabilizes(&zero_word) && g.stabilizes(&one_word));
        generators
            .push(found.unwrap_or_else(|| panic!("no stabilizer with X-part {x:#b} for {kind}")));
    }

    // Z-type generators: even-weight masks orthogonal to the support.
    let dual: Vec<u64> = (0..1u64 << n)
        .filter(|&r| x_basis.iter().all(|&v| (r & v).count_ones() % 2 == 0))
        .collect();
    let even_dual: Vec<u64> = dual
        .iter()
        .copied()
        .filter(|r| r.count_ones() % 2 == 0)
        .collect();
    for z in gf2_basis(&even_dual) {
        let g = StabilizerGenerator { x: 0, z, sign: 1 };
        assert!(g.stabilizes(&zero_word) && g.stabilizes(&one_word));
        generators.push(g);
    }
    assert_eq!(
        generators.len(),
        n - 1,
        "{kind} should have n - 1 generators"
    );

    let x_checks: Vec<u64> = generators
        .iter()
        .filter(|g| g.x != 0)
        .map(|g| g.x)
        .collect();
    let syndrome_of = |mask: u64| -> usize {
        x_checks.iter().enumerate().fold(0, |acc, (i, &x)| {
            acc | ((((mask & x).count_ones() & 1) as usize) << i)
        })
    };

    let mut corrections = vec![None; 1 << x_checks.len()];
    corrections[0] = Some(ZMask::IDENTITY);
    for q in 0..n {
        let mask = ZMask(1 << q);
        let s = syndrome_of(mask.0);
        match corrections[s] {
            None => corrections[s] = Some(mask),
            Some(existing) => log::warn!(
                "{kind}: Z{} shares syndrome {s:#b} with {existing}; keeping {existing}",
                q + 1
            ),
        }
    }

    let mut representatives = vec![None; corrections.len()];
    let mut by_weight: Vec<u64> = (0..1u64 << n).collect();
    by_weight.sort_by_key(|&m| (m.count_ones(), m));
    for m in by_weight {
        representatives[syndrome_of(m)].get_or_insert(ZMask(m));
    }
    let representatives = representatives
        .into_iter()
        .map(|r| r.expect("every syndrome is reachable by some Z error"))
        .collect();

    let logical_z = dual
        .iter()
        .copied()
        .filter(|r| r.count_ones() % 2 == 1)
        .min_by_key(|&r| (r.count_ones(), r))
        .map(ZMask)
        .expect("odd dual element");

    let code = Code {
        kind,
        n_physical: n,
        zero_word,
        one_word,
        generators,
        x_checks,
        corrections,
        representatives,
        logical_z,
    };
    debug_assert_eq!(code.diag_element(Logical::Zero, logical_z), 1.0);
    debug_assert_eq!(code.diag_element(Logical::One, logical_z), -1.0);
    code
}

/// Z-error syndrome of `mask` under the code's X-checks.
pub fn z_syndrome(code: &Code, mask: ZMask) -> Syndrome {
    let bits = code.x_checks.iter().enumerate().fold(0u8, |acc, (i, &x)| {
        acc | ((((mask.0 & x).count_ones() & 1) as u8) << i)
    });
    Syndrome(bits)
}

/// Row-reduced GF(2) basis of the span of `vectors`.
fn gf2_basis(vectors: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let reduced = basis.iter().fold(v, |acc, &b| acc.min(acc ^ b));
        if reduced != 0 {
            basis.push(reduced);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// A code concatenated `depth` levels, with interactions only inside lowest-level blocks.
#[derive(Clone, Debug)]
pub struct ConcatLayout {
    pub code: Code,
    pub depth: u32,
    support_budget: usize,
}

impl ConcatLayout {
    pub fn new(code: Code, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidDepth(depth));
        }
        Ok(ConcatLayout {
            code,
            depth,
            support_budget: DEFAULT_SUPPORT_BUDGET,
        })
    }

    pub fn of(kind: CodeKind, depth: u32) -> Result<Self> {
        Self::new(build_code(kind), depth)
    }

    pub fn with_support_budget(mut self, budget: usize) -> Self {
        self.support_budget = budget;
        self
    }

    pub fn kind(&self) -> CodeKind {
        self.code.kind
    }

    pub fn n_physical(&self) -> usize {
        self.code.n_physical
    }

    pub fn n_blocks(&self) -> usize {
        self.n_physical().pow(self.depth - 1)
    }

    pub fn n_total(&self) -> usize {
        self.n_physical().pow(self.depth)
    }

    /// Number of interacting (adjacent, same-block) pairs.
    pub fn pairs(&self) -> usize {
        self.n_blocks() * (self.n_physical() - 1)
    }

    /// Bit `j` is set when qubits at bits `j` and `j + 1` interact.
    pub fn pair_mask(&self) -> u64 {
        let n = self.n_physical();
        let inner = (1u64 << (n - 1)) - 1;
        (0..self.n_blocks()).fold(0, |acc, b| acc | (inner << (b * n)))
    }

    /// Kets per materialized logical word, if it can be counted in a `usize`.
    pub fn word_support(&self) -> Option<usize> {
        // Each expansion step replaces every symbol by an 8-ket word.
        let mut count = 8usize;
        let mut symbols = 1usize;
        for _ in 1..self.depth {
            symbols = symbols.checked_mul(self.n_physical())?;
            count = count.checked_mul(8usize.checked_pow(symbols.try_into().ok()?)?)?;
        }
        Some(count)
    }
}

/// Materializes the signed support of a logical codeword at the layout's depth.
///
/// Depth 2 substitutes the matching depth-1 word for every symbol of each
/// outer ket; signs multiply. Depth ≥ 3 is never materialized.
pub fn expand_concatenated(layout: &ConcatLayout, logical: Logical) -> Result<Vec<SignedKet>> {
    let code = &layout.code;
    match layout.depth {
        1 => Ok(code.word(logical).to_vec()),
        2 => {
            let size = layout.word_support().unwrap_or(usize::MAX);
            if size > layout.support_budget {
                return Err(Error::DepthUnsupported {
                    depth: layout.depth,
                    support: size,
                    budget: layout.support_budget,
                });
            }
            let n = code.n_physical;
            let mut out = Vec::with_capacity(size);
            for outer in code.word(logical) {
                let mut partial: Vec<(u64, i8)> = vec![(0, outer.sign)];
                for b in 0..n {
                    let inner = code.word(Logical::from_bit(outer.string.0 >> b));
                    let shift = b * n;
                    partial = partial
                        .iter()
                        .flat_map(|&(s, sign)| {
                            inner
                                .iter()
                                .map(move |k| (s | (k.string.0 << shift), sign * k.sign))
                        })
                        .collect();
                }
                out.extend(partial.into_iter().map(|(s, sign)| SignedKet {
                    string: BasisString(s),
                    sign,
                }));
            }
            Ok(out)
        }
        depth => Err(Error::DepthUnsupported {
            depth,
            support: layout.word_support().unwrap_or(usize::MAX),
            budget: layout.support_budget,
        }),
    }
}
