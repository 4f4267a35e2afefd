//! Analytic failure curves, small-δt coefficients, the concatenation
//! recursion, thresholds and the dipolar coupling estimate.
//!
//! Every polynomial here is evaluated in a rearranged form whose monomials
//! are all non-negative, using `f1` directly and `w = 1 − f0 − f1` in closed
//! form, so that `P ~ δt⁴` is not lost to cancellation against 1.

use serde::{Deserialize, Serialize};

use crate::codes::CodeKind;
use crate::error::{Error, Result};
use crate::phasestate::LogicalAmplitudes;

/// Vacuum permeability, T·m/A.
pub const MU_0: f64 = 1.256_64e-6;
/// Nuclear magneton, J/T.
pub const NUCLEAR_MAGNETON: f64 = 5.050_78e-27;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_57e-34;

/// Squared overlaps of the evolved codeword with the unerrored codeword (`f0`)
/// and with the states reached by correctable single flips (`f1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FFunctions {
    pub f0: f64,
    pub f1: f64,
}

impl FFunctions {
    /// Weight left over for uncorrectable outcomes, `1 − f0 − f1`.
    pub fn lost(&self) -> f64 {
        1.0 - self.f0 - self.f1
    }
}

struct Trig {
    c1: f64,
    c2: f64,
    c3: f64,
    s1: f64,
    s2: f64,
    s3: f64,
}

fn trig(dt: f64) -> Trig {
    let (s1, c1) = dt.sin_cos();
    let (s2, c2) = (2.0 * dt).sin_cos();
    let (s3, c3) = (3.0 * dt).sin_cos();
    Trig {
        c1,
        c2,
        c3,
        s1,
        s2,
        s3,
    }
}

pub fn f_functions(kind: CodeKind, delta_t: f64) -> FFunctions {
    let t = trig(delta_t);
    match kind {
        CodeKind::Steane7 => FFunctions {
            f0: (t.c1 * t.c2 * t.c3).powi(2),
            // telescoped 1 − c1²c2²c3²
            f1: t.s1.powi(2) + (t.c1 * t.s2).powi(2) + (t.c1 * t.c2 * t.s3).powi(2),
        },
        CodeKind::Laflamme5 => FFunctions {
            f0: t.c1.powi(4) * t.c2.powi(2),
            f1: t.s1.powi(2) * (1.0 + (t.c1 * t.c2).powi(2)),
        },
    }
}

/// `(w, 1 − f0)` for the 5-qubit code without cancellation.
fn laflamme_lost(delta_t: f64) -> (f64, f64) {
    let t = trig(delta_t);
    let w = (t.c1 * t.s2).powi(2);
    let not_f0 = t.s1.powi(2) * (1.0 + t.c1.powi(2)) + t.c1.powi(4) * t.s2.powi(2);
    (w, not_f0)
}

/// Steane depth-2 success deficit as a polynomial in `x = f1`, `y = 1 − x = f0`.
fn steane_outer(x: f64, y: f64) -> f64 {
    21.0 * x.powi(2) * y.powi(5)
        + 7.0 * x.powi(3) * y.powi(4)
        + 28.0 * x.powi(4) * y.powi(3)
        + 7.0 * x.powi(6) * y
        + x.powi(7)
}

/// Exact failure probability of the closed forms at depth 1 or 2.
pub fn p_exact(kind: CodeKind, depth: u32, amps: &LogicalAmplitudes, delta_t: f64) -> Result<f64> {
    let lam2 = amps.imbalance().powi(2);
    let FFunctions { f0, f1 } = f_functions(kind, delta_t);
    let p = match (kind, depth) {
        (CodeKind::Steane7, 1) => f1 * (1.0 - lam2),
        (CodeKind::Steane7, 2) => steane_outer(f1, f0) * (1.0 - lam2),
        (CodeKind::Laflamme5, 1) => laflamme_lost(delta_t).0 + f1 * (1.0 - lam2),
        (CodeKind::Laflamme5, 2) => {
            let w = laflamme_lost(delta_t).0;
            let (a, b) = (f0, f1);
            let always = 4.0 * a.powi(3) * b.powi(2)
                + 20.0 * a.powi(3) * b * w
                + 10.0 * a.powi(3) * w.powi(2)
                + 4.0 * a.powi(2) * b.powi(3)
                + 24.0 * a.powi(2) * b.powi(2) * w
                + 30.0 * a.powi(2) * b * w.powi(2)
                + 10.0 * a.powi(2) * w.powi(3)
                + 12.0 * a * b.powi(3) * w
                + 30.0 * a * b.powi(2) * w.powi(2)
                + 20.0 * a * b * w.powi(3)
                + 5.0 * a * w.powi(4)
                + 4.0 * b.powi(4) * w
                + 10.0 * b.powi(3) * w.powi(2)
                + 10.0 * b.powi(2) * w.powi(3)
                + 5.0 * b * w.powi(4)
                + w.powi(5);
            let phase_only = 6.0 * a.powi(3) * b.powi(2)
                + 2.0 * a.powi(2) * b.powi(3)
                + 6.0 * a.powi(2) * b.powi(2) * w
                + 4.0 * a * b.powi(4)
                + 4.0 * a * b.powi(3) * w;
            always + (1.0 - lam2) * phase_only
        }
        (_, d) => return Err(Error::InvalidDepth(d)),
    };
    Ok(p)
}

/// Lowest-order small-δt term of the exact curve at depth 1 or 2.
pub fn p_leading_order(
    kind: CodeKind,
    depth: u32,
    amps: &LogicalAmplitudes,
    delta_t: f64,
) -> Result<f64> {
    let lam2 = amps.imbalance().powi(2);
    let dt2 = delta_t * delta_t;
    match (kind, depth) {
        (CodeKind::Steane7, 1) => Ok(14.0 * (1.0 - lam2) * dt2),
        (CodeKind::Laflamme5, 1) => Ok((6.0 - 2.0 * lam2) * dt2),
        (CodeKind::Steane7, 2) => Ok(4116.0 * (1.0 - lam2) * dt2 * dt2),
        (CodeKind::Laflamme5, 2) => Ok((360.0 - 24.0 * lam2) * dt2 * dt2),
        (_, d) => Err(Error::InvalidDepth(d)),
    }
}

/// The naive estimate that treats every single-pair error as orthogonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveEstimate {
    /// `(N_c − 1)(cos²δt)^(N_c − 1) sin²δt`.
    pub exact: f64,
    /// `(N_c − 1) δt²`.
    pub small_dt: f64,
}

/// Not a correct failure probability in general; kept for comparison.
pub fn p_perturbative_naive(n_c: usize, delta_t: f64) -> NaiveEstimate {
    assert!(n_c >= 2, "need at least two qubits");
    let m = (n_c - 1) as f64;
    let (s, c) = delta_t.sin_cos();
    NaiveEstimate {
        exact: m * (c * c).powi(n_c as i32 - 1) * s * s,
        small_dt: m * delta_t * delta_t,
    }
}

/// Number of block pairs that can fail together at the next level.
pub fn block_pairs(kind: CodeKind) -> u64 {
    let n = kind.n_physical() as u64;
    n * (n - 1) / 2
}

/// Small-δt coefficient of the depth-1 failure probability at `|α| = |β|`.
pub fn depth_one_coefficient(kind: CodeKind) -> u64 {
    match kind {
        CodeKind::Steane7 => 14,
        CodeKind::Laflamme5 => 6,
    }
}

/// `C⁻¹ (C · P1)^(2^(n−1))` with `P1` the depth-1 small-δt maximum and `C` the block-pair count.
pub fn p_recursive(kind: CodeKind, levels: u32, delta_t: f64) -> Result<f64> {
    if levels == 0 {
        return Err(Error::InvalidDepth(0));
    }
    let c = block_pairs(kind) as f64;
    let p1 = depth_one_coefficient(kind) as f64 * delta_t * delta_t;
    Ok((c * p1).powf(2f64.powi(levels as i32 - 1)) / c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub code: CodeKind,
    pub block_pairs: u64,
    pub depth_one_coefficient: u64,
    /// Bound on `δt²` is `1 / denominator`.
    pub denominator: u64,
    pub threshold: f64,
}

impl ThresholdReport {
    pub fn display(&self) -> String {
        format!("(δt)² < 1/{} ≈ {:.1e}", self.denominator, self.threshold)
    }
}

/// `δt²` below which concatenation helps: `1 / (C · coefficient)`.
pub fn threshold(kind: CodeKind) -> ThresholdReport {
    let pairs = block_pairs(kind);
    let coefficient = depth_one_coefficient(kind);
    let denominator = pairs * coefficient;
    ThresholdReport {
        code: kind,
        block_pairs: pairs,
        depth_one_coefficient: coefficient,
        denominator,
        threshold: 1.0 / denominator as f64,
    }
}

/// Dipolar coupling rate between two nuclear moments `distance` metres apart, in s⁻¹.
pub fn estimate_delta_dipole(distance: f64) -> Result<f64> {
    if distance <= 0.0 || !distance.is_finite() {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(MU_0 * NUCLEAR_MAGNETON.powi(2) / (4.0 * std::f64::consts::PI * HBAR * distance.powi(3)))
}

/// Intercept of a least-squares fit of `p(δt) / δt^power` against `[1, δt², δt⁴]`
/// on `samples` evenly spaced points of `[lo, hi]`.
pub fn fit_leading_coefficient(
    p: impl Fn(f64) -> f64,
    power: i32,
    lo: f64,
    hi: f64,
    samples: usize,
) -> f64 {
    assert!(samples >= 3 && hi > lo && lo > 0.0);
    // Regress on u = (δt/hi)² to keep the normal equations well scaled.
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for i in 0..samples {
        let dt = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let u = (dt / hi).powi(2);
        let row = [1.0, u, u * u];
        let y = p(dt) / dt.powi(power);
        for r in 0..3 {
            aty[r] += row[r] * y;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    solve3(ata, aty)[0]
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let k = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= k * p;
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn amps(a2: f64) -> LogicalAmplitudes {
        LogicalAmplitudes::from_alpha_sq(a2).unwrap()
    }

    fn reference_f(kind: CodeKind, dt: f64) -> (f64, f64) {
        let (c1, c2, c3) = (dt.cos(), (2.0 * dt).cos(), (3.0 * dt).cos());
        match kind {
            CodeKind::Steane7 => ((c1 * c2 * c3).powi(2), 1.0 - (c1 * c2 * c3).powi(2)),
            CodeKind::Laflamme5 => (
                c1.powi(4) * c2 * c2,
                dt.sin().powi(2) * (1.0 + (c1 * c2).powi(2)),
            ),
        }
    }

    fn reference_p(kind: CodeKind, depth: u32, a2: f64, dt: f64) -> f64 {
        let (f0, f1) = reference_f(kind, dt);
        let lam2 = (2.0 * a2 - 1.0).powi(2);
        match (kind, depth) {
            (CodeKind::Steane7, 1) => f1 * (1.0 - lam2),
            (CodeKind::Laflamme5, 1) => 1.0 - f0 - f1 * lam2,
            (CodeKind::Steane7, 2) => {
                (1.0 - f0.powi(7)
                    - 7.0 * f0.powi(6) * f1
                    - 28.0 * f0.powi(4) * f1.powi(3)
                    - 7.0 * f0.powi(3) * f1.powi(4)
                    - 21.0 * f0.powi(2) * f1.powi(5))
                    * (1.0 - lam2)
            }
            (CodeKind::Laflamme5, 2) => {
                1.0 - (f0.powi(5)
                    + 5.0 * f0.powi(4) * (1.0 - f0)
                    + f1.powi(4)
                    + 4.0 * f0 * f1.powi(3) * (1.0 - f1))
                    - (4.0 * f0 * f1.powi(3) + 6.0 * f0 * f0 * f1 * f1 - 8.0 * f0 * f0 * f1.powi(3))
                        * lam2
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn f_functions_at_endpoints() {
        for kind in CodeKind::ALL {
            let f = f_functions(kind, 0.0);
            assert_eq!((f.f0, f.f1), (1.0, 0.0));
        }
        let f = f_functions(CodeKind::Steane7, FRAC_PI_2);
        assert!(f.f0.abs() < 1e-30 && (f.f1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn f_functions_match_reference_products() {
        for kind in CodeKind::ALL {
            for i in 0..=200 {
                let dt = PI * f64::from(i) / 200.0;
                let f = f_functions(kind, dt);
                let (f0, f1) = reference_f(kind, dt);
                assert!((f.f0 - f0).abs() < 1e-14 && (f.f1 - f1).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn steane_completeness_and_laflamme_deficit() {
        for i in 1..50 {
            let dt = 0.031 * f64::from(i);
            let s = f_functions(CodeKind::Steane7, dt);
            assert!((s.f0 + s.f1 - 1.0).abs() < 1e-14);
            let l = f_functions(CodeKind::Laflamme5, dt);
            assert!(l.f0 + l.f1 < 1.0);
            assert!((l.lost() - laflamme_lost(dt).0).abs() < 1e-14);
            assert!((1.0 - l.f0 - laflamme_lost(dt).1).abs() < 1e-14);
        }
    }

    #[test]
    fn laflamme_f1_series() {
        let dt: f64 = 1e-3;
        let f1 = f_functions(CodeKind::Laflamme5, dt).f1;
        assert!((f1 / (dt * dt) - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rearranged_forms_equal_reference_forms() {
        for kind in CodeKind::ALL {
            for depth in 1..=2 {
                for a2 in [0.0, 0.1, 0.25, 0.5, 0.8, 1.0] {
                    for i in 0..=200 {
                        let dt = PI * f64::from(i) / 200.0;
                        let got = p_exact(kind, depth, &amps(a2), dt).unwrap();
                        let want = reference_p(kind, depth, a2, dt);
                        assert!(
                            (got - want).abs() < 1e-12,
                            "{kind} d{depth} a2={a2} dt={dt}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn small_dt_coefficients() {
        let cases = [
            (CodeKind::Steane7, 1, 2, 14.0),
            (CodeKind::Laflamme5, 1, 2, 6.0),
            (CodeKind::Steane7, 2, 4, 4116.0),
            (CodeKind::Laflamme5, 2, 4, 360.0),
        ];
        for (kind, depth, power, want) in cases {
            let got = fit_leading_coefficient(
                |dt| p_exact(kind, depth, &LogicalAmplitudes::symmetric(), dt).unwrap(),
                power,
                1e-4,
                1e-3,
                41,
            );
            assert!((got / want - 1.0).abs() < 1e-4, "{kind} d{depth}: {got}");
        }
    }

    #[test]
    fn leading_order_matches_series_for_all_amps() {
        for kind in CodeKind::ALL {
            for depth in 1..=2 {
                for a2 in [0.0, 0.3, 0.5] {
                    let power = 2 * depth as i32;
                    let lead = p_leading_order(kind, depth, &amps(a2), 1.0).unwrap();
                    if lead == 0.0 {
                        continue;
                    }
                    let fit = fit_leading_coefficient(
                        |dt| p_exact(kind, depth, &amps(a2), dt).unwrap(),
                        power,
                        1e-4,
                        1e-3,
                        41,
                    );
                    assert!((fit / lead - 1.0).abs() < 1e-4, "{kind} d{depth} a2={a2}");
                }
            }
        }
    }

    #[test]
    fn invalid_depths_rejected() {
        assert!(p_exact(CodeKind::Steane7, 3, &amps(0.5), 0.1).is_err());
        assert!(p_leading_order(CodeKind::Steane7, 0, &amps(0.5), 0.1).is_err());
        assert!(p_recursive(CodeKind::Steane7, 0, 0.1).is_err());
    }

    #[test]
    fn naive_estimate() {
        let e = p_perturbative_naive(2, FRAC_PI_4);
        assert!((e.exact - 0.25).abs() < 1e-15);
        assert_eq!(p_perturbative_naive(7, 0.0).exact, 0.0);
        let dt = 1e-4;
        let e = p_perturbative_naive(7, dt);
        assert!((e.exact / (dt * dt) - 6.0).abs() < 1e-6);
        assert!((e.small_dt / (dt * dt) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn recursion_values() {
        let dt: f64 = 0.01;
        let d4 = dt.powi(4);
        assert!((p_recursive(CodeKind::Steane7, 1, dt).unwrap() - 14.0 * dt * dt).abs() < 1e-18);
        assert!(
            (p_recursive(CodeKind::Steane7, 2, dt).unwrap() / (4116.0 * d4) - 1.0).abs() < 1e-12
        );
        let n3 = 21.0 * (4116.0 * d4).powi(2);
        assert!((p_recursive(CodeKind::Steane7, 3, dt).unwrap() / n3 - 1.0).abs() < 1e-12);
        assert!(
            (p_recursive(CodeKind::Laflamme5, 2, dt).unwrap() / (360.0 * d4) - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn recursion_curves_cross_at_threshold() {
        for kind in CodeKind::ALL {
            let t = threshold(kind);
            let dt = t.threshold.sqrt();
            let p1 = p_recursive(kind, 1, dt).unwrap();
            assert!((p1 - 1.0 / t.block_pairs as f64).abs() < 1e-12);
            for n in 2..=4 {
                assert!((p_recursive(kind, n, dt).unwrap() - p1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn thresholds() {
        let s = threshold(CodeKind::Steane7);
        assert_eq!(s.denominator, 294);
        assert!((s.threshold - 3.4e-3).abs() < 0.05e-3);
        let l = threshold(CodeKind::Laflamme5);
        assert_eq!(l.denominator, 60);
        assert!((l.threshold - 1.7e-2).abs() < 0.05e-2);
        for t in [s, l] {
            assert_eq!(t.denominator, t.block_pairs * t.depth_one_coefficient);
        }
    }

    #[test]
    fn dipole_estimate() {
        let d = estimate_delta_dipole(1.5e-8).unwrap();
        assert!((3e-3..=3e-2).contains(&d), "{d}");
        let half = estimate_delta_dipole(3e-8).unwrap();
        assert!((d / half - 8.0).abs() < 1e-12);
        let near = estimate_delta_dipole(1.5e-9).unwrap();
        assert!((near / d - 1e3).abs() < 1e-9);
        assert!(matches!(
            estimate_delta_dipole(0.0),
            Err(Error::NonPositiveDistance(_))
        ));
        assert!(estimate_delta_dipole(-1.0).is_err());
    }

    #[test]
    fn recursion_overestimates_exact_below_threshold() {
        for kind in CodeKind::ALL {
            let limit = threshold(kind).threshold.sqrt();
            for i in 1..=20 {
                let dt = 0.5 * limit * f64::from(i) / 20.0;
                let exact = p_exact(kind, 2, &LogicalAmplitudes::symmetric(), dt).unwrap();
                assert!(p_recursive(kind, 2, dt).unwrap() >= exact, "{kind} {dt}");
            }
        }
    }

    proptest! {
        #[test]
        fn steane_outer_polynomial_in_unit_interval(f0 in 0.0f64..=1.0) {
            let f1 = 1.0 - f0;
            let p = 1.0 - f0.powi(7) - 7.0 * f0.powi(6) * f1 - 28.0 * f0.powi(4) * f1.powi(3)
                - 7.0 * f0.powi(3) * f1.powi(4) - 21.0 * f0.powi(2) * f1.powi(5);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
            prop_assert!((steane_outer(f1, f0) - p).abs() < 1e-12);
        }

        #[test]
        fn exact_curves_are_probabilities(dt in 0.0f64..PI, a2 in 0.0f64..=1.0) {
            for kind in CodeKind::ALL {
                for depth in 1..=2 {
                    let p = p_exact(kind, depth, &amps(a2), dt).unwrap();
                    prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
                    prop_assert!(p <= p_exact(kind, depth, &LogicalAmplitudes::symmetric(), dt).unwrap() + 1e-12);
                }
            }
        }
    }
}
