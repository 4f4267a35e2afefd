use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use zzqec::closedform::{fit_leading_coefficient, p_exact};
use zzqec::recovery::{BruteEngine, FactorizedEngine};
use zzqec::{expand_concatenated, CodeKind, ConcatLayout, Logical, LogicalAmplitudes};

fn amps(a2: f64) -> LogicalAmplitudes {
    LogicalAmplitudes::from_alpha_sq(a2).unwrap()
}

fn engines(kind: CodeKind, depth: u32) -> FactorizedEngine {
    FactorizedEngine::new(&ConcatLayout::of(kind, depth).unwrap()).unwrap()
}

#[test]
fn symmetric_amplitudes_fail_most() {
    let alphas: Vec<f64> = (0..9).map(|i| f64::from(i) / 8.0).collect();
    for kind in CodeKind::ALL {
        for depth in 1..=2 {
            let e = engines(kind, depth);
            for i in 0..50 {
                let dt = PI * f64::from(i) / 50.0;
                let peak = e
                    .failure_probability(&LogicalAmplitudes::symmetric(), dt)
                    .p_fail;
                for &a2 in &alphas {
                    assert!(
                        e.failure_probability(&amps(a2), dt).p_fail <= peak + 1e-12,
                        "{kind} d{depth} {dt} {a2}"
                    );
                }
            }
        }
    }
}

#[test]
fn steane_depth_one_is_symmetric_about_quarter_period() {
    let e = BruteEngine::new(&ConcatLayout::of(CodeKind::Steane7, 1).unwrap()).unwrap();
    for i in 0..=40 {
        let dt = FRAC_PI_2 * f64::from(i) / 40.0;
        for a2 in [0.2, 0.5] {
            let a = e.failure_probability(&amps(a2), dt).unwrap().p_fail;
            let b = e.failure_probability(&amps(a2), PI - dt).unwrap().p_fail;
            assert!((a - b).abs() < 1e-12);
        }
    }
}

/// Pins `A + B·λ²` at `|α|² = 0.5` and `1`, then checks all nine grid amplitudes.
#[test]
fn amplitude_dependence_is_affine_in_imbalance_squared() {
    let check = |p: &dyn Fn(f64) -> f64| {
        let lam2 = |a2: f64| (2.0 * a2 - 1.0).powi(2);
        let (a, b) = {
            let p0 = p(0.5);
            let p1 = p(1.0);
            (p0, p1 - p0)
        };
        for i in 0..9 {
            let a2 = f64::from(i) / 8.0;
            let residual = p(a2) - (a + b * lam2(a2));
            assert!(residual.abs() < 1e-10, "residual {residual}");
        }
    };
    for kind in CodeKind::ALL {
        let brute = BruteEngine::new(&ConcatLayout::of(kind, 1).unwrap()).unwrap();
        let fact = engines(kind, 2);
        for i in 0..25 {
            let dt = PI * f64::from(i) / 25.0;
            check(&|a2| brute.failure_probability(&amps(a2), dt).unwrap().p_fail);
            check(&|a2| fact.failure_probability(&amps(a2), dt).p_fail);
        }
    }
    let lf = BruteEngine::new(&ConcatLayout::of(CodeKind::Laflamme5, 2).unwrap()).unwrap();
    for dt in [0.1, 0.6, 1.3] {
        check(&|a2| lf.failure_probability(&amps(a2), dt).unwrap().p_fail);
    }
}

#[test]
fn two_blocks_fail_independently_at_leading_order() {
    let sym = LogicalAmplitudes::symmetric();
    for (kind, pairs) in [(CodeKind::Steane7, 21.0), (CodeKind::Laflamme5, 10.0)] {
        let d1 = engines(kind, 1);
        let d2 = engines(kind, 2);
        let c1 = fit_leading_coefficient(
            |dt| d1.failure_probability(&sym, dt).p_fail,
            2,
            1e-3,
            1e-2,
            41,
        );
        let c2 = fit_leading_coefficient(
            |dt| d2.failure_probability(&sym, dt).p_fail,
            4,
            1e-3,
            1e-2,
            41,
        );
        assert!(
            (c2 / (pairs * c1 * c1) - 1.0).abs() < 1e-3,
            "{kind}: {c2} vs {pairs}·{c1}²"
        );
    }
}

#[test]
fn laflamme_depth_two_engines_agree_on_fine_grid() {
    let layout = ConcatLayout::of(CodeKind::Laflamme5, 2).unwrap();
    let brute = BruteEngine::new(&layout).unwrap();
    let fact = FactorizedEngine::new(&layout).unwrap();
    for i in 0..100 {
        let dt = FRAC_PI_2 * f64::from(i) / 99.0;
        for a2 in [0.1, 0.5, 0.9] {
            let b = brute.failure_probability(&amps(a2), dt).unwrap().p_fail;
            let f = fact.failure_probability(&amps(a2), dt).p_fail;
            assert!((b - f).abs() < 1e-9, "dt={dt} a2={a2}");
        }
    }
}

#[test]
fn laflamme_depth_two_falls_back_to_zero() {
    let e = engines(CodeKind::Laflamme5, 2);
    for a2 in [0.0, 0.3, 0.5, 1.0] {
        assert!(e.failure_probability(&amps(a2), FRAC_PI_2).p_fail.abs() < 1e-9);
    }
}

#[test]
fn steane_depth_two_word_has_full_support() {
    let layout = ConcatLayout::of(CodeKind::Steane7, 2).unwrap();
    let word = expand_concatenated(&layout, Logical::Zero).unwrap();
    assert_eq!(word.len(), 16_777_216);
    let mut strings: Vec<u64> = word.iter().map(|k| k.string.0).collect();
    drop(word);
    strings.sort_unstable();
    strings.dedup();
    assert_eq!(strings.len(), 16_777_216);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engines_return_probabilities(dt in 0.0f64..PI, a2 in 0.0f64..=1.0) {
        for kind in CodeKind::ALL {
            for depth in 1..=2 {
                let p = engines(kind, depth).failure_probability(&amps(a2), dt).p_fail;
                prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
                prop_assert!((p - p_exact(kind, depth, &amps(a2), dt).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn brute_depth_one_matches_factorized(dt in 0.0f64..PI, a2 in 0.0f64..=1.0) {
        for kind in CodeKind::ALL {
            let brute = BruteEngine::new(&ConcatLayout::of(kind, 1).unwrap()).unwrap();
            let b = brute.failure_probability(&amps(a2), dt).unwrap().p_fail;
            let f = engines(kind, 1).failure_probability(&amps(a2), dt).p_fail;
            prop_assert!((b - f).abs() < 1e-12);
        }
    }
}
