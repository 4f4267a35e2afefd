//! Cross-engine and coefficient checks behind `zzqec validate`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;
use zzqec::closedform::{
    block_pairs, depth_one_coefficient, fit_leading_coefficient, p_exact, threshold,
};
use zzqec::recovery::{BruteEngine, FactorizedEngine};
use zzqec::{CodeKind, ConcatLayout, LogicalAmplitudes};

const DEPTH_ONE_TOLERANCE: f64 = 1e-12;
const COEFFICIENT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
    worst: String,
}

#[derive(Debug, Serialize)]
struct Report {
    passed: bool,
    checks: Vec<Check>,
}

/// Largest deviation over a set of labelled comparisons.
fn worst_of(name: &str, tolerance: f64, cases: Vec<(String, f64)>) -> Check {
    let (worst, max_deviation) = cases
        .into_iter()
        .reduce(|acc, (label, d)| {
            if d > acc.1 || d.is_nan() {
                (label, d)
            } else {
                acc
            }
        })
        .unwrap_or_default();
    Check {
        name: name.to_string(),
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
        worst,
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn amps(a2: f64) -> LogicalAmplitudes {
    LogicalAmplitudes::from_alpha_sq(a2).expect("grid values lie in [0, 1]")
}

fn depth_one_brute_vs_closed(n: usize) -> Result<Check, zzqec::Error> {
    let mut cases = Vec::new();
    for kind in CodeKind::ALL {
        let engine = BruteEngine::new(&ConcatLayout::of(kind, 1)?)?;
        for a2 in grid(0.0, 1.0, 9) {
            let a = amps(a2);
            let devs: Vec<(String, f64)> = grid(0.0, PI, n)
                .par_iter()
                .map(|&dt| {
                    let brute = engine.failure_probability(&a, dt)?.p_fail;
                    let closed = p_exact(kind, 1, &a, dt)?;
                    Ok((format!("{kind} a2={a2} dt={dt:.6}"), (brute - closed).abs()))
                })
                .collect::<Result<_, zzqec::Error>>()?;
            cases.extend(devs);
        }
    }
    Ok(worst_of(
        "brute vs closed form, depth 1",
        DEPTH_ONE_TOLERANCE,
        cases,
    ))
}

fn depth_two_factorized_vs_closed(n: usize, tolerance: f64) -> Result<Check, zzqec::Error> {
    let mut cases = Vec::new();
    for kind in CodeKind::ALL {
        let engine = FactorizedEngine::new(&ConcatLayout::of(kind, 2)?)?;
        for a2 in [0.0, 0.25, 0.5, 1.0] {
            let a = amps(a2);
            for dt in grid(0.0, FRAC_PI_2, n) {
                let d =
                    (engine.failure_probability(&a, dt).p_fail - p_exact(kind, 2, &a, dt)?).abs();
                cases.push((format!("{kind} a2={a2} dt={dt:.6}"), d));
            }
        }
    }
    Ok(worst_of(
        "factorized vs closed form, depth 2",
        tolerance,
        cases,
    ))
}

fn depth_two_brute_vs_factorized(n: usize, tolerance: f64) -> Result<Check, zzqec::Error> {
    let layout = ConcatLayout::of(CodeKind::Laflamme5, 2)?;
    let brute = BruteEngine::new(&layout)?;
    let fact = FactorizedEngine::new(&layout)?;
    let mut cases = Vec::new();
    for a2 in [0.0, 0.25, 0.5, 1.0] {
        let a = amps(a2);
        for dt in grid(0.0, FRAC_PI_2, n) {
            let d = (brute.failure_probability(&a, dt)?.p_fail
                - fact.failure_probability(&a, dt).p_fail)
                .abs();
            cases.push((format!("laflamme5 a2={a2} dt={dt:.6}"), d));
        }
    }
    Ok(worst_of(
        "brute vs factorized, laflamme5 depth 2",
        tolerance,
        cases,
    ))
}

fn coefficients() -> Result<Vec<Check>, zzqec::Error> {
    let sym = LogicalAmplitudes::symmetric();
    let mut checks = Vec::new();
    for kind in CodeKind::ALL {
        let d1 = BruteEngine::new(&ConcatLayout::of(kind, 1)?)?;
        let d2 = FactorizedEngine::new(&ConcatLayout::of(kind, 2)?)?;
        let c1 = fit_leading_coefficient(
            |dt| d1.failure_probability(&sym, dt).unwrap().p_fail,
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
        let want1 = depth_one_coefficient(kind) as f64;
        let pairs = block_pairs(kind) as f64;
        let want2 = pairs * want1 * want1;
        for (label, got, want) in [
            ("depth-1 coefficient", c1, want1),
            ("depth-2 coefficient", c2, want2),
            (
                "depth-2 coefficient per block pair",
                c2 / pairs,
                want1 * want1,
            ),
        ] {
            checks.push(worst_of(
                &format!("{kind} {label} = {want}"),
                COEFFICIENT_TOLERANCE,
                vec![(format!("fit {got:.6}"), (got / want - 1.0).abs())],
            ));
        }
    }
    Ok(checks)
}

fn thresholds() -> Check {
    let cases = [(CodeKind::Steane7, 294), (CodeKind::Laflamme5, 60)]
        .into_iter()
        .map(|(kind, den)| {
            let t = threshold(kind);
            let ok = t.denominator == den && t.threshold == 1.0 / den as f64;
            (
                format!("{kind} 1/{}", t.denominator),
                if ok { 0.0 } else { 1.0 },
            )
        })
        .collect();
    worst_of("thresholds 1/294 and 1/60", 0.0, cases)
}

pub fn run(
    grid_size: usize,
    tolerance: f64,
    json: Option<&Path>,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if grid_size < 2 {
        return Err(Box::new(zzqec::Error::InvalidRange {
            lo: 0.0,
            hi: 0.0,
            samples: grid_size,
        }));
    }
    let mut checks = vec![
        depth_one_brute_vs_closed(grid_size)?,
        depth_two_factorized_vs_closed(grid_size, tolerance)?,
        depth_two_brute_vs_factorized(grid_size.min(50), tolerance)?,
    ];
    checks.extend(coefficients()?);
    checks.push(thresholds());

    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag}  {:<52} max dev {:.3e} (tol {:.1e})  worst: {}",
            c.name, c.max_deviation, c.tolerance, c.worst
        );
    }
    let report = Report {
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        let worst = report
            .checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| c.name.as_str())
            .unwrap_or("");
        eprintln!("validation failed: {worst}");
        Ok(ExitCode::from(1))
    }
}
