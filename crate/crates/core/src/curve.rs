//! δt sweeps of the failure probability over any engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{p_exact, p_leading_order, p_recursive};
use crate::codes::{CodeKind, ConcatLayout};
use crate::error::{Error, Result};
use crate::phasestate::LogicalAmplitudes;
use crate::recovery::{BruteEngine, Engine, FactorizedEngine, FailureResult};

/// A δt sweep: `samples` evenly spaced points on `[lo, hi]`, both ends included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRequest {
    pub code: CodeKind,
    pub depth: u32,
    pub engine: Engine,
    pub alpha_sq: f64,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl CurveRequest {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_sq) {
            return Err(Error::AlphaSqOutOfRange(self.alpha_sq));
        }
        if self.lo >= self.hi || self.samples < 2 || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidRange {
                lo: self.lo,
                hi: self.hi,
                samples: self.samples,
            });
        }
        if self.depth == 0 {
            return Err(Error::InvalidDepth(0));
        }
        Ok(())
    }

    pub fn sample_points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| {
                if i + 1 == self.samples {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }

    /// Evaluates every sample point in parallel; results come back in sample order.
    pub fn run(&self) -> Result<Vec<FailureResult>> {
        self.validate()?;
        let amps = LogicalAmplitudes::from_alpha_sq(self.alpha_sq)?;
        let evaluator = Evaluator::new(self.engine, self.code, self.depth)?;
        self.sample_points()
            .par_iter()
            .map(|&dt| {
                // report the requested |α|², not its round trip through the amplitudes
                evaluator.evaluate(&amps, dt).map(|r| FailureResult {
                    alpha_sq: self.alpha_sq,
                    ..r
                })
            })
            .collect()
    }
}

/// An engine prepared for one `(code, depth)` pair.
pub enum Evaluator {
    Brute(BruteEngine),
    Factorized(FactorizedEngine),
    Closed { code: CodeKind, depth: u32 },
    Perturbative { code: CodeKind, depth: u32 },
}

impl Evaluator {
    pub fn new(engine: Engine, code: CodeKind, depth: u32) -> Result<Self> {
        let scale = || Error::ScaleExceeded {
            engine: engine.name(),
            code: code.to_string(),
            depth,
        };
        match engine {
            Engine::Brute => Ok(Evaluator::Brute(BruteEngine::new(&ConcatLayout::of(
                code, depth,
            )?)?)),
            Engine::Factorized => Ok(Evaluator::Factorized(FactorizedEngine::new(
                &ConcatLayout::of(code, depth)?,
            )?)),
            Engine::ClosedForm if depth == 0 => Err(Error::InvalidDepth(0)),
            Engine::ClosedForm if depth > 2 => Err(scale()),
            Engine::ClosedForm => Ok(Evaluator::Closed { code, depth }),
            Engine::Perturbative if depth == 0 => Err(Error::InvalidDepth(0)),
            Engine::Perturbative => Ok(Evaluator::Perturbative { code, depth }),
        }
    }

    pub fn evaluate(&self, amps: &LogicalAmplitudes, delta_t: f64) -> Result<FailureResult> {
        let point = |engine, code, depth, p_fail| FailureResult {
            delta_t,
            p_fail,
            engine,
            code,
            depth,
            alpha_sq: amps.alpha_sq(),
        };
        match *self {
            Evaluator::Brute(ref e) => e.failure_probability(amps, delta_t),
            Evaluator::Factorized(ref e) => Ok(e.failure_probability(amps, delta_t)),
            Evaluator::Closed { code, depth } => Ok(point(
                Engine::ClosedForm,
                code,
                depth,
                p_exact(code, depth, amps, delta_t)?,
            )),
            Evaluator::Perturbative { code, depth } => {
                // Beyond depth 2 only the recursion is available; it assumes the worst-case amplitudes.
                let p = if depth <= 2 {
                    p_leading_order(code, depth, amps, delta_t)?
                } else {
                    p_recursive(code, depth, delta_t)?
                };
                Ok(point(Engine::Perturbative, code, depth, p))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(engine: Engine, code: CodeKind, depth: u32) -> CurveRequest {
        CurveRequest {
            code,
            depth,
            engine,
            alpha_sq: 0.5,
            lo: 0.0,
            hi: 1.5,
            samples: 7,
        }
    }

    #[test]
    fn sample_points_include_both_ends() {
        let pts = request(Engine::ClosedForm, CodeKind::Steane7, 1).sample_points();
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[6], 1.5);
        assert!((pts[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn invalid_requests_rejected() {
        let mut r = request(Engine::ClosedForm, CodeKind::Steane7, 1);
        r.alpha_sq = 1.5;
        assert!(matches!(r.run(), Err(Error::AlphaSqOutOfRange(_))));
        let mut r = request(Engine::ClosedForm, CodeKind::Steane7, 1);
        r.samples = 1;
        assert!(matches!(r.run(), Err(Error::InvalidRange { .. })));
        let mut r = request(Engine::ClosedForm, CodeKind::Steane7, 1);
        r.hi = r.lo;
        assert!(r.run().is_err());
    }

    #[test]
    fn unsupported_combinations_exceed_scale() {
        assert!(matches!(
            request(Engine::Brute, CodeKind::Steane7, 2).run(),
            Err(Error::ScaleExceeded { .. })
        ));
        assert!(matches!(
            request(Engine::ClosedForm, CodeKind::Laflamme5, 3).run(),
            Err(Error::ScaleExceeded { .. })
        ));
    }

    #[test]
    fn engines_agree_on_shared_points() {
        for code in CodeKind::ALL {
            let closed = request(Engine::ClosedForm, code, 1).run().unwrap();
            let brute = request(Engine::Brute, code, 1).run().unwrap();
            let fact = request(Engine::Factorized, code, 1).run().unwrap();
            for ((c, b), f) in closed.iter().zip(&brute).zip(&fact) {
                assert_eq!(c.delta_t, b.delta_t);
                assert!((c.p_fail - b.p_fail).abs() < 1e-12);
                assert!((c.p_fail - f.p_fail).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perturbative_depth_three_uses_recursion() {
        let pts = request(Engine::Perturbative, CodeKind::Steane7, 3)
            .run()
            .unwrap();
        for p in pts {
            assert_eq!(
                p.p_fail,
                p_recursive(CodeKind::Steane7, 3, p.delta_t).unwrap()
            );
        }
    }
}
