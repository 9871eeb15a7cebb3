//! Timing of the reduced auxiliary function under each Legendre strategy.

use std::time::{Duration, Instant};

use threecenter_core::auxiliary::aux_reduced_with_strategy;
use threecenter_core::precision::{format_sci, matching_digits};
use threecenter_core::{AuxPair, AuxParams, LegendreStrategy, PrecisionContext};

use crate::error::{BenchError, Result};

#[derive(Clone, Debug)]
pub struct LegendreBench {
    pub l: u32,
    pub lambda: u32,
    pub q: u32,
    pub n1: String,
    pub n2: String,
    pub p1: String,
    pub p2: String,
    pub xi_c: String,
    pub repetitions: usize,
    pub digits: u32,
}

impl Default for LegendreBench {
    fn default() -> Self {
        LegendreBench {
            l: 3,
            lambda: 1,
            q: 0,
            n1: "3".into(),
            n2: "2".into(),
            p1: "2.5".into(),
            p2: "1.5".into(),
            xi_c: "2".into(),
            repetitions: 3,
            digits: 20,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrategyTiming {
    pub strategy: LegendreStrategy,
    pub samples: Vec<Duration>,
    pub median: Duration,
    pub j_value: String,
    pub k_value: String,
}

#[derive(Clone, Debug)]
pub struct LegendreBenchReport {
    pub params: LegendreBench,
    pub timings: Vec<StrategyTiming>,
    /// Smallest number of agreeing digits between any strategy and the first.
    pub agreement: u32,
}

impl LegendreBenchReport {
    /// Strategies from fastest to slowest median; informational only.
    pub fn ranking(&self) -> Vec<LegendreStrategy> {
        let mut t: Vec<&StrategyTiming> = self.timings.iter().collect();
        t.sort_by_key(|s| s.median);
        t.into_iter().map(|s| s.strategy).collect()
    }

    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "# reduced auxiliary timing: L={} Lambda={} q={} N1={} N2={} p1={} p2={} xi_C={} ({} digits, {} repetitions)\n",
            p.l, p.lambda, p.q, p.n1, p.n2, p.p1, p.p2, p.xi_c, p.digits, p.repetitions
        );
        for t in &self.timings {
            s.push_str(&format!(
                "{:10}  median {:>10.3} ms  J {}  K {}\n",
                t.strategy.to_string(),
                t.median.as_secs_f64() * 1e3,
                t.j_value,
                t.k_value
            ));
        }
        let order: Vec<String> = self.ranking().iter().map(|s| s.to_string()).collect();
        s.push_str(&format!("agreement {} digits; fastest first: {}\n", self.agreement, order.join(" < ")));
        s
    }
}

fn median(samples: &[Duration]) -> Duration {
    let mut v = samples.to_vec();
    v.sort();
    v[v.len() / 2]
}

/// Times `aux_reduced` under every [`LegendreStrategy`] and checks that all
/// strategies agree to the target precision. Disagreement is an error, not a
/// timing result.
pub fn bench_legendre(params: &LegendreBench) -> Result<LegendreBenchReport> {
    if params.repetitions < 3 {
        return Err(BenchError::Invalid(format!(
            "repetitions must be at least 3, got {}",
            params.repetitions
        )));
    }
    let ctx = PrecisionContext::new(params.digits).map_err(|e| BenchError::Invalid(e.to_string()))?;
    let num = |s: &str| ctx.parse(s).map_err(|e| BenchError::Invalid(e.to_string()));
    let aux = AuxParams::new(num(&params.p1)?, num(&params.p2)?, num(&params.xi_c)?)
        .map_err(|e| BenchError::Invalid(e.to_string()))?;
    let (n1, n2) = (num(&params.n1)?, num(&params.n2)?);
    let tol = ctx.default_tolerance();
    let numerical = |source| BenchError::Numerical {
        case: "bench-legendre".into(),
        source,
    };

    let mut timings = Vec::new();
    let mut values: Vec<AuxPair> = Vec::new();
    for strategy in LegendreStrategy::ALL {
        let mut samples = Vec::with_capacity(params.repetitions);
        let mut last = None;
        for _ in 0..params.repetitions {
            let start = Instant::now();
            let r = aux_reduced_with_strategy(params.l, params.lambda, params.q, &n1, &n2, &aux, &tol, strategy, &ctx)
                .map_err(numerical)?;
            samples.push(start.elapsed());
            last = Some(r);
        }
        let r = last.expect("at least three repetitions");
        timings.push(StrategyTiming {
            strategy,
            median: median(&samples),
            samples,
            j_value: format_sci(&r.j_value, params.digits as usize),
            k_value: format_sci(&r.k_value, params.digits as usize),
        });
        values.push(r);
    }

    // values that vanish by parity agree trivially through the absolute check
    let tiny = ctx.pow10(-(params.digits as i32) * 2);
    let agree = |a: &threecenter_core::Float, b: &threecenter_core::Float| {
        if a.clone().abs() < tiny && b.clone().abs() < tiny {
            params.digits
        } else {
            matching_digits(a, b, params.digits)
        }
    };
    let mut agreement = params.digits;
    for (i, v) in values.iter().enumerate().skip(1) {
        for (x, y) in [(&values[0].j_value, &v.j_value), (&values[0].k_value, &v.k_value)] {
            let d = agree(x, y);
            // one digit of slack for values that straddle a rounding boundary
            if d + 1 < params.digits {
                return Err(BenchError::StrategyMismatch {
                    first: timings[0].strategy.to_string(),
                    second: timings[i].strategy.to_string(),
                    a: format_sci(x, params.digits as usize),
                    b: format_sci(y, params.digits as usize),
                    digits: d,
                });
            }
            agreement = agreement.min(d);
        }
    }
    Ok(LegendreBenchReport {
        params: params.clone(),
        timings,
        agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_has_three_samples_each() {
        let p = LegendreBench {
            digits: 12,
            ..LegendreBench::default()
        };
        let r = bench_legendre(&p).unwrap();
        assert_eq!(r.timings.len(), 3);
        assert!(r.timings.iter().all(|t| t.samples.len() == 3));
        assert!(r.agreement >= 11);
        assert_eq!(r.ranking().len(), 3);
        assert!(r.render().contains("fastest first"));
    }

    #[test]
    fn too_few_repetitions() {
        let p = LegendreBench {
            repetitions: 2,
            ..LegendreBench::default()
        };
        assert!(matches!(bench_legendre(&p), Err(BenchError::Invalid(_))));
    }
}
