//! Evaluating cases and comparing them with their reference values.

use std::time::Instant;

use rayon::prelude::*;
use threecenter_core::precision::{format_sci, group_digits, matching_digits};
use threecenter_core::three_center::{
    cartesian, convergence_study, geometry_from_cartesian, three_center_integral,
};
use threecenter_core::{Float, IntegralResult, Orbital, PrecisionContext, ProlateFrame};

use crate::config::{significant_digits, BenchCase, BenchConfig, OrbitalSpec, DEFAULT_DIGITS};
use crate::error::{BenchError, Result, EXIT_MISMATCH, EXIT_NUMERICAL};
use crate::report::{CheckOutcome, ComparisonReport, Status};

/// Extra digits and expansion terms used for `--seed-oracle` reruns.
pub const ORACLE_EXTRA_DIGITS: u32 = 10;
pub const ORACLE_EXTRA_L: u32 = 10;

/// Overrides applied on top of what each case declares.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub digits: Option<u32>,
    pub l_max: Option<u32>,
    /// Relative quadrature tolerance as a decimal string; defaults to
    /// `10^-digits`.
    pub tol: Option<String>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub seed_oracle: bool,
}

impl RunOptions {
    pub fn digits_for(&self, case: &BenchCase) -> u32 {
        self.digits.or(case.target_digits).unwrap_or(DEFAULT_DIGITS)
    }

    pub fn l_max_for(&self, case: &BenchCase) -> u32 {
        self.l_max.unwrap_or(case.l_max)
    }

    fn tolerance(&self, ctx: &PrecisionContext) -> threecenter_core::Result<Float> {
        match &self.tol {
            Some(t) => ctx.parse(t),
            None => Ok(ctx.default_tolerance()),
        }
    }

    fn pool(&self) -> Result<Option<rayon::ThreadPool>> {
        match self.jobs {
            None => Ok(None),
            Some(0) => Err(BenchError::Invalid("--jobs must be at least 1".into())),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Some)
                .map_err(|e| BenchError::Invalid(format!("cannot start {n} workers: {e}"))),
        }
    }
}

fn orbital(o: &OrbitalSpec, ctx: &PrecisionContext) -> threecenter_core::Result<Orbital> {
    Orbital::new(ctx.parse(&o.n)?, o.l, o.m, ctx.parse(&o.zeta)?)
}

/// Orbitals and prolate frame of `case` at the precision of `ctx`.
pub fn case_inputs(case: &BenchCase, ctx: &PrecisionContext) -> threecenter_core::Result<(Orbital, Orbital, ProlateFrame)> {
    let a = orbital(&case.orbitals.0, ctx)?;
    let b = orbital(&case.orbitals.1, ctx)?;
    let p = |i: usize| cartesian(&case.geometry[i][0], &case.geometry[i][1], &case.geometry[i][2], ctx);
    let frame = geometry_from_cartesian(&p(0)?, &p(1)?, &p(2)?, ctx)?;
    Ok((a, b, frame))
}

fn numerical(case: &BenchCase) -> impl Fn(threecenter_core::Error) -> BenchError + '_ {
    move |source| BenchError::Numerical {
        case: case.id.clone(),
        source,
    }
}

/// Evaluates one case at `digits` with the expansion truncated at `l_max`.
pub fn evaluate_case(case: &BenchCase, digits: u32, l_max: u32, tol: Option<&str>) -> Result<IntegralResult> {
    let ctx = PrecisionContext::new(digits).map_err(numerical(case))?;
    let opts = RunOptions {
        tol: tol.map(String::from),
        ..RunOptions::default()
    };
    let tol = opts.tolerance(&ctx).map_err(numerical(case))?;
    let (a, b, frame) = case_inputs(case, &ctx).map_err(numerical(case))?;
    three_center_integral(&a, &b, &frame, l_max, &tol, &ctx).map_err(numerical(case))
}

/// Leading significant digits shared by `value` and the decimal string
/// `reference`, at most the number printed in `reference`.
///
/// Two counts are taken after exponent alignment and the larger returned:
/// the common prefix of the digit strings (which is how printed tables mark
/// correct digits), and the largest `k` at which both round to the same `k`
/// digits (which keeps `1.4999…` and `1.5000…` from counting as one digit).
pub fn agreeing_digits(value: &Float, reference: &str) -> u32 {
    let printed = significant_digits(reference);
    let value_digits = (value.prec() as f64 * std::f64::consts::LOG10_2) as u32;
    let Ok(ctx) = PrecisionContext::new(printed.max(value_digits) + 10) else {
        return 0;
    };
    let Ok(r) = ctx.parse(reference) else {
        return 0;
    };
    let rounded = (1..=printed)
        .rev()
        .find(|&k| format_sci(value, k as usize) == format_sci(&r, k as usize))
        .unwrap_or(0);
    let split = |s: String| -> (String, String) {
        let (m, e) = s.split_once('E').unwrap_or((&s, ""));
        (m.chars().filter(|c| c.is_ascii_digit() || *c == '-').collect(), e.to_string())
    };
    let (va, ea) = split(format_sci(value, printed as usize + 3));
    let (vb, eb) = split(format_sci(&r, printed as usize));
    let prefix = if ea == eb && va.starts_with('-') == vb.starts_with('-') {
        let digits = |s: &str| s.trim_start_matches('-').chars().collect::<Vec<_>>();
        let (da, db) = (digits(&va), digits(&vb));
        da.iter().zip(&db).take_while(|(x, y)| x == y).count() as u32
    } else {
        0
    };
    rounded.max(prefix)
}

/// `true` when `value`, rounded to the digits printed in `reference`,
/// reproduces it exactly.
pub fn reproduces_printed(value: &Float, reference: &str) -> bool {
    agreeing_digits(value, reference) == significant_digits(reference)
}

/// Compares an evaluated case with its reference value and cross-checks.
pub fn compare(case: &BenchCase, result: &IntegralResult, digits: u32) -> ComparisonReport {
    let computed = format_sci(&result.value, digits as usize);
    let (reference, matching, required, status) = match (&case.reference_value, case.reference_digits()) {
        (Some(r), Some(trusted)) => {
            let m = agreeing_digits(&result.value, r);
            let need = trusted.min(digits);
            (compact(r), m, need, Some(Status::grade(m, need)))
        }
        _ => (String::new(), 0, 0, None),
    };
    // A cross-check cannot be held to more digits than it shares with the
    // reference value itself; some underlines overstate that by one digit.
    let reference_float = case.reference_value.as_deref().and_then(|r| {
        let ctx = PrecisionContext::new(significant_digits(r) + 10).ok()?;
        ctx.parse(r).ok()
    });
    let checks: Vec<CheckOutcome> = case
        .checks
        .iter()
        .map(|c| {
            let shared = reference_float
                .as_ref()
                .map_or(u32::MAX, |r| agreeing_digits(r, &c.value));
            CheckOutcome {
                source: c.source.clone(),
                value: compact(&c.value),
                matching_digits: agreeing_digits(&result.value, &c.value),
                required_digits: c.min_digits.min(digits).min(shared),
            }
        })
        .collect();
    let status = status.map(|s| {
        checks
            .iter()
            .map(|c| if c.passed() { Status::Match } else { Status::Partial })
            .fold(s, Status::worst)
    });
    ComparisonReport {
        case_id: case.id.clone(),
        label: case.label().to_string(),
        l_max: result.l_max_used,
        target_digits: digits,
        computed,
        reference,
        matching_digits: matching,
        required_digits: required,
        status,
        truncation_error: format_sci(&result.est_truncation_error, 3),
        quad_error: format_sci(&result.quad_error, 3),
        checks,
        oracle: None,
        oracle_digits: None,
        wall_time_s: result.wall_time.as_secs_f64(),
    }
}

/// A decimal string without the grouping spaces.
fn compact(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Result of evaluating every case of a config.
#[derive(Debug, Default)]
pub struct TableRun {
    pub name: String,
    pub reports: Vec<ComparisonReport>,
    /// `(case id, diagnostic)` for cases that failed numerically.
    pub failures: Vec<(String, String)>,
}

impl TableRun {
    /// 0 when every referenced case matches, 3 on any numerical failure,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            EXIT_NUMERICAL
        } else if self.reports.iter().any(|r| matches!(r.status, Some(s) if s != Status::Match)) {
            EXIT_MISMATCH
        } else {
            0
        }
    }
}

fn run_one(case: &BenchCase, opts: &RunOptions) -> Result<ComparisonReport> {
    let start = Instant::now();
    let digits = opts.digits_for(case);
    let l_max = opts.l_max_for(case);
    let result = evaluate_case(case, digits, l_max, opts.tol.as_deref())?;
    let mut report = compare(case, &result, digits);
    if opts.seed_oracle {
        let oracle = evaluate_case(case, digits + ORACLE_EXTRA_DIGITS, l_max + ORACLE_EXTRA_L, None)?;
        let shown = format_sci(&oracle.value, (digits + ORACLE_EXTRA_DIGITS) as usize);
        report.oracle_digits = Some(matching_digits(&result.value, &oracle.value, digits));
        report.oracle = Some(shown);
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Evaluates the cases of `config` (only `only` when given), concurrently up
/// to `opts.jobs`; reports keep config order.
pub fn run_cases(config: &BenchConfig, only: Option<&str>, opts: &RunOptions) -> Result<TableRun> {
    let cases: Vec<&BenchCase> = match only {
        Some(id) => vec![config
            .case(id)
            .ok_or_else(|| BenchError::Invalid(format!("no case `{id}` in {}", config.name)))?],
        None => config.cases.iter().collect(),
    };
    let work = || -> Vec<Result<ComparisonReport>> { cases.par_iter().map(|c| run_one(c, opts)).collect() };
    let outcomes = match opts.pool()? {
        Some(pool) => pool.install(work),
        None => work(),
    };
    let mut run = TableRun {
        name: config.name.clone(),
        ..TableRun::default()
    };
    for (case, outcome) in cases.iter().zip(outcomes) {
        match outcome {
            Ok(r) => run.reports.push(r),
            Err(e @ BenchError::Numerical { .. }) => run.failures.push((case.id.clone(), e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(run)
}

/// One truncation level of a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub l_max: u32,
    pub value: String,
    /// Digits shared with the previous level.
    pub to_previous: Option<u32>,
    /// Digits shared with the highest level of the study.
    pub to_last: u32,
    /// Published value at this level, if the case lists one.
    pub published: Option<PublishedLevel>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublishedLevel {
    pub value: String,
    /// Digits of the computed value that agree with the published one.
    pub matching_digits: u32,
    /// Whether the computed value rounds to the published one.
    pub reproduced: bool,
    /// Digits the published value shares with the published converged value.
    pub converged_digits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub case_id: String,
    pub label: String,
    pub target_digits: u32,
    pub rows: Vec<ConvergenceRow>,
}

/// Values of `case` truncated at each of `levels`, which must be strictly
/// ascending; all levels come from one summation at the highest.
pub fn run_convergence(case: &BenchCase, levels: &[u32], opts: &RunOptions) -> Result<ConvergenceReport> {
    if levels.is_empty() {
        return Err(BenchError::Invalid("empty l_max list".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::Invalid(format!("l_max list {levels:?} is not strictly ascending")));
    }
    let digits = opts.digits_for(case);
    let ctx = PrecisionContext::new(digits).map_err(numerical(case))?;
    let tol = opts.tolerance(&ctx).map_err(numerical(case))?;
    let (a, b, frame) = case_inputs(case, &ctx).map_err(numerical(case))?;
    let study = convergence_study(&a, &b, &frame, levels, &tol, &ctx).map_err(numerical(case))?;
    let last = &study.results.last().expect("levels is non-empty").value;
    let rows = study
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let published = case.partials.iter().find(|p| p.l_max == r.l_max_used).map(|p| PublishedLevel {
                value: compact(&p.value),
                matching_digits: agreeing_digits(&r.value, &p.value),
                reproduced: reproduces_printed(&r.value, &p.value),
                converged_digits: p.converged_digits,
            });
            ConvergenceRow {
                l_max: r.l_max_used,
                value: format_sci(&r.value, digits as usize),
                to_previous: i.checked_sub(1).map(|j| study.matching_digits[j]),
                to_last: matching_digits(&r.value, last, digits),
                published,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        case_id: case.id.clone(),
        label: case.label().to_string(),
        target_digits: digits,
        rows,
    })
}

pub fn render_convergence(report: &ConvergenceReport) -> String {
    let mut s = format!(
        "# convergence of {} ({}) at {} digits\n",
        report.case_id, report.label, report.target_digits
    );
    s.push_str("  l_max  value                                         prev  last  published\n");
    for row in &report.rows {
        let prev = row.to_previous.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "  [{:>3}]  {:44}  {:>4}  {:>4}",
            row.l_max,
            group_digits(&row.value),
            prev,
            row.to_last
        ));
        if let Some(p) = &row.published {
            s.push_str(&format!(
                "  {} ({} digits{}; converged to {})",
                group_digits(&p.value),
                p.matching_digits,
                if p.reproduced { ", reproduced" } else { "" },
                p.converged_digits
            ));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreeing_digit_counts() {
        let ctx = PrecisionContext::new(30).unwrap();
        let v = ctx.parse("2.70272902197970938269454716349E-02").unwrap();
        assert_eq!(agreeing_digits(&v, "2.70272 90219 79709 38269 45472 E-02"), 26);
        assert!(reproduces_printed(&v, "2.70272 90219 79709 38269 45472 E-02"));
        assert_eq!(agreeing_digits(&v, "2.70272 90219 8 E-02"), 12);
        assert_eq!(agreeing_digits(&v, "2.70272 90189 8 E-02"), 9);
        let u = ctx.parse("1.60664 60408 09377 E-01").unwrap();
        assert_eq!(agreeing_digits(&u, "1.60664 6078 E-01"), 8);
        assert_eq!(agreeing_digits(&v, "-2.70272 E-02"), 0);
        assert_eq!(agreeing_digits(&v, "2.70272 E-03"), 0);
        // rounding boundaries do not hide agreement
        let w = ctx.parse("1.4999999").unwrap();
        assert_eq!(agreeing_digits(&w, "1.5000000"), 7);
    }

    #[test]
    fn rejects_bad_levels() {
        let config = crate::reference::bundled_config("threecenter1");
        let case = &config.cases[0];
        let opts = RunOptions::default();
        assert!(matches!(run_convergence(case, &[], &opts), Err(BenchError::Invalid(_))));
        assert!(matches!(run_convergence(case, &[10, 5], &opts), Err(BenchError::Invalid(_))));
        assert!(matches!(run_convergence(case, &[5, 5], &opts), Err(BenchError::Invalid(_))));
    }

    #[test]
    fn unknown_case_is_rejected() {
        let config = crate::reference::bundled_config("threecenter1");
        let err = run_cases(&config, Some("nope"), &RunOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG);
    }
}
