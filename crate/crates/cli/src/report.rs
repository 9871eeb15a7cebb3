//! Comparison records and their text / CSV renderings.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use threecenter_core::precision::group_digits;

use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// Every required digit agrees, including any cross-checks.
    Match,
    /// At least half of the required digits agree.
    Partial,
    Fail,
}

impl Status {
    /// Classifies `digits` agreeing digits against `required`.
    pub fn grade(digits: u32, required: u32) -> Status {
        if digits >= required {
            Status::Match
        } else if 2 * digits >= required {
            Status::Partial
        } else {
            Status::Fail
        }
    }

    pub fn worst(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Partial, _) | (_, Partial) => Partial,
            _ => Match,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Match => "match",
            Status::Partial => "partial",
            Status::Fail => "fail",
        })
    }
}

impl FromStr for Status {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "match" => Ok(Status::Match),
            "partial" => Ok(Status::Partial),
            "fail" => Ok(Status::Fail),
            _ => Err(BenchError::Invalid(format!("unknown status `{s}`"))),
        }
    }
}

/// Outcome of comparing against one cross-check value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub source: String,
    pub value: String,
    pub matching_digits: u32,
    pub required_digits: u32,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.matching_digits >= self.required_digits
    }
}

/// One evaluated case. Decimal fields are plain `d.ddd…E±XX` strings.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub case_id: String,
    pub label: String,
    pub l_max: u32,
    pub target_digits: u32,
    pub computed: String,
    /// Empty when the case has no reference value.
    pub reference: String,
    /// Agreeing leading significant digits of `computed` and `reference`.
    pub matching_digits: u32,
    pub required_digits: u32,
    /// `None` for cases without a reference.
    pub status: Option<Status>,
    pub truncation_error: String,
    pub quad_error: String,
    pub checks: Vec<CheckOutcome>,
    /// Value from an independent run at raised precision and truncation.
    pub oracle: Option<String>,
    pub oracle_digits: Option<u32>,
    pub wall_time_s: f64,
}

impl ComparisonReport {
    /// Fields that must be identical between runs of the same config at the
    /// same precision; timing is excluded.
    pub fn value_fields(&self) -> (&str, &str, u32, Option<Status>, &str, &str) {
        (
            &self.computed,
            &self.reference,
            self.matching_digits,
            self.status,
            &self.truncation_error,
            &self.quad_error,
        )
    }
}

const CSV_HEADER: [&str; 16] = [
    "case_id",
    "label",
    "l_max",
    "target_digits",
    "computed",
    "reference",
    "matching_digits",
    "required_digits",
    "status",
    "truncation_error",
    "quad_error",
    "checks",
    "oracle",
    "oracle_digits",
    "wall_time_s",
    "check_sources",
];

fn encode_checks(checks: &[CheckOutcome]) -> (String, String) {
    let values = checks
        .iter()
        .map(|c| format!("{}:{}/{}", c.value, c.matching_digits, c.required_digits))
        .collect::<Vec<_>>()
        .join(";");
    let sources = checks.iter().map(|c| c.source.as_str()).collect::<Vec<_>>().join(";");
    (values, sources)
}

fn decode_checks(values: &str, sources: &str) -> Result<Vec<CheckOutcome>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || BenchError::Invalid(format!("malformed checks field `{values}`"));
    values
        .split(';')
        .zip(sources.split(';'))
        .map(|(v, s)| {
            let (value, digits) = v.rsplit_once(':').ok_or_else(bad)?;
            let (got, need) = digits.split_once('/').ok_or_else(bad)?;
            Ok(CheckOutcome {
                source: s.to_string(),
                value: value.to_string(),
                matching_digits: got.parse().map_err(|_| bad())?,
                required_digits: need.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(reports: &[ComparisonReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let (checks, sources) = encode_checks(&r.checks);
        w.write_record([
            r.case_id.clone(),
            r.label.clone(),
            r.l_max.to_string(),
            r.target_digits.to_string(),
            r.computed.clone(),
            r.reference.clone(),
            r.matching_digits.to_string(),
            r.required_digits.to_string(),
            r.status.map(|s| s.to_string()).unwrap_or_default(),
            r.truncation_error.clone(),
            r.quad_error.clone(),
            checks,
            r.oracle.clone().unwrap_or_default(),
            r.oracle_digits.map(|d| d.to_string()).unwrap_or_default(),
            r.wall_time_s.to_string(),
            sources,
        ])?;
    }
    w.flush().map_err(|e| BenchError::io("csv output", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ComparisonReport>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for record in rdr.records() {
        let rec = record?;
        let field = |i: usize| rec.get(i).unwrap_or("").to_string();
        let int = |i: usize| -> Result<u32> {
            field(i)
                .parse()
                .map_err(|_| BenchError::Invalid(format!("column {} is not an integer", CSV_HEADER[i])))
        };
        let opt = |i: usize| Some(field(i)).filter(|s| !s.is_empty());
        out.push(ComparisonReport {
            case_id: field(0),
            label: field(1),
            l_max: int(2)?,
            target_digits: int(3)?,
            computed: field(4),
            reference: field(5),
            matching_digits: int(6)?,
            required_digits: int(7)?,
            status: opt(8).map(|s| s.parse()).transpose()?,
            truncation_error: field(9),
            quad_error: field(10),
            checks: decode_checks(&field(11), &field(15))?,
            oracle: opt(12),
            oracle_digits: opt(13).map(|_| int(13)).transpose()?,
            wall_time_s: field(14)
                .parse()
                .map_err(|_| BenchError::Invalid("column wall_time_s is not a number".into()))?,
        });
    }
    Ok(out)
}

/// Plain-text table with mantissas grouped in fives.
pub fn render_text(title: &str, reports: &[ComparisonReport]) -> String {
    let mut s = String::new();
    s.push_str(&format!("# {title}\n"));
    if reports.is_empty() {
        s.push_str("(no cases)\n");
        return s;
    }
    let id_w = reports.iter().map(|r| r.case_id.len()).max().unwrap_or(4).max(4);
    let label_w = reports.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
    s.push_str(&format!(
        "{:id_w$}  {:label_w$}  {:>5}  {:>7}  {:7}  value\n",
        "case", "label", "l_max", "digits", "status"
    ));
    for r in reports {
        let digits = if r.reference.is_empty() {
            "-".to_string()
        } else {
            format!("{}/{}", r.matching_digits, r.required_digits)
        };
        let status = r.status.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "{:id_w$}  {:label_w$}  {:>5}  {:>7}  {:7}  {}\n",
            r.case_id,
            r.label,
            r.l_max,
            digits,
            status,
            group_digits(&r.computed)
        ));
        let pad = id_w + label_w + 5 + 7 + 7 + 8;
        if !r.reference.is_empty() {
            s.push_str(&format!("{:>pad$}  {}  reference\n", "", group_digits(&r.reference)));
        }
        for c in &r.checks {
            let mark = if c.passed() { "ok" } else { "MISMATCH" };
            s.push_str(&format!(
                "{:>pad$}  {}  {} ({}/{} digits, {mark})\n",
                "",
                group_digits(&c.value),
                c.source,
                c.matching_digits,
                c.required_digits
            ));
        }
        if let (Some(o), Some(d)) = (&r.oracle, r.oracle_digits) {
            s.push_str(&format!("{:>pad$}  {}  oracle ({d} digits)\n", "", group_digits(o)));
        }
    }
    s
}
