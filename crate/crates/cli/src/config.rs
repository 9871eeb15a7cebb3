//! Line-oriented case files.
//!
//! ```text
//! # comment
//! name = threecenter1
//! l_max = 30
//!
//! [case]
//! id = example
//! a = 1.0 0 0 1.24          # n l m zeta
//! b = 1.0 0 0 5.67
//! center_a = 0 0 0
//! center_b = 0 0 -2.0143
//! center_c = 0 0 -4.1934
//! reference = 2.94549 60536 73751 14101 41604 E-02
//! min_digits = 26
//! check = 2.94549 6054 E-02 | 10 | some earlier calculation
//! partial = 10 | 2.9454 E-02 | 4
//! ```
//!
//! Keys before the first block set file-wide defaults (`name`, `l_max`,
//! `digits`). `[aux]` blocks hold auxiliary-function reference values and use
//! `id`, `kind`, `params`, `j`, `k` and `note`.

use std::collections::HashSet;
use std::path::Path;

use threecenter_core::PrecisionContext;

use crate::error::{BenchError, Result};
use crate::reference;

/// Fallback truncation level when neither the file nor the flags set one.
pub const DEFAULT_L_MAX: u32 = 30;
/// Fallback target precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 20;

/// An orbital as written in a case file; numbers stay decimal strings until
/// they are parsed at the working precision of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalSpec {
    pub n: String,
    pub l: u32,
    pub m: i32,
    pub zeta: String,
}

/// An independent value the computed result should also agree with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub value: String,
    pub min_digits: u32,
    pub source: String,
}

/// A published value of the expansion truncated at `l_max`, with the number
/// of its leading digits that agree with the converged value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialReference {
    pub l_max: u32,
    pub value: String,
    pub converged_digits: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchCase {
    pub id: String,
    pub label: Option<String>,
    pub orbitals: (OrbitalSpec, OrbitalSpec),
    /// Nuclei A, B, C in bohr; orbital `a` sits on A, `b` on B, the charge on C.
    pub geometry: [[String; 3]; 3],
    pub l_max: u32,
    /// Per-case precision; `None` falls back to the file or run default.
    pub target_digits: Option<u32>,
    pub reference_value: Option<String>,
    /// The value exactly as printed by the source, kept when it had to be
    /// corrected to give `reference_value`.
    pub printed_value: Option<String>,
    /// Digits of `reference_value` known to be correct; defaults to all of
    /// its printed digits.
    pub min_digits: Option<u32>,
    pub reference_source: String,
    pub checks: Vec<CrossCheck>,
    pub partials: Vec<PartialReference>,
}

impl BenchCase {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or("")
    }

    /// Digits `reference_value` is trusted to.
    pub fn reference_digits(&self) -> Option<u32> {
        let r = self.reference_value.as_ref()?;
        Some(self.min_digits.unwrap_or_else(|| significant_digits(r)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxKind {
    /// `L Λ q N1 N2 p1 p2`.
    Reduced {
        l: u32,
        lambda: u32,
        q: u32,
        n1: String,
        n2: String,
        p1: String,
        p2: String,
    },
    /// `L M n l m n' l' m' p1 p2`.
    General {
        l: u32,
        m: i32,
        a: (String, u32, i32),
        b: (String, u32, i32),
        p1: String,
        p2: String,
    },
}

/// Published auxiliary-function values whose inner boundary `ξ_C` is unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxReference {
    pub id: String,
    pub kind: AuxKind,
    pub j: String,
    pub k: String,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchConfig {
    pub name: String,
    pub digits: Option<u32>,
    pub cases: Vec<BenchCase>,
    pub aux: Vec<AuxReference>,
}

impl BenchConfig {
    pub fn case(&self, id: &str) -> Option<&BenchCase> {
        self.cases.iter().find(|c| c.id == id)
    }
}

/// Reads a config from a file path, or from the bundled set when `source`
/// names one of [`reference::BUNDLED`] and no such file exists.
pub fn load_config(source: &str) -> Result<BenchConfig> {
    let path = Path::new(source);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(source, e))?;
        return parse_config(&text, source);
    }
    match reference::bundled(source) {
        Some(text) => parse_config(text, source),
        None => Err(BenchError::io(
            source,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled config"),
        )),
    }
}

/// Number of significant digits in a decimal string such as
/// `2.94549 6054 E-02`.
pub fn significant_digits(value: &str) -> u32 {
    let mantissa = value.split(['E', 'e']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len() as u32
}

#[derive(PartialEq)]
enum Block {
    Header,
    Case,
    Aux,
}

#[derive(Default)]
struct CaseDraft {
    line: usize,
    id: Option<String>,
    label: Option<String>,
    a: Option<OrbitalSpec>,
    b: Option<OrbitalSpec>,
    centers: [Option<[String; 3]>; 3],
    l_max: Option<u32>,
    digits: Option<u32>,
    reference: Option<String>,
    printed: Option<String>,
    min_digits: Option<u32>,
    source: Option<String>,
    checks: Vec<CrossCheck>,
    partials: Vec<PartialReference>,
}

#[derive(Default)]
struct AuxDraft {
    line: usize,
    id: Option<String>,
    kind: Option<String>,
    params: Option<(usize, Vec<String>)>,
    j: Option<String>,
    k: Option<String>,
    note: Option<String>,
}

struct Parser<'a> {
    origin: &'a str,
    validator: PrecisionContext,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> BenchError {
        BenchError::Config {
            origin: self.origin.to_string(),
            line,
            message: message.into(),
        }
    }

    fn int<T: std::str::FromStr>(&self, line: usize, key: &str, text: &str) -> Result<T> {
        text.trim()
            .parse()
            .map_err(|_| self.err(line, format!("`{key}` expects an integer, got `{text}`")))
    }

    fn decimal(&self, line: usize, key: &str, text: &str) -> Result<String> {
        let text = text.trim();
        self.validator
            .parse(text)
            .map_err(|_| self.err(line, format!("`{key}` expects a finite decimal, got `{text}`")))?;
        Ok(text.to_string())
    }

    fn fields<'t>(&self, line: usize, key: &str, text: &'t str, count: usize) -> Result<Vec<&'t str>> {
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != count {
            return Err(self.err(line, format!("`{key}` expects {count} fields, got {}", f.len())));
        }
        Ok(f)
    }

    fn orbital(&self, line: usize, key: &str, text: &str) -> Result<OrbitalSpec> {
        let f = self.fields(line, key, text, 4)?;
        Ok(OrbitalSpec {
            n: self.decimal(line, key, f[0])?,
            l: self.int(line, key, f[1])?,
            m: self.int(line, key, f[2])?,
            zeta: self.decimal(line, key, f[3])?,
        })
    }

    fn point(&self, line: usize, key: &str, text: &str) -> Result<[String; 3]> {
        let f = self.fields(line, key, text, 3)?;
        Ok([
            self.decimal(line, key, f[0])?,
            self.decimal(line, key, f[1])?,
            self.decimal(line, key, f[2])?,
        ])
    }

    fn piped<'t>(&self, line: usize, key: &str, text: &'t str) -> Result<Vec<&'t str>> {
        let parts: Vec<&str> = text.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(self.err(line, format!("`{key}` expects three `|`-separated fields")));
        }
        Ok(parts)
    }

    fn case_key(&self, d: &mut CaseDraft, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "id" => d.id = Some(value.to_string()),
            "label" => d.label = Some(value.to_string()),
            "a" => d.a = Some(self.orbital(line, key, value)?),
            "b" => d.b = Some(self.orbital(line, key, value)?),
            "center_a" => d.centers[0] = Some(self.point(line, key, value)?),
            "center_b" => d.centers[1] = Some(self.point(line, key, value)?),
            "center_c" => d.centers[2] = Some(self.point(line, key, value)?),
            "l_max" => d.l_max = Some(self.int(line, key, value)?),
            "digits" => d.digits = Some(self.int(line, key, value)?),
            "reference" => d.reference = Some(self.decimal(line, key, value)?),
            "printed" => d.printed = Some(self.decimal(line, key, value)?),
            "min_digits" => d.min_digits = Some(self.int(line, key, value)?),
            "source" => d.source = Some(value.to_string()),
            "check" => {
                let p = self.piped(line, key, value)?;
                d.checks.push(CrossCheck {
                    value: self.decimal(line, key, p[0])?,
                    min_digits: self.int(line, key, p[1])?,
                    source: p[2].to_string(),
                });
            }
            "partial" => {
                let p = self.piped(line, key, value)?;
                d.partials.push(PartialReference {
                    l_max: self.int(line, key, p[0])?,
                    value: self.decimal(line, key, p[1])?,
                    converged_digits: self.int(line, key, p[2])?,
                });
            }
            _ => return Err(self.err(line, format!("unknown case key `{key}`"))),
        }
        Ok(())
    }

    fn finish_case(&self, d: CaseDraft, default_l_max: u32, default_digits: Option<u32>) -> Result<BenchCase> {
        let line = d.line;
        let missing = |what: &str| self.err(line, format!("case is missing `{what}`"));
        let id = d.id.ok_or_else(|| missing("id"))?;
        let a = d.a.ok_or_else(|| missing("a"))?;
        let b = d.b.ok_or_else(|| missing("b"))?;
        let [ca, cb, cc] = d.centers;
        let geometry = [
            ca.ok_or_else(|| missing("center_a"))?,
            cb.ok_or_else(|| missing("center_b"))?,
            cc.ok_or_else(|| missing("center_c"))?,
        ];
        if d.min_digits.is_some() && d.reference.is_none() {
            return Err(self.err(line, "`min_digits` given without `reference`"));
        }
        let mut partials = d.partials;
        partials.sort_by_key(|p| p.l_max);
        Ok(BenchCase {
            id,
            label: d.label,
            orbitals: (a, b),
            geometry,
            l_max: d.l_max.unwrap_or(default_l_max),
            target_digits: d.digits.or(default_digits),
            reference_value: d.reference,
            printed_value: d.printed,
            min_digits: d.min_digits,
            reference_source: d.source.unwrap_or_default(),
            checks: d.checks,
            partials,
        })
    }

    fn aux_key(&self, d: &mut AuxDraft, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "id" => d.id = Some(value.to_string()),
            "kind" => d.kind = Some(value.to_string()),
            "params" => d.params = Some((line, value.split_whitespace().map(String::from).collect())),
            "j" => d.j = Some(self.decimal(line, key, value)?),
            "k" => d.k = Some(self.decimal(line, key, value)?),
            "note" => d.note = Some(value.to_string()),
            _ => return Err(self.err(line, format!("unknown aux key `{key}`"))),
        }
        Ok(())
    }

    fn finish_aux(&self, d: AuxDraft) -> Result<AuxReference> {
        let line = d.line;
        let missing = |what: &str| self.err(line, format!("aux block is missing `{what}`"));
        let (pline, p) = d.params.ok_or_else(|| missing("params"))?;
        let kind = match d.kind.as_deref() {
            Some("reduced") => {
                if p.len() != 7 {
                    return Err(self.err(pline, "reduced `params` expects L Lambda q N1 N2 p1 p2"));
                }
                AuxKind::Reduced {
                    l: self.int(pline, "params", &p[0])?,
                    lambda: self.int(pline, "params", &p[1])?,
                    q: self.int(pline, "params", &p[2])?,
                    n1: self.decimal(pline, "params", &p[3])?,
                    n2: self.decimal(pline, "params", &p[4])?,
                    p1: self.decimal(pline, "params", &p[5])?,
                    p2: self.decimal(pline, "params", &p[6])?,
                }
            }
            Some("general") => {
                if p.len() != 10 {
                    return Err(self.err(pline, "general `params` expects L M n l m n' l' m' p1 p2"));
                }
                AuxKind::General {
                    l: self.int(pline, "params", &p[0])?,
                    m: self.int(pline, "params", &p[1])?,
                    a: (
                        self.decimal(pline, "params", &p[2])?,
                        self.int(pline, "params", &p[3])?,
                        self.int(pline, "params", &p[4])?,
                    ),
                    b: (
                        self.decimal(pline, "params", &p[5])?,
                        self.int(pline, "params", &p[6])?,
                        self.int(pline, "params", &p[7])?,
                    ),
                    p1: self.decimal(pline, "params", &p[8])?,
                    p2: self.decimal(pline, "params", &p[9])?,
                }
            }
            Some(other) => return Err(self.err(line, format!("unknown aux kind `{other}`"))),
            None => return Err(missing("kind")),
        };
        Ok(AuxReference {
            id: d.id.ok_or_else(|| missing("id"))?,
            kind,
            j: d.j.ok_or_else(|| missing("j"))?,
            k: d.k.ok_or_else(|| missing("k"))?,
            note: d.note,
        })
    }
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<BenchConfig> {
    let parser = Parser {
        origin,
        validator: PrecisionContext::new(30).expect("fixed precision is valid"),
    };
    let mut config = BenchConfig {
        name: Path::new(origin)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        ..BenchConfig::default()
    };
    let mut default_l_max = DEFAULT_L_MAX;
    let mut block = Block::Header;
    let mut case: Option<CaseDraft> = None;
    let mut aux: Option<AuxDraft> = None;
    let mut seen = HashSet::new();

    let mut flush = |case: &mut Option<CaseDraft>, aux: &mut Option<AuxDraft>, config: &mut BenchConfig, l_max: u32| -> Result<()> {
        if let Some(d) = case.take() {
            let line = d.line;
            let c = parser.finish_case(d, l_max, config.digits)?;
            if !seen.insert(c.id.clone()) {
                return Err(parser.err(line, format!("duplicate id `{}`", c.id)));
            }
            config.cases.push(c);
        }
        if let Some(d) = aux.take() {
            let line = d.line;
            let a = parser.finish_aux(d)?;
            if !seen.insert(a.id.clone()) {
                return Err(parser.err(line, format!("duplicate id `{}`", a.id)));
            }
            config.aux.push(a);
        }
        Ok(())
    };

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            flush(&mut case, &mut aux, &mut config, default_l_max)?;
            match content {
                "[case]" => {
                    block = Block::Case;
                    case = Some(CaseDraft { line, ..CaseDraft::default() });
                }
                "[aux]" => {
                    block = Block::Aux;
                    aux = Some(AuxDraft { line, ..AuxDraft::default() });
                }
                other => return Err(parser.err(line, format!("unknown block `{other}`"))),
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parser.err(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        match block {
            Block::Header => match key {
                "name" => config.name = value.to_string(),
                "l_max" => default_l_max = parser.int(line, key, value)?,
                "digits" => config.digits = Some(parser.int(line, key, value)?),
                _ => return Err(parser.err(line, format!("unknown file key `{key}`"))),
            },
            Block::Case => parser.case_key(case.as_mut().expect("case block open"), line, key, value)?,
            Block::Aux => parser.aux_key(aux.as_mut().expect("aux block open"), line, key, value)?,
        }
    }
    flush(&mut case, &mut aux, &mut config, default_l_max)?;
    Ok(config)
}
