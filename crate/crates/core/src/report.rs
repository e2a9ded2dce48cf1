//! Congruence reports and their JSON, CSV and text renderings.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::Zmod;
use crate::error::{Error, Result};
use crate::lucas::LucasParams;
use crate::rank::RankInfo;

/// What a report checks: one of the theorems, or a named lemma claim such as
/// `L11:S111`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Claim {
    /// `(2p-1 choose p-1) = 1 mod p^3` for ordinary binomials.
    W,
    /// `((k+1)p-1 choose p-1) = 1 mod p^3` for ordinary binomials.
    WPlus,
    /// `(kp choose lp) = (k choose l) mod p^3` for ordinary binomials.
    Viggo,
    /// `((k+1)rho-1 choose rho-1)_U` mod `p^3`.
    N,
    /// `(k rho choose l rho)_U` mod `p^3`.
    LjWe,
    /// `(2rho-1 choose rho-1)_U` mod `p^5`, variants 1 to 4.
    P5(u8),
    /// `(2rho-1 choose rho-1)_U` mod `p^6`.
    P6,
    /// Fibonomial `((k+1)rho-1 choose rho-1)_F = eps^k mod p^3`.
    KW,
    Lemma(String),
}

impl Claim {
    pub const THEOREMS: [Claim; 11] = [
        Claim::W,
        Claim::WPlus,
        Claim::Viggo,
        Claim::N,
        Claim::LjWe,
        Claim::P5(1),
        Claim::P5(2),
        Claim::P5(3),
        Claim::P5(4),
        Claim::P6,
        Claim::KW,
    ];

    pub fn lemma(label: impl Into<String>) -> Self {
        Claim::Lemma(label.into())
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::W => f.write_str("W"),
            Claim::WPlus => f.write_str("W+"),
            Claim::Viggo => f.write_str("Viggo"),
            Claim::N => f.write_str("N"),
            Claim::LjWe => f.write_str("LjWe"),
            Claim::P5(v) => write!(f, "P5_{v}"),
            Claim::P6 => f.write_str("P6"),
            Claim::KW => f.write_str("KW"),
            Claim::Lemma(s) => f.write_str(s),
        }
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "W" => Claim::W,
            "W+" => Claim::WPlus,
            "Viggo" => Claim::Viggo,
            "N" => Claim::N,
            "LjWe" => Claim::LjWe,
            "P5_1" => Claim::P5(1),
            "P5_2" => Claim::P5(2),
            "P5_3" => Claim::P5(3),
            "P5_4" => Claim::P5(4),
            "P6" => Claim::P6,
            "KW" => Claim::KW,
            s if s.starts_with('L') || s.starts_with("P6:") => Claim::Lemma(s.to_string()),
            other => return Err(Error::Precondition(format!("unknown theorem id `{other}`"))),
        })
    }
}

/// A secondary consistency check carried alongside a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCheck {
    pub name: String,
    pub holds: bool,
}

/// One verified congruence instance.
///
/// `lhs` and `rhs` are normalized to `[0, p^j)`. `holds` is exactly
/// `lhs == rhs`; side checks do not affect it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceReport {
    pub claim: Claim,
    pub params: LucasParams,
    pub prime: u64,
    pub rank: Option<RankInfo>,
    pub k: Option<u64>,
    pub l: Option<u64>,
    pub modulus_exponent: u32,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    pub holds: bool,
    pub error: Option<String>,
    pub side_checks: Vec<SideCheck>,
}

impl CongruenceReport {
    /// A report comparing two residues modulo `p^exponent`.
    #[allow(clippy::too_many_arguments)]
    pub fn compare(
        claim: Claim,
        params: &LucasParams,
        rank: &RankInfo,
        k: Option<u64>,
        l: Option<u64>,
        exponent: u32,
        lhs: u64,
        rhs: u64,
    ) -> Self {
        let m = rank.prime.pow(exponent);
        let (lhs, rhs) = (lhs % m, rhs % m);
        CongruenceReport {
            claim,
            params: *params,
            prime: rank.prime,
            rank: Some(rank.clone()),
            k,
            l,
            modulus_exponent: exponent,
            lhs: Some(lhs),
            rhs: Some(rhs),
            holds: lhs == rhs,
            error: None,
            side_checks: Vec::new(),
        }
    }

    /// A report for a case that could not be evaluated.
    pub fn failed(
        claim: Claim,
        params: &LucasParams,
        prime: u64,
        rank: Option<RankInfo>,
        k: Option<u64>,
        l: Option<u64>,
        err: &Error,
    ) -> Self {
        CongruenceReport {
            claim,
            params: *params,
            prime,
            rank,
            k,
            l,
            modulus_exponent: 0,
            lhs: None,
            rhs: None,
            holds: false,
            error: Some(err.to_string()),
            side_checks: Vec::new(),
        }
    }

    pub fn with_side_check(mut self, name: impl Into<String>, holds: bool) -> Self {
        self.side_checks.push(SideCheck { name: name.into(), holds });
        self
    }

    /// Holds, evaluated without error, and every side check passed.
    pub fn passed(&self) -> bool {
        self.holds && self.error.is_none() && self.side_checks.iter().all(|c| c.holds)
    }

    /// Evaluated, but `lhs` and `rhs` differ.
    pub fn is_counterexample(&self) -> bool {
        self.error.is_none() && !self.holds
    }

    pub fn modulus(&self) -> u64 {
        self.prime.pow(self.modulus_exponent)
    }

    pub fn to_record(&self) -> ReportRecord {
        let failed_side: Vec<&str> = self
            .side_checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name.as_str())
            .collect();
        let error = match (&self.error, failed_side.is_empty()) {
            (Some(e), _) => Some(e.clone()),
            (None, false) => Some(format!("side check failed: {}", failed_side.join(", "))),
            (None, true) => None,
        };
        ReportRecord {
            theorem_id: self.claim.to_string(),
            p_param: self.params.p(),
            q_param: self.params.q(),
            p: self.prime,
            rho: self.rank.as_ref().map(|r| r.rho),
            epsilon: self.rank.as_ref().map(|r| r.epsilon),
            k: self.k,
            l: self.l,
            modulus_exponent: self.modulus_exponent,
            lhs: self.lhs.map(|v| v.to_string()),
            rhs: self.rhs.map(|v| v.to_string()),
            holds: self.holds,
            error,
        }
    }
}

/// The flat interchange record. Residues are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub theorem_id: String,
    #[serde(rename = "P")]
    pub p_param: i64,
    #[serde(rename = "Q")]
    pub q_param: i64,
    pub p: u64,
    pub rho: Option<u64>,
    pub epsilon: Option<i8>,
    pub k: Option<u64>,
    pub l: Option<u64>,
    pub modulus_exponent: u32,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub holds: bool,
    pub error: Option<String>,
}

/// Tally over a list of reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub checked: usize,
    pub passed: usize,
    pub counterexamples: usize,
    pub failures: usize,
}

impl Summary {
    pub fn of(reports: &[CongruenceReport]) -> Self {
        let mut s = Summary { checked: reports.len(), ..Default::default() };
        for r in reports {
            if r.passed() {
                s.passed += 1;
            } else if r.is_counterexample() {
                s.counterexamples += 1;
            } else {
                s.failures += 1;
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Precondition(format!("unknown format `{other}`"))),
        }
    }
}

fn io_err(e: impl fmt::Display) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

pub fn write_json<W: Write>(out: W, reports: &[CongruenceReport]) -> Result<()> {
    let records: Vec<ReportRecord> = reports.iter().map(CongruenceReport::to_record).collect();
    serde_json::to_writer_pretty(out, &records).map_err(io_err)
}

pub fn read_json(input: &str) -> Result<Vec<ReportRecord>> {
    serde_json::from_str(input).map_err(|e| Error::Precondition(format!("bad report JSON: {e}")))
}

pub fn write_csv<W: Write>(out: W, reports: &[CongruenceReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r.to_record()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_csv(input: &str) -> Result<Vec<ReportRecord>> {
    csv::Reader::from_reader(input.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Precondition(format!("bad report CSV: {e}")))
}

fn describe(r: &CongruenceReport) -> String {
    let mut s = format!("{} {} p={}", r.claim, r.params, r.prime);
    if let Some(k) = r.k {
        s += &format!(" k={k}");
    }
    if let Some(l) = r.l {
        s += &format!(" l={l}");
    }
    s
}

fn signed(r: &CongruenceReport, v: u64) -> i128 {
    Zmod::new(r.modulus()).signed(v)
}

/// Human-readable rendering: counterexamples first, then one line per
/// `(params, prime)` group, then the tally.
pub fn write_text<W: Write>(mut out: W, reports: &[CongruenceReport]) -> Result<()> {
    for r in reports.iter().filter(|r| !r.passed()) {
        match (&r.error, r.lhs, r.rhs) {
            (None, Some(lhs), Some(rhs)) if !r.holds => writeln!(
                out,
                "COUNTEREXAMPLE {}: lhs {} ({}) != rhs {} ({}) mod {}^{}",
                describe(r),
                lhs,
                signed(r, lhs),
                rhs,
                signed(r, rhs),
                r.prime,
                r.modulus_exponent
            ),
            _ => writeln!(out, "FAILED {}: {}", describe(r), r.to_record().error.unwrap_or_default()),
        }
        .map_err(io_err)?;
    }
    let mut i = 0;
    while i < reports.len() {
        let key = (reports[i].params, reports[i].prime);
        let j = reports[i..]
            .iter()
            .position(|r| (r.params, r.prime) != key)
            .map_or(reports.len(), |off| i + off);
        let group = &reports[i..j];
        let ok = group.iter().filter(|r| r.passed()).count();
        let rank = group.iter().find_map(|r| r.rank.as_ref());
        let rank_txt = rank.map_or(String::new(), |r| format!(" rho={} eps={}", r.rho, r.epsilon));
        writeln!(out, "{} p={}{}: {}/{} hold", key.0, key.1, rank_txt, ok, group.len()).map_err(io_err)?;
        i = j;
    }
    let s = Summary::of(reports);
    writeln!(
        out,
        "checked {}, passed {}, counterexamples {}, failures {}",
        s.checked, s.passed, s.counterexamples, s.failures
    )
    .map_err(io_err)
}

pub fn write_reports<W: Write>(out: W, format: Format, reports: &[CongruenceReport]) -> Result<()> {
    match format {
        Format::Json => write_json(out, reports),
        Format::Csv => write_csv(out, reports),
        Format::Text => write_text(out, reports),
    }
}

/// One row of a rank search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    #[serde(rename = "P")]
    pub p_param: i64,
    #[serde(rename = "Q")]
    pub q_param: i64,
    pub p: u64,
    pub rho: u64,
    pub epsilon: i8,
    pub maximal: bool,
}

impl RankRecord {
    pub fn new(params: &LucasParams, rank: &RankInfo) -> Self {
        RankRecord {
            p_param: params.p(),
            q_param: params.q(),
            p: rank.prime,
            rho: rank.rho,
            epsilon: rank.epsilon,
            maximal: rank.maximal,
        }
    }
}

/// One tabulated sum, by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumRecord {
    pub label: String,
    pub p: u64,
    pub rho: u64,
    pub precision: u32,
    pub value: String,
}

/// Writes rows as a JSON array, CSV, or aligned text produced by `line`.
fn write_rows<W: Write, T: Serialize>(mut out: W, format: Format, rows: &[T], line: impl Fn(&T) -> String) -> Result<()> {
    match format {
        Format::Json => serde_json::to_writer_pretty(&mut out, rows).map_err(io_err),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Text => rows.iter().try_for_each(|r| writeln!(out, "{}", line(r)).map_err(io_err)),
    }
}

pub fn write_ranks<W: Write>(out: W, format: Format, rows: &[RankRecord]) -> Result<()> {
    write_rows(out, format, rows, |r| {
        format!("U({},{}) p={} rho={} eps={}{}", r.p_param, r.q_param, r.p, r.rho, r.epsilon, if r.maximal { " maximal" } else { "" })
    })
}

pub fn write_sums<W: Write>(out: W, format: Format, rows: &[SumRecord]) -> Result<()> {
    write_rows(out, format, rows, |r| format!("{:<12} {} mod {}^{}", r.label, r.value, r.p, r.precision))
}
