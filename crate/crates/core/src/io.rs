//! Chain files, report rendering and contour CSV.
//!
//! Chain file format:
//!
//! ```text
//! # comment lines start with '#'
//! ctmc 4
//! 0 2 1 1
//! 2 0 4 2
//! 4 4 0 8
//! 16 8 8 0
//! ```
//!
//! The header is `ctmc N` or `dtmc N`, followed by `N` rows of `N`
//! whitespace-separated numbers. Blank lines are ignored. A `ctmc` file
//! must write its diagonal as 0; a `dtmc` file must have stochastic rows.

use std::fmt::Write as _;

use crate::analysis::{rho_grid, BoltzmannReport};
use crate::chain::{check_irreducible, JumpChain, RateMatrix, SquareMatrix, STOCHASTIC_TOL};
use crate::error::Error;

/// Significant digits used for every emitted number.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Chain {
    Ctmc(RateMatrix),
    Dtmc(JumpChain),
}

impl Chain {
    pub fn n(&self) -> usize {
        match self {
            Chain::Ctmc(m) => m.n(),
            Chain::Dtmc(p) => p.n(),
        }
    }
}

/// Chain-file diagnostics. `line` and `col` are 1-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {col}: negative entry {value}")]
    NegativeEntry { line: usize, col: usize, value: f64 },
    #[error("line {line}: diagonal entry must be 0, found {value}")]
    NonzeroDiagonal { line: usize, value: f64 },
    #[error("line {line}: row sums to {sum}, expected 1")]
    RowNotStochastic { line: usize, sum: f64 },
    #[error("chain is not irreducible ({components} strongly connected components)")]
    NotIrreducible { components: usize },
    #[error("{0}")]
    Invalid(Error),
}

struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    col: line[..s].chars().count() + 1,
                    text: &line[s..i],
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            col: line[..s].chars().count() + 1,
            text: &line[s..],
        });
    }
    out
}

pub fn parse_chain_file(text: &str) -> Result<Chain, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (hline, header) = lines.next().ok_or(ParseError::Syntax {
        line: text.lines().count().max(1),
        col: 1,
        msg: "missing header (\"ctmc N\" or \"dtmc N\")".into(),
    })?;
    let htok = tokens(header);
    if htok.len() != 2 {
        return Err(ParseError::Syntax {
            line: hline,
            col: 1,
            msg: "header must be \"ctmc N\" or \"dtmc N\"".into(),
        });
    }
    let is_ctmc = match htok[0].text {
        "ctmc" => true,
        "dtmc" => false,
        other => {
            return Err(ParseError::Syntax {
                line: hline,
                col: htok[0].col,
                msg: format!("unknown chain kind {other:?}"),
            })
        }
    };
    let n: usize = htok[1].text.parse().map_err(|_| ParseError::Syntax {
        line: hline,
        col: htok[1].col,
        msg: format!("invalid state count {:?}", htok[1].text),
    })?;
    if n < 2 {
        return Err(ParseError::Invalid(Error::TooFewStates(n)));
    }
    if n > crate::chain::MAX_STATES {
        return Err(ParseError::Invalid(Error::TooLarge(n)));
    }

    let mut m = SquareMatrix::zeros(n);
    let mut row_lines = Vec::with_capacity(n);
    for i in 0..n {
        let (lno, line) = lines.next().ok_or(ParseError::DimensionMismatch {
            line: text.lines().count() + 1,
            expected: n,
            found: 0,
        })?;
        let toks = tokens(line);
        if toks.len() != n {
            return Err(ParseError::DimensionMismatch {
                line: lno,
                expected: n,
                found: toks.len(),
            });
        }
        for (j, tok) in toks.iter().enumerate() {
            let v: f64 = tok.text.parse().map_err(|_| ParseError::Syntax {
                line: lno,
                col: tok.col,
                msg: format!("invalid number {:?}", tok.text),
            })?;
            if !v.is_finite() {
                return Err(ParseError::Syntax {
                    line: lno,
                    col: tok.col,
                    msg: format!("non-finite number {:?}", tok.text),
                });
            }
            if v < 0.0 {
                return Err(ParseError::NegativeEntry {
                    line: lno,
                    col: tok.col,
                    value: v,
                });
            }
            if i == j && v != 0.0 {
                return Err(ParseError::NonzeroDiagonal { line: lno, value: v });
            }
            m.set(i, j, v);
        }
        row_lines.push(lno);
    }
    if let Some((lno, line)) = lines.next() {
        return Err(ParseError::DimensionMismatch {
            line: lno,
            expected: 0,
            found: tokens(line).len(),
        });
    }

    if !is_ctmc {
        for (i, &lno) in row_lines.iter().enumerate() {
            let sum: f64 = m.row(i).iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(ParseError::RowNotStochastic { line: lno, sum });
            }
        }
    }
    let irr = check_irreducible(&m);
    if !irr.strongly_connected {
        return Err(ParseError::NotIrreducible {
            components: irr.components.len(),
        });
    }
    if is_ctmc {
        RateMatrix::new(m).map(Chain::Ctmc)
    } else {
        JumpChain::new(m).map(Chain::Dtmc)
    }
    .map_err(ParseError::Invalid)
}

/// Formats with [`SIG_DIGITS`] significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s
    }
}

fn write_matrix(kind: &str, m: &SquareMatrix) -> String {
    let mut out = format!("{kind} {}\n", m.n());
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_chain_file(chain: &Chain) -> String {
    match chain {
        Chain::Ctmc(m) => write_matrix("ctmc", m.rates()),
        Chain::Dtmc(p) => write_matrix("dtmc", p.probs()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Structured,
}

pub fn write_report(report: &BoltzmannReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => report_text(report),
        ReportFormat::Csv => report_csv(report),
        ReportFormat::Structured => report_structured(report),
    }
}

fn summary_fields(r: &BoltzmannReport) -> Vec<(&'static str, f64)> {
    vec![
        ("rho", r.rho),
        ("rho_tilde", r.rho_tilde),
        ("r2", r.r2),
        ("m_star", r.m_star),
        ("b_star", r.b_star),
        ("error_E", r.error_e),
        ("var_log_q", r.var_log_q),
        ("var_log_pi", r.var_log_pi),
        ("var_log_psi", r.var_log_psi),
        ("k_bound", r.certificate.k_bound),
        ("k_observed", r.certificate.k_observed),
        ("pairwise_ratio", r.certificate.pairwise_ratio),
        ("pairwise_bound", r.certificate.pairwise_bound),
    ]
}

fn report_text(r: &BoltzmannReport) -> String {
    let mut out = format!("states = {}\n", r.n);
    for (k, v) in summary_fields(r) {
        let _ = writeln!(out, "{k} = {}", fmt_num(v));
    }
    let _ = writeln!(out, "psi_constant = {}", r.psi_constant);
    let _ = writeln!(out, "k_bound_ok = {}", r.certificate.k_bound_ok);
    let _ = writeln!(out, "pairwise_bound_ok = {}", r.certificate.pairwise_bound_ok);
    out.push('\n');
    out.push_str(&table_csv(r));
    out
}

fn table_csv(r: &BoltzmannReport) -> String {
    let mut out = String::from("state,q,pi,nu,pi_over_nu\n");
    for row in &r.certificate.table {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.state + 1,
            fmt_num(row.exit_rate),
            fmt_num(row.pi),
            fmt_num(row.nu),
            fmt_num(row.ratio)
        );
    }
    out
}

fn report_csv(r: &BoltzmannReport) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in summary_fields(r) {
        let _ = writeln!(out, "{k},{}", fmt_num(v));
    }
    out.push('\n');
    out.push_str(&table_csv(r));
    out
}

fn rounded(x: f64) -> serde_json::Value {
    fmt_num(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn report_structured(r: &BoltzmannReport) -> String {
    let mut summary = serde_json::Map::new();
    summary.insert("states".into(), r.n.into());
    for (k, v) in summary_fields(r) {
        summary.insert(k.into(), rounded(v));
    }
    summary.insert("psi_constant".into(), r.psi_constant.into());
    summary.insert("k_bound_ok".into(), r.certificate.k_bound_ok.into());
    summary.insert("pairwise_bound_ok".into(), r.certificate.pairwise_bound_ok.into());
    let table: Vec<serde_json::Value> = r
        .certificate
        .table
        .iter()
        .map(|row| {
            serde_json::json!({
                "state": row.state + 1,
                "q": rounded(row.exit_rate),
                "pi": rounded(row.pi),
                "nu": rounded(row.nu),
                "pi_over_nu": rounded(row.ratio),
            })
        })
        .collect();
    summary.insert("table".into(), table.into());
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(summary))
        .expect("report serializes");
    s.push('\n');
    s
}

/// Inclusive linear grid `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad grid spec {spec:?}: {msg}")]
pub struct BadGridSpec {
    pub spec: String,
    pub msg: &'static str,
}

impl std::str::FromStr for GridSpec {
    type Err = BadGridSpec;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg| BadGridSpec {
            spec: s.to_string(),
            msg,
        };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected min:max:steps"));
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad("invalid min"))?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad("invalid max"))?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad("invalid steps"))?;
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(bad("need finite min <= max"));
        }
        if steps < 2 {
            return Err(bad("steps must be at least 2"));
        }
        Ok(Self { min, max, steps })
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / last
                }
            })
            .collect()
    }
}

/// `r2,rho_tilde,rho` rows, `r2` outer; undefined points are `nan`.
pub fn emit_contour_csv(r2: &GridSpec, rho_tilde: &GridSpec) -> String {
    let grid = rho_grid(&r2.values(), &rho_tilde.values());
    let mut out = String::from("r2,rho_tilde,rho\n");
    for (a, b, v) in grid.points() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_num(a),
            fmt_num(b),
            v.map_or_else(|| "nan".to_string(), fmt_num)
        );
    }
    out
}
