//! Plain-text outputs: trace and summary CSV files and `key = value` ledgers.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so identical runs
//! produce byte-identical files and values survive a round trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::EnergyTrace;
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "t,E,dissipation,bound,trace_y1,trace_yx1";

pub const SUMMARY_HEADER: &str = "alpha,beta,gamma,K,c_hp,eps0,nu,delta,c_delta,c1,c2,c3,M,fitted_rate,decay_ok,trace_estimate_slack,interior_estimate_slack";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t
            .parse()
            .map_err(|_| Error::Parse(format!("{what}: cannot parse {t:?} as a number"))),
    }
}

/// Trace CSV text. A missing `bound` column entry is written as `nan`.
pub fn trace_csv(trace: &EnergyTrace) -> String {
    let mut s = String::with_capacity(trace.len() * 140);
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for i in 0..trace.len() {
        let bound = trace.bound.get(i).copied().unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(trace.times[i]),
            fmt_f64(trace.energy[i]),
            fmt_f64(trace.dissipation[i]),
            fmt_f64(bound),
            fmt_f64(trace.trace_y1[i]),
            fmt_f64(trace.trace_yx1[i]),
        );
    }
    s
}

/// Parses a trace CSV. `dt` is recovered from the first two times.
pub fn parse_trace_csv(text: &str) -> Result<EnergyTrace> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRACE_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse(format!(
                "unexpected trace header {h:?}, want {TRACE_HEADER:?}"
            )))
        }
        None => return Err(Error::Parse("empty trace file".into())),
    }
    let mut tr = EnergyTrace::default();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Parse(format!(
                "line {}: expected 6 columns, found {}",
                no + 1,
                cols.len()
            )));
        }
        let v = |i: usize| parse_f64(cols[i], &format!("line {}", no + 1));
        tr.times.push(v(0)?);
        tr.energy.push(v(1)?);
        tr.dissipation.push(v(2)?);
        let b = v(3)?;
        if !b.is_nan() {
            tr.bound.push(b);
        }
        tr.trace_y1.push(v(4)?);
        tr.trace_yx1.push(v(5)?);
    }
    if tr.times.is_empty() {
        return Err(Error::Parse("trace has no rows".into()));
    }
    if !tr.bound.is_empty() && tr.bound.len() != tr.times.len() {
        return Err(Error::Parse("bound column is only partly filled".into()));
    }
    tr.dt = if tr.times.len() > 1 {
        tr.times[1] - tr.times[0]
    } else {
        0.0
    };
    Ok(tr)
}

/// `key = value` lines in the given order.
pub fn key_values<'a>(entries: impl IntoIterator<Item = (&'a str, String)>) -> String {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", no + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Looks up and parses a float from a parsed ledger.
pub fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Option<f64> {
    map.get(key).and_then(|v| parse_f64(v, key).ok())
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: f64,
    pub c_hp: f64,
    pub eps0: f64,
    pub nu: f64,
    pub delta: f64,
    pub c_delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub m: f64,
    pub fitted_rate: f64,
    pub decay_ok: bool,
    pub trace_estimate_slack: f64,
    pub interior_estimate_slack: f64,
}

impl SummaryRow {
    fn line(&self) -> String {
        let nums = [
            self.alpha,
            self.beta,
            self.gamma,
            self.k,
            self.c_hp,
            self.eps0,
            self.nu,
            self.delta,
            self.c_delta,
            self.c1,
            self.c2,
            self.c3,
            self.m,
            self.fitted_rate,
        ];
        let mut cols: Vec<String> = nums.iter().map(|&x| fmt_f64(x)).collect();
        cols.push(self.decay_ok.to_string());
        cols.push(fmt_f64(self.trace_estimate_slack));
        cols.push(fmt_f64(self.interior_estimate_slack));
        cols.join(",")
    }

    fn key(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }
}

/// Summary CSV with rows sorted by `(alpha, beta, gamma)`.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut sorted: Vec<&SummaryRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.key().partial_cmp(&b.key()).expect("finite sweep keys"));
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in sorted {
        s.push_str(&r.line());
        s.push('\n');
    }
    s
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
