//! Per-iteration traces and what can be read off them: empirical
//! contraction rates, tail linearity of the log error, and file export.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::matrix::DenseSym;
use crate::oracle;
use crate::solver::{closed_form_rate, ProblemInstance};

/// Minimum number of ratios in the tail window.
const MIN_TAIL_RATIOS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub objective: f64,
    /// `NaN` when not computed this iteration, `+inf` when the dual point
    /// was infeasible.
    pub gap: f64,
    pub zeta_accepted: f64,
    pub backtracks: usize,
    pub nnz_frac: f64,
    /// `||Θ_t - Θ*||_F` when a reference was supplied.
    pub err_to_ref: Option<f64>,
}

const FIELDS: [&str; 7] = [
    "iter",
    "objective",
    "gap",
    "zeta_accepted",
    "backtracks",
    "nnz_frac",
    "err_to_ref",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    /// Geometric mean of successive error ratios over the tail.
    pub empirical_rate: f64,
    /// Closed-form worst-case rate for constant steps below `α²`.
    pub theoretical_rate: f64,
    /// `λ_max / λ_min` of the reference solution.
    pub kappa_star: f64,
    /// `1 - 2 κ*^{-2}`
    pub rate_floor: f64,
}

fn errors(trace: &[TraceRecord]) -> Result<Vec<f64>> {
    if trace.len() < MIN_TAIL_RATIOS {
        return Err(Error::InsufficientTrace(format!(
            "need at least {MIN_TAIL_RATIOS} records, got {}",
            trace.len()
        )));
    }
    trace
        .iter()
        .map(|r| match r.err_to_ref {
            Some(e) if e.is_finite() && e >= 0.0 => Ok(e),
            _ => Err(Error::InsufficientTrace(format!(
                "record {} has no usable err_to_ref",
                r.iter
            ))),
        })
        .collect()
}

// Errors up to (not including) the first exact zero, which only happens
// when the run lands on the reference iterate itself.
fn positive_prefix(errs: &[f64]) -> Result<&[f64]> {
    let end = errs.iter().position(|&e| e == 0.0).unwrap_or(errs.len());
    if end < MIN_TAIL_RATIOS {
        return Err(Error::InsufficientTrace(format!(
            "need at least {MIN_TAIL_RATIOS} positive errors, got {end}"
        )));
    }
    Ok(&errs[..end])
}

/// Window of the last half of the positive error sequence, holding at
/// least [`MIN_TAIL_RATIOS`] ratios when available.
fn tail(errs: &[f64]) -> Result<&[f64]> {
    let errs = positive_prefix(errs)?;
    let ratios = errs.len() - 1;
    let window = (ratios / 2).max(MIN_TAIL_RATIOS).min(ratios);
    Ok(&errs[errs.len() - 1 - window..])
}

/// Geometric-mean contraction `(e_last / e_first)^(1/k)` over the tail
/// window of the `err_to_ref` column.
pub fn tail_rate(trace: &[TraceRecord]) -> Result<f64> {
    let errs = errors(trace)?;
    let w = tail(&errs)?;
    let k = (w.len() - 1) as f64;
    Ok((w[w.len() - 1] / w[0]).powf(1.0 / k))
}

/// Coefficient of determination of a least-squares line through
/// `(iter, log err)` over the last half of the trace.
pub fn tail_log_linearity(trace: &[TraceRecord]) -> Result<f64> {
    let errs = errors(trace)?;
    let errs = positive_prefix(&errs)?;
    let start = errs.len() / 2;
    let pts: Vec<(f64, f64)> = trace[start..errs.len()]
        .iter()
        .zip(&errs[start..])
        .map(|(r, &e)| (r.iter as f64, e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientTrace("fewer than 3 positive tail errors".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if syy == 0.0 {
        return Ok(1.0);
    }
    Ok(sxy * sxy / (sxx * syy))
}

/// Full rate report: tail contraction from the trace, the closed-form
/// rate for `problem`, and the conditioning of `reference`.
pub fn empirical_contraction(
    trace: &[TraceRecord],
    problem: &ProblemInstance,
    reference: &DenseSym,
) -> Result<RateReport> {
    let empirical_rate = tail_rate(trace)?;
    let theoretical_rate = closed_form_rate(problem)?.rate;
    let eig = oracle::eigenvalues(reference)?;
    let kappa_star = eig[eig.len() - 1] / eig[0];
    Ok(RateReport {
        empirical_rate,
        theoretical_rate,
        kappa_star,
        rate_floor: 1.0 - 2.0 / (kappa_star * kappa_star),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    JsonLines,
}

/// 17 significant digits, exact round trip for `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

/// Renders a trace as CSV with a header row. Missing `err_to_ref` is an
/// empty field.
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = FIELDS.join(",");
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            fmt_f64(r.objective),
            fmt_f64(r.gap),
            fmt_f64(r.zeta_accepted),
            r.backtracks,
            fmt_f64(r.nnz_frac),
            r.err_to_ref.map(fmt_f64).unwrap_or_default()
        );
    }
    out
}

// JSON has no literal for non-finite numbers; those are written as strings.
fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        format!("\"{x}\"")
    }
}

pub fn trace_to_json_lines(trace: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in trace {
        let _ = writeln!(
            out,
            "{{\"iter\":{},\"objective\":{},\"gap\":{},\"zeta_accepted\":{},\"backtracks\":{},\"nnz_frac\":{},\"err_to_ref\":{}}}",
            r.iter,
            json_num(r.objective),
            json_num(r.gap),
            json_num(r.zeta_accepted),
            r.backtracks,
            json_num(r.nnz_frac),
            r.err_to_ref.map(json_num).unwrap_or_else(|| "null".into())
        );
    }
    out
}

pub fn export_trace(trace: &[TraceRecord], format: TraceFormat, path: &Path) -> Result<()> {
    let body = match format {
        TraceFormat::Csv => trace_to_csv(trace),
        TraceFormat::JsonLines => trace_to_json_lines(trace),
    };
    write_atomic(path, body.as_bytes())
}

pub fn parse_trace_csv(text: &str) -> std::result::Result<Vec<TraceRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("missing header")?;
    if header.trim() != FIELDS.join(",") {
        return Err(format!("unexpected header {header:?}"));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != FIELDS.len() {
                return Err(format!("row {}: expected {} fields", k + 1, FIELDS.len()));
            }
            let f = |i: usize| parse_f64(cols[i]).ok_or_else(|| format!("row {}: bad {}", k + 1, FIELDS[i]));
            let u = |i: usize| {
                cols[i]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| format!("row {}: bad {}", k + 1, FIELDS[i]))
            };
            Ok(TraceRecord {
                iter: u(0)?,
                objective: f(1)?,
                gap: f(2)?,
                zeta_accepted: f(3)?,
                backtracks: u(4)?,
                nnz_frac: f(5)?,
                err_to_ref: if cols[6].trim().is_empty() { None } else { Some(f(6)?) },
            })
        })
        .collect()
}

fn json_f64(obj: &Map<String, Value>, key: &str) -> std::result::Result<f64, String> {
    match obj.get(key) {
        Some(Value::Number(n)) => n.as_f64().ok_or_else(|| format!("bad {key}")),
        Some(Value::String(s)) => parse_f64(s).ok_or_else(|| format!("bad {key}")),
        _ => Err(format!("missing {key}")),
    }
}

fn json_usize(obj: &Map<String, Value>, key: &str) -> std::result::Result<usize, String> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| format!("bad {key}"))
}

pub fn parse_trace_json_lines(text: &str) -> std::result::Result<Vec<TraceRecord>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
            let obj = v.as_object().ok_or("expected an object")?;
            Ok(TraceRecord {
                iter: json_usize(obj, "iter")?,
                objective: json_f64(obj, "objective")?,
                gap: json_f64(obj, "gap")?,
                zeta_accepted: json_f64(obj, "zeta_accepted")?,
                backtracks: json_usize(obj, "backtracks")?,
                nnz_frac: json_f64(obj, "nnz_frac")?,
                err_to_ref: match obj.get("err_to_ref") {
                    None | Some(Value::Null) => None,
                    Some(_) => Some(json_f64(obj, "err_to_ref")?),
                },
            })
        })
        .collect()
}

pub fn read_trace(path: &Path, format: TraceFormat) -> Result<Vec<TraceRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = match format {
        TraceFormat::Csv => parse_trace_csv(&text),
        TraceFormat::JsonLines => parse_trace_json_lines(&text),
    };
    parsed.map_err(|msg| Error::Parse {
        path: path.to_path_buf(),
        msg,
    })
}
