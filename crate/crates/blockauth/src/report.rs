//! Plain-text verification report: `key: value` lines followed by the
//! tamper mask as run-length rows.
//!
//! ```text
//! format: blockauth-report 1
//! ...
//! verdict: tampered
//! mask 0 17: 12. 3X 49.
//! ```
//!
//! Every `mask <channel> <row>` line covers one block row; `.` is a block that
//! verified and `X` one that did not. Runs sum to `cols`.

use std::collections::BTreeMap;
use std::fmt::Write;

use blockauth_core::VerificationReport;

use crate::error::{Error, Result};

pub const FORMAT: &str = "blockauth-report 1";

/// Mismatch fraction above `tau` means tampered.
pub fn is_tampered(report: &VerificationReport, tau: f64) -> bool {
    report.mismatch_fraction() > tau
}

pub fn render(report: &VerificationReport, tau: f64) -> String {
    let l = &report.layout;
    let g = &report.grid;
    let mut s = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(s, "{k}: {v}");
    };
    kv("format", &FORMAT);
    kv("width", &l.width);
    kv("height", &l.height);
    kv("channels", &l.channels);
    kv("mode", &l.mode.name());
    kv("block_size", &l.block_size);
    kv("margin", &l.margin.value());
    kv("reps", &l.reps);
    kv(
        "aggregation",
        &match report.aggregation {
            blockauth_core::Aggregation::Any => "any",
            blockauth_core::Aggregation::Majority => "majority",
        },
    );
    kv("fingerprint", &format_args!("{:016x}", l.fingerprint));
    kv("rows", &g.rows());
    kv("cols", &g.cols());
    kv("mask_channels", &report.effective_channels);
    kv("uncovered_right", &g.uncovered_right());
    kv("uncovered_bottom", &g.uncovered_bottom());
    kv("code_bits", &report.code_bits.len());
    kv("extracted_bits", &report.total_bits());
    kv("matched_bits", &report.matched_bits());
    kv("cdr", &format_args!("{:.6}", report.cdr));
    kv(
        "mismatch_fraction",
        &format_args!("{:.6}", report.mismatch_fraction()),
    );
    kv("flagged_blocks", &report.flagged_blocks());
    kv("tau", &tau);
    kv(
        "verdict",
        &if is_tampered(report, tau) {
            "tampered"
        } else {
            "authentic"
        },
    );
    for c in 0..report.effective_channels {
        for row in 0..g.rows() {
            let flags = (0..g.cols()).map(|col| report.is_tampered(c, row, col));
            let _ = writeln!(s, "mask {c} {row}: {}", run_length(flags));
        }
    }
    s
}

fn run_length(flags: impl Iterator<Item = bool>) -> String {
    let mut runs: Vec<(usize, bool)> = Vec::new();
    for f in flags {
        match runs.last_mut() {
            Some((n, last)) if *last == f => *n += 1,
            _ => runs.push((1, f)),
        }
    }
    runs.iter()
        .map(|(n, f)| format!("{n}{}", if *f { 'X' } else { '.' }))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A report read back from text.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedReport {
    pub fields: BTreeMap<String, String>,
    pub rows: usize,
    pub cols: usize,
    pub channels: usize,
    /// True where tampered, channel-major then raster.
    pub mask: Vec<bool>,
}

impl ParsedReport {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    pub fn tampered_at(&self, channel: usize, row: usize, col: usize) -> bool {
        self.mask[(channel * self.rows + row) * self.cols + col]
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Report(msg.into())
}

pub fn parse(text: &str) -> Result<ParsedReport> {
    let mut fields = BTreeMap::new();
    let mut mask_lines = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, value) = line
            .split_once(": ")
            .ok_or_else(|| bad(format!("malformed line {line:?}")))?;
        if let Some(pos) = key.strip_prefix("mask ") {
            mask_lines.push((pos.to_string(), value.to_string()));
        } else {
            fields.insert(key.to_string(), value.to_string());
        }
    }
    if fields.get("format").map(String::as_str) != Some(FORMAT) {
        return Err(bad("missing or unknown format line"));
    }
    let num = |k: &str| -> Result<usize> {
        fields
            .get(k)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("missing or invalid {k}")))
    };
    let (rows, cols, channels) = (num("rows")?, num("cols")?, num("mask_channels")?);
    if mask_lines.len() != rows * channels {
        return Err(bad("mask row count does not match rows x channels"));
    }
    let mut mask = Vec::with_capacity(rows * cols * channels);
    for (i, (pos, runs)) in mask_lines.iter().enumerate() {
        if *pos != format!("{} {}", i / rows, i % rows) {
            return Err(bad(format!("mask row {pos:?} out of order")));
        }
        let start = mask.len();
        for run in runs.split(' ') {
            let (n, sym) = run.split_at(run.len().saturating_sub(1));
            let n: usize = n.parse().map_err(|_| bad(format!("bad run {run:?}")))?;
            let flag = match sym {
                "X" => true,
                "." => false,
                _ => return Err(bad(format!("bad run {run:?}"))),
            };
            mask.extend(std::iter::repeat_n(flag, n));
        }
        if mask.len() - start != cols {
            return Err(bad(format!("mask row {pos:?} does not span {cols} blocks")));
        }
    }
    Ok(ParsedReport {
        fields,
        rows,
        cols,
        channels,
        mask,
    })
}
