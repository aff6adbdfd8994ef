//! Report rows and the CSV/JSON serializers.
//!
//! Output is deterministic byte for byte: floats print through Rust's
//! shortest-roundtrip formatting, rows are emitted in trial order, and lines
//! end with `\n` on every platform.

use serde::Serialize;

use crate::config::ConfigEcho;

/// One measured comparison `lhs ≤ (const) · rhs`.
///
/// `j` is the row kind: a singular-value index when nonnegative, `-1` for a
/// whole-norm row, `-2` for a weak-norm row.  Suites that measure something
/// other than singular values document their own `j` convention.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub trial: u64,
    pub j: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub alpha: f64,
    pub p: f64,
    pub m: u32,
    pub dim: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<BenchRow>,
    pub summary: Summary,
}

pub fn summarize(rows: &[BenchRow], config: ConfigEcho) -> Summary {
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    let max_ratio = ratios.last().copied().unwrap_or(f64::NAN);
    let median_ratio = if ratios.is_empty() {
        f64::NAN
    } else if ratios.len() % 2 == 1 {
        ratios[ratios.len() / 2]
    } else {
        0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
    };
    Summary {
        max_ratio,
        median_ratio,
        config,
    }
}

pub const CSV_HEADER: &str = "trial,j,lhs,rhs,ratio,alpha,p,m,dim,seed";

pub fn csv_string(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.trial, r.j, r.lhs, r.rhs, r.ratio, r.alpha, r.p, r.m, r.dim, r.seed
        ));
    }
    out
}

pub fn json_string(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}
