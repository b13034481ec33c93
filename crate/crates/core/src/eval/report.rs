use super::MetricMode;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTail {
    pub threshold: f64,
    pub above: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElevationBin {
    pub episodes: usize,
    pub sr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElevationSplit {
    pub threshold: f64,
    pub high: ElevationBin,
    pub low: ElevationBin,
}

/// Suite-level results. OS, SR and SPL are fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub mode: MetricMode,
    pub episodes: usize,
    pub tl: f64,
    #[serde(with = "crate::navigators::inf_as_null")]
    pub ne: f64,
    pub os: f64,
    pub sr: f64,
    pub spl: f64,
    /// Driven (non-teleport) hops behind the error statistics.
    pub navigations: usize,
    #[serde(with = "crate::navigators::inf_as_null")]
    pub mean_nav_error: f64,
    pub error_tails: Vec<ErrorTail>,
    pub elevation: ElevationSplit,
}

fn pct(v: f64) -> String {
    format!("{:.1}", 100.0 * v)
}

/// Leaderboard-style table followed by the error-tail and elevation
/// breakdowns.
pub fn render_markdown(title: &str, report: &SummaryReport) -> String {
    let mut out = String::new();
    let mode = match report.mode {
        MetricMode::Vln => "VLN",
        MetricMode::Vlnce => "VLN-CE",
    };
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(out, "{} episodes, {mode} metrics.\n", report.episodes);
    let _ = writeln!(out, "| TL | NE | OS | SR | SPL |");
    let _ = writeln!(out, "|---:|---:|---:|---:|---:|");
    let _ = writeln!(
        out,
        "| {:.2} | {:.2} | {} | {} | {} |\n",
        report.tl,
        report.ne,
        pct(report.os),
        pct(report.sr),
        pct(report.spl)
    );
    let _ = writeln!(out, "### Short-range navigation errors\n");
    let _ = writeln!(
        out,
        "{} driven hops, mean error {:.3} m.\n",
        report.navigations, report.mean_nav_error
    );
    let _ = writeln!(out, "| threshold (m) | hops above | fraction (%) |");
    let _ = writeln!(out, "|---:|---:|---:|");
    for t in &report.error_tails {
        let _ = writeln!(out, "| > {:.1} | {} | {} |", t.threshold, t.above, pct(t.fraction));
    }
    let _ = writeln!(out, "\n### Elevation change\n");
    let _ = writeln!(out, "| elevation delta | episodes | SR |");
    let _ = writeln!(out, "|---|---:|---:|");
    let e = &report.elevation;
    let _ = writeln!(out, "| > {:.1} m | {} | {} |", e.threshold, e.high.episodes, pct(e.high.sr));
    let _ = writeln!(out, "| <= {:.1} m | {} | {} |", e.threshold, e.low.episodes, pct(e.low.sr));
    out
}
