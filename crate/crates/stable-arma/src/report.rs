//! Text renderings of a Monte Carlo report.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use stable_arma_core::montecarlo::McReport;

use crate::io::fmt_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::Json];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
            ReportFormat::Json => "json",
        }
    }
}

pub const CSV_HEADER: &str = "estimator,parameter,truth,mean,rmse,count,attempted";

/// `"0.0492 (0.0177)"`.
pub fn mean_rmse_cell(mean: f64, rmse: f64) -> String {
    format!("{mean:.4} ({rmse:.4})")
}

pub fn render_report(report: &McReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn render_csv(report: &McReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.estimator,
            r.parameter,
            fmt_f64(r.truth),
            fmt_f64(r.mean),
            fmt_f64(r.rmse),
            r.count,
            report.config.reps
        );
    }
    out
}

fn render_markdown(report: &McReport) -> String {
    let c = &report.config;
    let t = &c.truth;
    let mut params = vec![format!("theta1={}", t.theta)];
    for (name, v) in [("phi1", t.phi), ("c", t.c), ("a1", t.a1), ("b1", t.b1)] {
        if let Some(v) = v {
            params.push(format!("{name}={v}"));
        }
    }
    params.push(format!("alpha={}", c.alpha));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "## {:?} ({}), n={}, reps={}, seed={}\n",
        c.model,
        params.join(", "),
        c.n,
        c.reps,
        c.master_seed.0
    );
    out.push_str("| Estimator | Parameter | True | Mean (RMSE) | Used |\n");
    out.push_str("|---|---|---|---|---|\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {}/{} |",
            r.estimator,
            r.parameter,
            r.truth,
            mean_rmse_cell(r.mean, r.rmse),
            r.count,
            c.reps
        );
    }
    let failures: Vec<String> =
        report.failures.iter().map(|f| format!("{} {}/{}", f.estimator, f.failed, f.attempted)).collect();
    let _ = writeln!(out, "\nFailed replications: {}.", failures.join(", "));
    let _ = writeln!(out, "Run status: {}.", if report.failed { "FAILED (failure rate above 5%)" } else { "ok" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_convention() {
        assert_eq!(mean_rmse_cell(0.0492, 0.0177), "0.0492 (0.0177)");
        assert_eq!(mean_rmse_cell(0.9, 0.00004), "0.9000 (0.0000)");
    }
}
