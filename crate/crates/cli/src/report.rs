//! Report rows and their table and CSV renderings.

use std::io::Write;
use std::path::Path;

use bellmeas::inequalities::InequalityReport;

pub const CSV_HEADER: &str = "scenario,regime,value,classical_bound,quantum_bound,violated,residual";

/// Output rendering, selected by `--format` or a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format '{s}' (expected table or csv)")),
        }
    }
}

/// One line of output. `residual` is the absolute deviation from the run's
/// reference value: the closed-form prediction for parameterized joint
/// scenarios, the known extremal value for preset or optimized runs, and 0
/// when custom settings leave nothing to compare against.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub scenario: String,
    pub regime: String,
    pub value: f64,
    pub classical_bound: f64,
    pub quantum_bound: Option<f64>,
    pub violated: bool,
    pub residual: f64,
}

impl ReportRow {
    pub fn from_report(report: &InequalityReport, expected: Option<f64>) -> Self {
        Self {
            scenario: report.name.to_string(),
            regime: report.regime.to_string(),
            value: report.value,
            classical_bound: report.classical_bound,
            quantum_bound: report.quantum_bound,
            violated: report.violated,
            residual: expected.map_or(0.0, |e| (report.value - e).abs()),
        }
    }
}

/// 12 significant digits, the precision the CSV contract guarantees.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.scenario);
        out.push(',');
        out.push_str(&r.regime);
        out.push(',');
        out.push_str(&sig12(r.value));
        out.push(',');
        out.push_str(&sig12(r.classical_bound));
        out.push(',');
        if let Some(q) = r.quantum_bound {
            out.push_str(&sig12(q));
        }
        out.push(',');
        out.push_str(if r.violated { "true" } else { "false" });
        out.push(',');
        out.push_str(&sig12(r.residual));
        out.push('\n');
    }
    out
}

/// Human-readable columns; `statuses` appends a PASS/FAIL column when the
/// rows come from a checked suite.
pub fn render_table(rows: &[ReportRow], statuses: Option<&[bool]>) -> String {
    let mut out = format!(
        "{:<16} {:<13} {:>15} {:>10} {:>15} {:>9} {:>12}",
        "scenario", "regime", "value", "classical", "quantum", "violated", "residual"
    );
    if statuses.is_some() {
        out.push_str("  status");
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let quantum = r
            .quantum_bound
            .map_or_else(|| "-".to_string(), |q| format!("{q:.9}"));
        out.push_str(&format!(
            "{:<16} {:<13} {:>15.9} {:>10.3} {:>15} {:>9} {:>12.3e}",
            r.scenario, r.regime, r.value, r.classical_bound, quantum, r.violated, r.residual
        ));
        if let Some(s) = statuses {
            out.push_str(if s[i] { "  PASS" } else { "  FAIL" });
        }
        out.push('\n');
    }
    out
}

/// Writes to the path when one is given, stdout otherwise.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}
