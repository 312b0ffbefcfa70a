//! Report schema and emitters. One JSON document per run:
//! {task, config_digest, entries: [...], pass}, each entry carrying the
//! residual statistics of one verified identity. CSV is a flat projection
//! of the entries for spreadsheet use.

use serde::{Deserialize, Serialize};
use solwarp_core::ResidualReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEntry {
    pub identity: String,
    pub max_abs: f64,
    pub rms: f64,
    pub spread: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Vec<f64>,
}

impl From<&ResidualReport> for ReportEntry {
    fn from(r: &ResidualReport) -> Self {
        ReportEntry {
            identity: r.identity.clone(),
            max_abs: r.max_abs,
            rms: r.rms,
            spread: r.constancy_spread,
            tolerance: r.tolerance,
            pass: r.pass,
            worst_point: r.worst_point.clone(),
        }
    }
}

impl ReportEntry {
    /// A bare check without sweep statistics: max_abs against tolerance.
    pub fn scalar_check(identity: impl Into<String>, value: f64, tolerance: f64) -> Self {
        ReportEntry {
            identity: identity.into(),
            max_abs: value,
            rms: value.abs(),
            spread: None,
            tolerance,
            pass: value <= tolerance,
            worst_point: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub entries: Vec<ReportEntry>,
    pub pass: bool,
}

impl Report {
    pub fn new(
        task: impl Into<String>,
        config_digest: String,
        entries: Vec<ReportEntry>,
        timestamp: bool,
    ) -> Report {
        let pass = entries.iter().all(|e| e.pass);
        let generated_at_unix = if timestamp {
            Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            )
        } else {
            None
        };
        Report {
            task: task.into(),
            config_digest,
            generated_at_unix,
            entries,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,max_abs,rms,spread,tolerance,pass,worst_point\n");
        for e in &self.entries {
            let spread = e.spread.map(|s| format!("{s}")).unwrap_or_default();
            let point = e
                .worst_point
                .iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.identity, e.max_abs, e.rms, spread, e.tolerance, e.pass, point
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_is_deterministic_without_timestamp() {
        let entries = vec![ReportEntry::scalar_check("x", 0.5, 1.0)];
        let a = Report::new("suite", "deadbeef".into(), entries.clone(), false);
        let b = Report::new("suite", "deadbeef".into(), entries, false);
        assert_eq!(a.to_json(), b.to_json());
        assert!(!a.to_json().contains("generated_at_unix"));
    }

    #[test]
    fn pass_is_conjunction_of_entries() {
        let entries = vec![
            ReportEntry::scalar_check("a", 0.5, 1.0),
            ReportEntry::scalar_check("b", 2.0, 1.0),
        ];
        let r = Report::new("t", String::new(), entries, false);
        assert!(!r.pass);
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let entries = vec![
            ReportEntry::scalar_check("a", 0.5, 1.0),
            ReportEntry::scalar_check("b", 0.1, 1.0),
        ];
        let r = Report::new("t", String::new(), entries, false);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("identity,"));
    }
}
