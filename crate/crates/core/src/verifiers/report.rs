use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::CheckConfig;
use super::instances::InstanceDump;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Passed,
    Failed,
    /// Witness search that found nothing; neither a pass nor a failure.
    Inconclusive,
}

/// One offending comparison (or, for the witness search, one witness).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub condition: String,
    pub instance: Option<InstanceDump>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    /// How to read `passed` and `violations` for this check.
    pub semantics: String,
    pub outcome: Outcome,
    pub passed: bool,
    pub trials_run: usize,
    pub comparisons: usize,
    /// Largest `lhs - rhs` (or `|lhs - rhs|` for equalities) over all
    /// comparisons.
    pub worst_gap: f64,
    pub violations: Vec<Violation>,
    pub metrics: BTreeMap<String, f64>,
    pub config: CheckConfig,
}

impl CheckReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn metric(&self, name: &str) -> f64 {
        self.metrics.get(name).copied().unwrap_or(0.0)
    }
}

/// Aggregate over several checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: Vec<SummaryLine>,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub all_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryLine {
    pub check_name: String,
    pub outcome: Outcome,
    pub trials_run: usize,
    pub violations: usize,
    pub worst_gap: f64,
}

impl Summary {
    pub fn from_reports(reports: &[CheckReport]) -> Self {
        let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
        let checks = reports
            .iter()
            .map(|r| SummaryLine {
                check_name: r.check_name.clone(),
                outcome: r.outcome,
                trials_run: r.trials_run,
                violations: r.violations.len(),
                worst_gap: r.worst_gap,
            })
            .collect();
        Summary {
            checks,
            passed: count(Outcome::Passed),
            failed: count(Outcome::Failed),
            inconclusive: count(Outcome::Inconclusive),
            all_passed: count(Outcome::Passed) == reports.len(),
        }
    }
}
