//! Machine-readable estimate reports.
//!
//! Every check produces one or more [`EstimateReport`] rows; the rows
//! serialize to JSON lines for downstream tooling. A `pass` verdict always
//! reflects the tolerance recorded in the same row.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Estimate matched its target within the recorded tolerance.
    Pass,
    Fail,
    /// The target is a limit statement; the verdict reports a trend or
    /// corridor check rather than equality, and counts as acceptable.
    AsymptoticOnly,
}

impl Verdict {
    pub fn acceptable(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::AsymptoticOnly)
    }

    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A Monte Carlo (or deterministic) estimate with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    /// Which identity or constant the estimate tests, in plain words.
    pub paper_ref: String,
    pub estimate: f64,
    pub se: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// Absolute tolerance backing a `pass` verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    pub n: u64,
    pub seed: u64,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl EstimateReport {
    pub fn new(name: impl Into<String>, reference: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            paper_ref: reference.into(),
            estimate: f64::NAN,
            se: f64::NAN,
            target: None,
            tolerance: None,
            verdict: Verdict::Fail,
            n: 0,
            seed: 0,
            runtime_s: 0.0,
            config_hash: None,
            notes: None,
        }
    }

    pub fn estimate(mut self, estimate: f64, se: f64) -> Self {
        self.estimate = estimate;
        self.se = se;
        self
    }

    pub fn samples(mut self, n: u64) -> Self {
        self.n = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes = Some(note.into());
        self
    }

    pub fn runtime(mut self, secs: f64) -> Self {
        self.runtime_s = secs;
        self
    }

    /// Judge against a target with an absolute tolerance.
    pub fn judge(mut self, target: f64, tolerance: f64) -> Self {
        self.target = Some(target);
        self.tolerance = Some(tolerance);
        self.verdict = Verdict::from_pass((self.estimate - target).abs() <= tolerance);
        self
    }

    /// Record a trend/corridor outcome for a limit statement.
    pub fn asymptotic(mut self, target: f64, within_corridor: bool) -> Self {
        self.target = Some(target);
        self.verdict = if within_corridor {
            Verdict::AsymptoticOnly
        } else {
            Verdict::Fail
        };
        self
    }

    /// Set the verdict directly from a boolean check.
    pub fn checked(mut self, ok: bool) -> Self {
        self.verdict = Verdict::from_pass(ok);
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
