//! Machine-readable run reports.
//!
//! A report is a single TOML document with a stable field order (struct
//! declaration order), so runs are diffable byte-for-byte once the timings
//! section is stripped. Serialize-then-parse is the identity on every
//! report. The verdict is downgraded at seal time unless every embedded
//! certificate re-verified, so "verified" can never be emitted on the
//! strength of a stale flag.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use charp_core::extension::{GaloisStepKind, GaloisTowerReport};
use charp_core::Error;

use crate::problem::EffectiveBudgets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
            Verdict::Error => 3,
        }
    }
}

/// One named observation made during the run, in run order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub key: String,
    pub value: String,
}

/// A serialized certificate together with the result of re-checking it
/// while the report was being assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: String,
    pub statement: String,
    pub data: Vec<String>,
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerRecord {
    pub steps: Vec<String>,
    pub solvable: bool,
    pub generically_separable: bool,
}

impl TowerRecord {
    pub fn from_report(report: &GaloisTowerReport) -> Self {
        let steps = report
            .steps
            .iter()
            .map(|(name, kind)| {
                let desc = match kind {
                    GaloisStepKind::RootOfUnity { n } => format!("root of unity of order {n}"),
                    GaloisStepKind::Radical { degree } => format!("radical of degree {degree}"),
                    GaloisStepKind::ArtinSchreier { degree } => {
                        format!("artin-schreier of degree {degree}")
                    }
                    GaloisStepKind::InseparableRoot { degree } => {
                        format!("inseparable root of degree {degree}")
                    }
                };
                format!("{name}: {desc}")
            })
            .collect();
        TowerRecord {
            steps,
            solvable: report.solvable_tower,
            generically_separable: report.generically_separable,
        }
    }
}

/// The budget values a run was actually performed under, after flag
/// overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub max_e: u32,
    pub truncation: u64,
    pub degree_cap: u64,
    pub pairs_cap: u64,
    pub solve_degree_cap: u64,
}

/// Consumption counters, where the driver can observe them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UsageRecord {
    pub pairs_processed: Option<u64>,
    pub levels_searched: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingsRecord {
    pub total_ms: u64,
}

/// The complete run report. Scalar fields come first so the TOML document
/// keeps its stable top-to-bottom order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub summary: String,
    pub findings: Vec<Finding>,
    pub certificates: Vec<CertificateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerRecord>,
    pub budgets: BudgetRecord,
    pub usage: UsageRecord,
    pub timings: TimingsRecord,
}

impl Report {
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("reports always serialize")
    }

    /// The human-oriented one-screen form.
    pub fn render_summary(&self) -> String {
        let mut out = String::new();
        let fixture = self.fixture.as_deref().unwrap_or("-");
        out.push_str(&format!("task:      {}\n", self.task));
        out.push_str(&format!("fixture:   {fixture}\n"));
        out.push_str(&format!("verdict:   {}\n", verdict_name(self.verdict)));
        out.push_str(&format!("summary:   {}\n", self.summary));
        for f in &self.findings {
            out.push_str(&format!("  {}: {}\n", f.key, f.value));
        }
        for c in &self.certificates {
            let mark = if c.reverified { "ok" } else { "FAILED" };
            out.push_str(&format!("  certificate [{}] {} ({mark})\n", c.kind, c.statement));
        }
        if let Some(t) = &self.tower {
            out.push_str(&format!(
                "  tower: {} steps, solvable: {}, generically separable: {}\n",
                t.steps.len(),
                t.solvable,
                t.generically_separable
            ));
        }
        out.push_str(&format!("time:      {} ms\n", self.timings.total_ms));
        out.push_str(&format!("exit code: {}\n", self.exit_code));
        out
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Verified => "verified",
        Verdict::Refuted => "refuted",
        Verdict::Inconclusive => "inconclusive",
        Verdict::Error => "error",
    }
}

/// Accumulates findings and certificates while a task runs, then seals
/// them into a [`Report`].
pub struct ReportBuilder {
    task: String,
    fixture: Option<String>,
    verdict: Verdict,
    summary: String,
    findings: Vec<Finding>,
    certificates: Vec<CertificateRecord>,
    tower: Option<TowerRecord>,
    usage: UsageRecord,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(task: &str, fixture: Option<&str>) -> Self {
        ReportBuilder {
            task: task.to_string(),
            fixture: fixture.map(|s| s.to_string()),
            verdict: Verdict::Error,
            summary: "task did not run to completion".to_string(),
            findings: Vec::new(),
            certificates: Vec::new(),
            tower: None,
            usage: UsageRecord::default(),
            start: Instant::now(),
        }
    }

    pub fn finding(&mut self, key: &str, value: impl Into<String>) {
        self.findings.push(Finding { key: key.to_string(), value: value.into() });
    }

    pub fn certificate(
        &mut self,
        kind: &str,
        statement: impl Into<String>,
        data: Vec<String>,
        reverified: bool,
    ) {
        self.certificates.push(CertificateRecord {
            kind: kind.to_string(),
            statement: statement.into(),
            data,
            reverified,
        });
    }

    pub fn tower(&mut self, report: &GaloisTowerReport) {
        self.tower = Some(TowerRecord::from_report(report));
    }

    pub fn pairs_processed(&mut self, n: usize) {
        self.usage.pairs_processed = Some(n as u64);
    }

    pub fn levels_searched(&mut self, e: u32) {
        self.usage.levels_searched = Some(e);
    }

    pub fn verdict(&mut self, verdict: Verdict, summary: impl Into<String>) {
        self.verdict = verdict;
        self.summary = summary.into();
    }

    /// Records a failed run. Budget exhaustion is an inconclusive outcome,
    /// never a mathematical answer; everything else is an error.
    pub fn fail(&mut self, err: &Error) {
        if err.is_budget() {
            self.verdict(Verdict::Inconclusive, format!("stopped by budget: {err}"));
        } else {
            self.verdict(Verdict::Error, err.to_string());
        }
    }

    /// Finishes the report. A "verified" verdict survives only if every
    /// certificate re-verified during assembly.
    pub fn seal(self, budgets: &EffectiveBudgets) -> Report {
        let mut verdict = self.verdict;
        let mut summary = self.summary;
        if verdict == Verdict::Verified {
            if let Some(bad) = self.certificates.iter().find(|c| !c.reverified) {
                verdict = Verdict::Error;
                summary = format!(
                    "certificate [{}] failed to re-verify during serialization",
                    bad.kind
                );
            }
        }
        Report {
            tool: "charp".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            task: self.task,
            fixture: self.fixture,
            verdict,
            exit_code: verdict.exit_code(),
            summary,
            findings: self.findings,
            certificates: self.certificates,
            tower: self.tower,
            budgets: BudgetRecord {
                max_e: budgets.max_e,
                truncation: budgets.truncation,
                degree_cap: budgets.degree_cap,
                pairs_cap: budgets.pairs_cap as u64,
                solve_degree_cap: budgets.solve_degree_cap,
            },
            usage: self.usage,
            timings: TimingsRecord { total_ms: self.start.elapsed().as_millis() as u64 },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::EffectiveBudgets;

    fn sample() -> Report {
        let mut rb = ReportBuilder::new("frobclosure", Some("frobclosure-fermat2"));
        rb.finding("closure level", "1");
        rb.certificate(
            "frobenius closure",
            "z^2 lands in the bracket power at level 1",
            vec!["z*x".into(), "z*y".into()],
            true,
        );
        rb.verdict(Verdict::Verified, "membership certified");
        rb.seal(&EffectiveBudgets::default())
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let report = sample();
        let text = report.to_toml();
        let back: Report = toml::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn verified_verdict_requires_every_certificate_to_reverify() {
        let mut rb = ReportBuilder::new("groebner", None);
        rb.certificate("division", "f = q1 g1", vec![], false);
        rb.verdict(Verdict::Verified, "looks done");
        let report = rb.seal(&EffectiveBudgets::default());
        assert_eq!(report.verdict, Verdict::Error);
        assert_eq!(report.exit_code, 3);
    }

    #[test]
    fn exit_codes_follow_the_verdict() {
        assert_eq!(Verdict::Verified.exit_code(), 0);
        assert_eq!(Verdict::Refuted.exit_code(), 1);
        assert_eq!(Verdict::Inconclusive.exit_code(), 2);
        assert_eq!(Verdict::Error.exit_code(), 3);
    }

    #[test]
    fn budget_failures_are_inconclusive_not_errors() {
        let mut rb = ReportBuilder::new("groebner", None);
        rb.fail(&Error::Budget("pair cap".into()));
        let r = rb.seal(&EffectiveBudgets::default());
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let mut rb = ReportBuilder::new("groebner", None);
        rb.fail(&Error::InvalidInput("bad".into()));
        let r = rb.seal(&EffectiveBudgets::default());
        assert_eq!(r.verdict, Verdict::Error);
    }
}
