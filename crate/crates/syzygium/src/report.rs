//! Scenario reports: named checks with verdicts, attached certificates and
//! wall-clock timings. Serialized reports are deterministic once the timings
//! field is normalized; `canonical_json` does exactly that.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    /// A pass that leans on an external cited result; never folded into PASS.
    #[serde(rename = "ASSUMED")]
    Assumed { citation: String },
}

impl Verdict {
    pub fn symbol(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Assumed { .. } => "ASSUMED",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Stable claim label describing what the check asserts.
    pub anchor: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, i64>,
    pub checks: Vec<CheckRow>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self
            .checks
            .iter()
            .any(|c| matches!(c.verdict, Verdict::Fail))
    }

    pub fn inconclusive_only(&self) -> bool {
        self.passed()
            && self
                .checks
                .iter()
                .any(|c| matches!(c.verdict, Verdict::Inconclusive))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Deterministic serialization: identical runs produce identical bytes
    /// (wall-clock timings are normalized out).
    pub fn canonical_json(&self) -> Result<String> {
        let mut clone = self.clone();
        for v in clone.timings_ms.values_mut() {
            *v = 0;
        }
        Ok(serde_json::to_string_pretty(&clone)?)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("scenario {} ({params})\n", self.name));
        for c in &self.checks {
            let extra = match &c.verdict {
                Verdict::Assumed { citation } => format!(" [assumed: {citation}]"),
                _ => String::new(),
            };
            out.push_str(&format!(
                "  [{}] {}: {}{}\n",
                c.verdict.symbol(),
                c.id,
                c.detail,
                extra
            ));
        }
        let total = self.timings_ms.get("total").copied().unwrap_or(0);
        out.push_str(&format!(
            "  => {} ({} checks, {total} ms)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len()
        ));
        out
    }
}

/// Incremental report builder that times each check.
pub struct ReportBuilder {
    report: Report,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(name: &str, params: BTreeMap<String, i64>) -> ReportBuilder {
        ReportBuilder {
            report: Report {
                name: name.to_string(),
                params,
                checks: Vec::new(),
                timings_ms: BTreeMap::new(),
            },
            started: Instant::now(),
        }
    }

    /// Run one named check; an `Err` from the body becomes a FAIL row.
    pub fn check<F>(&mut self, id: &str, anchor: &str, body: F)
    where
        F: FnOnce() -> Result<(Verdict, String, Option<serde_json::Value>)>,
    {
        let t0 = Instant::now();
        let (verdict, detail, certificate) = match body() {
            Ok(x) => x,
            Err(e) => (Verdict::Fail, format!("error: {e}"), None),
        };
        self.report
            .timings_ms
            .insert(id.to_string(), t0.elapsed().as_millis() as u64);
        self.report.checks.push(CheckRow {
            id: id.to_string(),
            verdict,
            anchor: anchor.to_string(),
            detail,
            certificate,
        });
    }

    pub fn finish(mut self) -> Report {
        self.report
            .timings_ms
            .insert("total".to_string(), self.started.elapsed().as_millis() as u64);
        self.report
    }
}

pub fn pass(detail: impl Into<String>) -> Result<(Verdict, String, Option<serde_json::Value>)> {
    Ok((Verdict::Pass, detail.into(), None))
}

pub fn pass_with(
    detail: impl Into<String>,
    certificate: serde_json::Value,
) -> Result<(Verdict, String, Option<serde_json::Value>)> {
    Ok((Verdict::Pass, detail.into(), Some(certificate)))
}

pub fn fail(detail: impl Into<String>) -> Result<(Verdict, String, Option<serde_json::Value>)> {
    Ok((Verdict::Fail, detail.into(), None))
}

pub fn inconclusive(
    detail: impl Into<String>,
) -> Result<(Verdict, String, Option<serde_json::Value>)> {
    Ok((Verdict::Inconclusive, detail.into(), None))
}

pub fn assumed(
    citation: impl Into<String>,
    detail: impl Into<String>,
) -> Result<(Verdict, String, Option<serde_json::Value>)> {
    Ok((
        Verdict::Assumed {
            citation: citation.into(),
        },
        detail.into(),
        None,
    ))
}
