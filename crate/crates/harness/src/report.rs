//! Report assembly and output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::HResult;
use crate::spec::InstanceSpec;
use crate::verdict::{Summary, Verdict};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub spec: InstanceSpec,
    pub summary: Summary,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    /// Canonical JSON: object keys sorted at every level, two-space
    /// indentation, trailing newline.
    pub fn to_json(&self) -> HResult<String> {
        let value = serde_json::to_value(self)?;
        let mut out = serde_json::to_string_pretty(&value)?;
        out.push('\n');
        Ok(out)
    }

    pub fn write_json(&self, path: &Path) -> HResult<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One row per verdict.
    pub fn write_csv(&self, out: impl Write) -> HResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "check", "branch", "outcome", "lhs", "rhs", "margin", "notes"])?;
        for v in &self.verdicts {
            let text = |x: &Option<String>| x.clone().unwrap_or_default();
            w.write_record([
                v.id.clone(),
                v.check.clone(),
                v.branch.as_str().to_string(),
                v.outcome.as_str().to_string(),
                text(&v.lhs),
                text(&v.rhs),
                text(&v.margin),
                v.notes.join("; "),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Process exit status: 1 when any verdict is a finding.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.finding > 0)
    }
}
