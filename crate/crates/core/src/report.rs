//! Verification reports and their JSON form.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

/// What a check actually compared: a cell count and, for coefficient
/// comparisons, the bounding exponent ranges in `z` and `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w: Option<[i64; 2]>,
    pub cells: usize,
}

impl Window {
    pub fn entries(cells: usize) -> Self {
        Window { z: None, w: None, cells }
    }

    pub fn from_bounding(cells: usize, b: Option<((i64, i64), (i64, i64))>) -> Self {
        match b {
            Some(((zl, zh), (wl, wh))) => Window { z: Some([zl, zh]), w: Some([wl, wh]), cells },
            None => Window::entries(cells),
        }
    }

    pub fn single(cells: usize, lo: i64, hi: i64) -> Self {
        Window { z: Some([lo, hi]), w: None, cells }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    /// Exponents and/or matrix indices locating the first disagreement.
    pub indices: Vec<i64>,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    /// The relation being checked, written out.
    pub paper_anchor: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn from_outcome(
        check_id: impl Into<String>,
        anchor: impl Into<String>,
        window: Option<Window>,
        mismatch: Option<Mismatch>,
        start: Instant,
    ) -> Self {
        VerificationReport {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            verdict: if mismatch.is_some() { Verdict::Fail } else { Verdict::Pass },
            window,
            first_mismatch: mismatch,
            notes: Vec::new(),
            wall_time: start.elapsed().as_secs_f64(),
        }
    }

    /// A failed check whose failure was not located at a coefficient, e.g.
    /// when nothing could be compared.
    pub fn failed(check_id: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>, start: Instant) -> Self {
        let reason = reason.into();
        VerificationReport {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            verdict: Verdict::Fail,
            window: None,
            first_mismatch: Some(Mismatch { indices: Vec::new(), expected: String::new(), got: reason.clone() }),
            notes: vec![reason],
            wall_time: start.elapsed().as_secs_f64(),
        }
    }

    pub fn skipped(check_id: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>) -> Self {
        VerificationReport {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            verdict: Verdict::Skipped,
            window: None,
            first_mismatch: None,
            notes: vec![reason.into()],
            wall_time: 0.0,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Record the verdict of an alternative reading of the same relation
    /// without letting it affect this report's verdict.
    pub fn with_diagnostic(self, label: &str, other: &VerificationReport) -> Self {
        let v = match other.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Skipped => "skipped".to_string(),
            Verdict::Fail => match &other.first_mismatch {
                Some(m) if !m.indices.is_empty() => {
                    format!("fail at {:?}: expected {} got {}", m.indices, m.expected, m.got)
                }
                _ => "fail".to_string(),
            },
        };
        self.with_note(format!("{label} [{}]: {v}", other.paper_anchor))
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        let v = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
        };
        let mut s = format!("{v:4}  {:<44} {}", self.check_id, self.paper_anchor);
        if let Some(w) = &self.window {
            s.push_str(&format!("  [cells={}", w.cells));
            if let Some(z) = w.z {
                s.push_str(&format!(" z={}..{}", z[0], z[1]));
            }
            if let Some(wr) = w.w {
                s.push_str(&format!(" w={}..{}", wr[0], wr[1]));
            }
            s.push(']');
        }
        if let Some(m) = &self.first_mismatch {
            s.push_str(&format!("\n      first mismatch at {:?}: expected {} got {}", m.indices, m.expected, m.got));
        }
        for n in &self.notes {
            s.push_str(&format!("\n      note: {n}"));
        }
        s
    }
}

/// Sort reports by check id and serialize; `wall_time` is the only
/// nondeterministic field.
pub fn bundle_json(reports: &[VerificationReport]) -> String {
    let mut v: Vec<&VerificationReport> = reports.iter().collect();
    v.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    serde_json::to_string_pretty(&v).expect("reports serialize")
}
