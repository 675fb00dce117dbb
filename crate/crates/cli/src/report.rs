//! Machine-readable run report. Serialized with sorted keys and sorted
//! witnesses so identical inputs give byte-identical output.

use lseq_core::analysis::{DeltaResult, RankTable};
use lseq_core::arith::EffortBudget;
use lseq_core::conjectures::{ConjectureResult, ConjectureStatus};
use lseq_core::report::{CheckReport, Status};
use lseq_core::serde_dec;
use lseq_core::Nat;
use serde::{Deserialize, Serialize};

/// Witnesses kept per check (or per conjecture reading) in a report.
pub const WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seq: String,
    pub max_n: u64,
    pub max_p: u64,
    pub effort: EffortBudget,
    pub checks: Vec<String>,
    pub odd_primes_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BRow {
    pub n: u64,
    #[serde(with = "serde_dec")]
    pub a_n: Nat,
    #[serde(with = "serde_dec")]
    pub b_n: Nat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: Verdict,
    pub exit_code: i32,
}

impl Outcome {
    pub fn from_results(checks: &[CheckReport], conjectures: &[ConjectureResult]) -> Self {
        let failed = checks.iter().any(|c| c.status == Status::Fail)
            || conjectures
                .iter()
                .any(|c| c.status == ConjectureStatus::Counterexample);
        let pending = checks.iter().any(|c| c.status == Status::Inconclusive)
            || conjectures
                .iter()
                .any(|c| c.status == ConjectureStatus::Inconclusive);
        let (verdict, exit_code) = if failed {
            (Verdict::Fail, 1)
        } else if pending {
            (Verdict::Inconclusive, 2)
        } else {
            (Verdict::Pass, 0)
        };
        Outcome { verdict, exit_code }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckReport>,
    /// Checks repeated for p = 2, outside the odd-prime hypothesis. They
    /// never affect the outcome.
    pub informational: Vec<CheckReport>,
    pub deltas: Vec<DeltaResult>,
    pub conjectures: Vec<ConjectureResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bseq_table: Option<Vec<BRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<RankTable>,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        // serde_json's default map is ordered, so going through Value sorts keys.
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut text = serde_json::to_string_pretty(&value).expect("value is serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn cap_witnesses(&mut self) {
        for c in self.checks.iter_mut().chain(self.informational.iter_mut()) {
            c.cap_witnesses(WITNESS_CAP);
        }
        for c in &mut self.conjectures {
            c.cap_witnesses(WITNESS_CAP);
        }
    }

    /// One line per check and conjecture.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} on {}\n",
            self.tool, self.command, self.config.seq
        ));
        for c in &self.checks {
            out.push_str(&check_line(c, ""));
        }
        for c in &self.informational {
            out.push_str(&check_line(c, " (informational)"));
        }
        for c in &self.conjectures {
            let status = match c.status {
                ConjectureStatus::NoCounterexample => "NO-COUNTEREXAMPLE",
                ConjectureStatus::Counterexample => "COUNTEREXAMPLE",
                ConjectureStatus::Inconclusive => "INCONCLUSIVE",
            };
            out.push_str(&format!(
                "{status:<17} conjecture {} tested={} skipped={}",
                c.conjecture_id, c.tested_count, c.skipped_count
            ));
            for r in &c.readings {
                out.push_str(&format!(
                    " [{}{}: {:?}, {} witnesses]",
                    r.name,
                    if r.primary { "*" } else { "" },
                    r.status,
                    r.witnesses.len() as u64 + r.witness_overflow
                ));
            }
            if let Some(set) = &c.exceptional_set {
                out.push_str(&format!(" exceptional={set:?}"));
            }
            if let Some(m) = &c.candidate_m {
                out.push_str(&format!(" M={m}"));
            }
            out.push('\n');
        }
        if let Some(rows) = &self.bseq_table {
            for r in rows {
                out.push_str(&format!("{:>6} {} {}\n", r.n, r.a_n, r.b_n));
            }
        }
        if let ("rank", Some(ranks)) = (self.command.as_str(), &self.ranks) {
            for e in ranks.entries() {
                match e.rank.rho() {
                    Some(rho) => out.push_str(&format!("rank({}) = {rho}\n", e.p)),
                    None => out.push_str(&format!("rank({}) not found\n", e.p)),
                }
            }
        }
        out.push_str(&format!(
            "outcome: {:?} (exit {})\n",
            self.outcome.verdict, self.outcome.exit_code
        ));
        out
    }
}

fn check_line(c: &CheckReport, suffix: &str) -> String {
    let status = match c.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
    };
    format!(
        "{status:<17} {}{suffix} tested={} skipped={} witnesses={}\n",
        c.name,
        c.tested_count,
        c.skipped_count,
        c.witnesses.len() as u64 + c.witness_overflow
    )
}
