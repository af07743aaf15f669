//! Per-check results and their text and JSON renderings.

use std::fmt::Write as _;

use nijenhuis_core::{CheckReport, Clause, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Pass,
    GenericPass,
    Fail,
    Assumed,
    Error,
}

impl VerdictKind {
    pub fn is_ok(self) -> bool {
        matches!(self, VerdictKind::Pass | VerdictKind::GenericPass | VerdictKind::Assumed)
    }

    pub fn label(self) -> &'static str {
        match self {
            VerdictKind::Pass => "pass",
            VerdictKind::GenericPass => "generic-pass",
            VerdictKind::Fail => "fail",
            VerdictKind::Assumed => "assumed",
            VerdictKind::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub name: String,
    pub verdict: VerdictKind,
    pub witness: Vec<String>,
    pub locus: Vec<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Sample points drawn.
    pub points: usize,
    /// Points where every symbolic pass was confirmed.
    pub agreed: usize,
    /// Points on a pole or degeneracy locus.
    pub skipped: usize,
    pub disagreement: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub index: usize,
    pub check: String,
    pub verdict: VerdictKind,
    pub witness: Vec<String>,
    pub locus: Vec<String>,
    pub note: Option<String>,
    pub millis: u64,
    pub clauses: Vec<ClauseResult>,
    pub oracle: Option<OracleResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub sample: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub pass: usize,
    pub generic_pass: usize,
    pub fail: usize,
    pub assumed: usize,
    pub error: usize,
}

pub(crate) fn split(v: &Verdict) -> (VerdictKind, Vec<String>, Vec<String>, Option<String>) {
    match v {
        Verdict::Pass => (VerdictKind::Pass, vec![], vec![], None),
        Verdict::GenericPass { locus } => (VerdictKind::GenericPass, vec![], locus.clone(), None),
        Verdict::Fail { witness } => (VerdictKind::Fail, witness.clone(), vec![], None),
        Verdict::Assumed { note } => (VerdictKind::Assumed, vec![], vec![], Some(note.clone())),
        Verdict::Error { message } => (VerdictKind::Error, vec![], vec![], Some(message.clone())),
    }
}

fn clause_result(c: &Clause) -> ClauseResult {
    let (verdict, witness, locus, note) = split(&c.verdict);
    ClauseResult { name: c.name.clone(), verdict, witness, locus, note }
}

impl CheckResult {
    pub fn from_report(index: usize, check: &str, rep: &CheckReport, millis: u64) -> Self {
        let clauses: Vec<ClauseResult> = rep.clauses.iter().map(clause_result).collect();
        let all_assumed = !clauses.is_empty() && clauses.iter().all(|c| c.verdict == VerdictKind::Assumed);
        let (verdict, witness, locus, note) = if all_assumed {
            let notes: Vec<String> = clauses.iter().filter_map(|c| c.note.clone()).collect();
            (VerdictKind::Assumed, vec![], vec![], Some(notes.join("; ")))
        } else if let [only] = rep.clauses.as_slice() {
            split(&only.verdict)
        } else {
            split(&rep.overall())
        };
        CheckResult { index, check: check.to_string(), verdict, witness, locus, note, millis, clauses, oracle: None }
    }

    pub fn error(index: usize, check: &str, message: String, millis: u64) -> Self {
        CheckResult {
            index,
            check: check.to_string(),
            verdict: VerdictKind::Error,
            witness: vec![],
            locus: vec![],
            note: Some(message),
            millis,
            clauses: vec![],
            oracle: None,
        }
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

impl Report {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for r in &self.checks {
            match r.verdict {
                VerdictKind::Pass => c.pass += 1,
                VerdictKind::GenericPass => c.generic_pass += 1,
                VerdictKind::Fail => c.fail += 1,
                VerdictKind::Assumed => c.assumed += 1,
                VerdictKind::Error => c.error += 1,
            }
        }
        c
    }

    /// 0 when everything passed, 1 on a failure, 2 on an error.
    pub fn exit_code(&self) -> i32 {
        let c = self.counts();
        if c.error > 0 {
            2
        } else if c.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn check(&self, text: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(rep: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => emit_text(rep),
    }
}

pub fn parse_json_report(s: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(s)
}

fn tag(v: VerdictKind) -> &'static str {
    match v {
        VerdictKind::Pass => "PASS",
        VerdictKind::GenericPass => "GENERIC-PASS",
        VerdictKind::Fail => "FAIL",
        VerdictKind::Assumed => "ASSUMED",
        VerdictKind::Error => "ERROR",
    }
}

fn details(out: &mut String, indent: &str, witness: &[String], locus: &[String], note: &Option<String>) {
    for w in witness {
        let _ = writeln!(out, "{indent}witness: {w}");
    }
    if !locus.is_empty() {
        let _ = writeln!(out, "{indent}degeneracy locus: {}", locus.join("; "));
    }
    if let Some(n) = note {
        let _ = writeln!(out, "{indent}note: {n}");
    }
}

fn emit_text(rep: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} (seed {}, sample {})", rep.scenario, rep.seed, rep.sample);
    for c in &rep.checks {
        let _ = write!(out, "{}  {}", tag(c.verdict), c.check);
        if c.millis > 0 {
            let _ = write!(out, "  ({} ms)", c.millis);
        }
        out.push('\n');
        let single = c.clauses.len() == 1 && c.clauses[0].name == c.check;
        if single || c.clauses.is_empty() {
            details(&mut out, "    ", &c.witness, &c.locus, &c.note);
        } else {
            if c.verdict == VerdictKind::GenericPass && !c.locus.is_empty() && c.clauses.len() > 1 {
                let _ = writeln!(out, "    degeneracy locus: {}", c.locus.join("; "));
            }
            if c.verdict == VerdictKind::Error {
                details(&mut out, "    ", &[], &[], &c.note);
            }
            for cl in &c.clauses {
                let _ = writeln!(out, "    {:<12}  {}", cl.verdict.label(), cl.name);
                details(&mut out, "        ", &cl.witness, &cl.locus, &cl.note);
            }
        }
        if let Some(o) = &c.oracle {
            let _ = write!(out, "    oracle: {}/{} points agree", o.agreed, o.points);
            if o.skipped > 0 {
                let _ = write!(out, ", {} degenerate", o.skipped);
            }
            out.push('\n');
            if let Some(d) = &o.disagreement {
                let _ = writeln!(out, "    oracle disagreement: {d}");
            }
        }
    }
    let n = rep.counts();
    let _ = writeln!(
        out,
        "{} checks: {} pass, {} generic-pass, {} assumed, {} fail, {} error",
        rep.checks.len(),
        n.pass,
        n.generic_pass,
        n.assumed,
        n.fail,
        n.error
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(check: &str, clauses: Vec<(&str, Verdict)>) -> CheckResult {
        let mut rep = CheckReport::new();
        for (n, v) in clauses {
            rep.push(n, v);
        }
        CheckResult::from_report(0, check, &rep, 0)
    }

    fn report(checks: Vec<CheckResult>) -> Report {
        Report { scenario: "t".into(), seed: 0, sample: 0, checks }
    }

    #[test]
    fn single_pass_line() {
        let r = report(vec![result("nijenhuis_torsion(N) = 0", vec![("nijenhuis_torsion(N) = 0", Verdict::Pass)])]);
        let text = emit_report(&r, Format::Text);
        assert!(text.lines().any(|l| l == "PASS  nijenhuis_torsion(N) = 0"), "{text}");
    }

    #[test]
    fn generic_pass_shows_locus() {
        let r = report(vec![result("k", vec![("k", Verdict::generic(vec!["det = x".into()]))])]);
        let text = emit_report(&r, Format::Text);
        assert!(text.contains("GENERIC-PASS  k"));
        assert!(text.contains("degeneracy locus: det = x"), "{text}");
    }

    #[test]
    fn generic_pass_is_not_coerced() {
        let c = result("k", vec![("a", Verdict::Pass), ("b", Verdict::generic(vec![]))]);
        assert_eq!(c.verdict, VerdictKind::GenericPass);
    }

    #[test]
    fn all_assumed_stays_assumed() {
        let c = result("k", vec![("a", Verdict::assumed("global")), ("b", Verdict::assumed("global"))]);
        assert_eq!(c.verdict, VerdictKind::Assumed);
        let mixed = result("k", vec![("a", Verdict::assumed("global")), ("b", Verdict::Pass)]);
        assert_eq!(mixed.verdict, VerdictKind::Pass);
    }

    #[test]
    fn exit_codes() {
        let pass = result("a", vec![("a", Verdict::Pass)]);
        let fail = result("b", vec![("b", Verdict::fail("w"))]);
        let err = CheckResult::error(2, "c", "boom".into(), 0);
        assert_eq!(report(vec![]).exit_code(), 0);
        assert_eq!(report(vec![pass.clone()]).exit_code(), 0);
        assert_eq!(report(vec![pass.clone(), fail.clone()]).exit_code(), 1);
        assert_eq!(report(vec![pass, fail, err]).exit_code(), 2);
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let mut c = result("b", vec![("x", Verdict::fail("T = y - x")), ("y", Verdict::Pass)]);
        c.oracle = Some(OracleResult { points: 4, agreed: 3, skipped: 1, disagreement: None });
        let r = report(vec![c, result("a", vec![("a", Verdict::generic(vec!["det = x".into()]))])]);
        let json = emit_report(&r, Format::Json);
        for key in ["\"verdict\"", "\"check\"", "\"witness\"", "\"locus\"", "\"millis\"", "\"generic-pass\""] {
            assert!(json.contains(key), "missing {key}");
        }
        assert_eq!(parse_json_report(&json).unwrap(), r);
    }
}
