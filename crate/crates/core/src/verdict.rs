//! Outcomes of checks.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Holds wherever the listed loci do not vanish.
    GenericPass { locus: Vec<String> },
    Fail { witness: Vec<String> },
    /// Hypothesis the engine cannot decide.
    Assumed { note: String },
    Error { message: String },
}

impl Verdict {
    pub fn fail(w: impl Into<String>) -> Verdict {
        Verdict::Fail { witness: vec![w.into()] }
    }

    pub fn error(m: impl Into<String>) -> Verdict {
        Verdict::Error { message: m.into() }
    }

    pub fn assumed(n: impl Into<String>) -> Verdict {
        Verdict::Assumed { note: n.into() }
    }

    pub fn generic(locus: Vec<String>) -> Verdict {
        Verdict::GenericPass { locus }
    }

    /// Pass unless the witness list is non-empty.
    pub fn from_witnesses(witness: Vec<String>) -> Verdict {
        if witness.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail { witness }
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::GenericPass { .. } | Verdict::Assumed { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::GenericPass { .. } => "generic-pass",
            Verdict::Fail { .. } => "fail",
            Verdict::Assumed { .. } => "assumed",
            Verdict::Error { .. } => "error",
        }
    }

    fn severity(&self) -> u8 {
        match self {
            Verdict::Assumed { .. } => 0,
            Verdict::Pass => 1,
            Verdict::GenericPass { .. } => 2,
            Verdict::Fail { .. } => 3,
            Verdict::Error { .. } => 4,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::GenericPass { locus } if locus.is_empty() => write!(f, "generic-pass"),
            Verdict::GenericPass { locus } => {
                write!(f, "generic-pass (degeneracy locus: {})", locus.join("; "))
            }
            Verdict::Fail { witness } => write!(f, "fail ({})", witness.join("; ")),
            Verdict::Assumed { note } => write!(f, "assumed ({note})"),
            Verdict::Error { message } => write!(f, "error ({message})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub verdict: Verdict,
}

/// Clause-by-clause result of a compound check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub clauses: Vec<Clause>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, verdict: Verdict) {
        self.clauses.push(Clause { name: name.into(), verdict });
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: CheckReport) {
        for c in other.clauses {
            self.clauses.push(Clause { name: format!("{prefix}{}", c.name), verdict: c.verdict });
        }
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// True when no clause failed or errored.
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.verdict.is_ok())
    }

    pub fn first_failure(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.verdict.is_ok())
    }

    /// Worst clause verdict, with generic loci merged.
    pub fn overall(&self) -> Verdict {
        let worst = self
            .clauses
            .iter()
            .map(|c| &c.verdict)
            .max_by_key(|v| v.severity())
            .cloned()
            .unwrap_or(Verdict::Pass);
        match worst {
            Verdict::Assumed { .. } => Verdict::Pass,
            Verdict::GenericPass { .. } => {
                let mut locus: Vec<String> = Vec::new();
                for c in &self.clauses {
                    if let Verdict::GenericPass { locus: l } = &c.verdict {
                        for s in l {
                            if !locus.contains(s) {
                                locus.push(s.clone());
                            }
                        }
                    }
                }
                Verdict::GenericPass { locus }
            }
            Verdict::Fail { .. } => {
                let witness = self
                    .clauses
                    .iter()
                    .filter_map(|c| match &c.verdict {
                        Verdict::Fail { witness } => {
                            Some(format!("{}: {}", c.name, witness.join("; ")))
                        }
                        _ => None,
                    })
                    .collect();
                Verdict::Fail { witness }
            }
            v => v,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}: {}", c.name, c.verdict)?;
        }
        Ok(())
    }
}
