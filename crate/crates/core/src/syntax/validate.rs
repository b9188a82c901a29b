use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{resolve_name, Formula, LanguageDef, Term};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Finding {
    DuplicateMetavar(String),
    DuplicateCategory(String),
    DuplicateRuleName(String),
    ArityMismatch {
        constructor: String,
        expected: usize,
        found: usize,
    },
    StateArityMismatch {
        rule: String,
        expected: usize,
        found: usize,
    },
    UnknownMetavar {
        occurrence: String,
        location: String,
    },
    UnknownIneffectual(String),
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DuplicateMetavar(mv) => write!(f, "duplicate metavariable {mv}"),
            Finding::DuplicateCategory(c) => write!(f, "duplicate category {c}"),
            Finding::DuplicateRuleName(r) => write!(f, "duplicate rule name [{r}]"),
            Finding::ArityMismatch {
                constructor,
                expected,
                found,
            } => write!(
                f,
                "arity mismatch for {constructor}: used with {expected} and {found} arguments"
            ),
            Finding::StateArityMismatch { rule, expected, found } => write!(
                f,
                "state arity mismatch in [{rule}]: expected {expected} state components, found {found}"
            ),
            Finding::UnknownMetavar { occurrence, location } => {
                write!(f, "unknown metavariable {occurrence} in {location}")
            }
            Finding::UnknownIneffectual(mv) => {
                write!(f, "%ineffectual names {mv}, which is not a declared metavariable")
            }
        }
    }
}

/// Findings from [`validate_language`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{finding}")?;
        }
        Ok(())
    }
}

pub fn validate_language(lang: &LanguageDef) -> ValidationReport {
    let mut findings = Vec::new();

    let mut metavars = BTreeSet::new();
    let mut categories = BTreeSet::new();
    for g in &lang.grammar {
        if !metavars.insert(g.metavar.as_str()) {
            findings.push(Finding::DuplicateMetavar(g.metavar.clone()));
        }
        if !categories.insert(g.category.as_str()) {
            findings.push(Finding::DuplicateCategory(g.category.clone()));
        }
    }
    let mut names = BTreeSet::new();
    for r in &lang.rules {
        if !names.insert(r.name.as_str()) {
            findings.push(Finding::DuplicateRuleName(r.name.clone()));
        }
    }

    // constructor arities, first use wins
    let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for t in lang.all_terms() {
        t.walk(&mut |s| {
            if let Term::Con(c, args) = s {
                let expected = *arities.entry(c.as_str()).or_insert(args.len());
                if expected != args.len() && reported.insert(c.as_str()) {
                    findings.push(Finding::ArityMismatch {
                        constructor: c.clone(),
                        expected,
                        found: args.len(),
                    });
                }
            }
        });
    }

    // state arity, fixed by the first reduction rule
    let mut state_arity: Option<usize> = None;
    for r in &lang.rules {
        for f in std::iter::once(&r.conclusion).chain(r.premises.iter()) {
            if let Formula::Step { source, target } = f {
                for n in [source.state.len(), target.state.len()] {
                    let expected = *state_arity.get_or_insert(n);
                    if n != expected {
                        findings.push(Finding::StateArityMismatch {
                            rule: r.name.clone(),
                            expected,
                            found: n,
                        });
                    }
                }
            }
        }
    }

    let mut unresolved = BTreeSet::new();
    let mut check = |t: &Term, location: String, findings: &mut Vec<Finding>| {
        t.walk(&mut |s| {
            if let Term::Meta(occ) = s {
                if resolve_name(occ, |n| metavars.contains(n)).is_none()
                    && unresolved.insert((occ.clone(), location.clone()))
                {
                    findings.push(Finding::UnknownMetavar {
                        occurrence: occ.clone(),
                        location: location.clone(),
                    });
                }
            }
        });
    };
    for g in &lang.grammar {
        for p in &g.productions {
            check(p, format!("category {}", g.category), &mut findings);
        }
    }
    for r in &lang.rules {
        for f in std::iter::once(&r.conclusion).chain(r.premises.iter()) {
            for t in f.terms() {
                check(t, format!("rule [{}]", r.name), &mut findings);
            }
        }
    }

    for mv in &lang.ineffectual {
        if !metavars.contains(mv.as_str()) {
            findings.push(Finding::UnknownIneffectual(mv.clone()));
        }
    }

    ValidationReport { findings }
}
