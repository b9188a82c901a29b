//! Forward reasoning over a language definition.
//!
//! [`saturate`] accumulates every assertion the base rules derive, starting
//! from a precondition: first over the grammar, then in repeated passes over
//! the inference system until nothing new appears. [`prove`] projects a goal
//! out of the saturated set and packages the work as a derivation tree, or
//! explains which goal atoms are missing.

mod check;
mod tree;

use std::borrow::Cow;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::assertion::{atoms_of, Assertion, Atom, SignedAtom, Subject};
use crate::grammar::CategoryIndex;
use crate::rules::{
    try_contra_respecting, try_contravariant, try_ctx_compliant, try_effectful, try_effectual_args, try_error_handler,
    try_inductive, AtomSet, BaseRule, Justification, RuleOutcome,
};
use crate::syntax::{top_constructor, InferenceRule, LanguageDef, RuleKind};
use crate::{Error, Result};

pub use check::{check_derivation, check_derivation_detailed, CheckError};
pub use tree::{render_tree_text, ProofNode, ProofRule};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProverConfig {
    /// Upper bound on passes over the inference system; defaults to the
    /// number of inference rules plus one.
    pub max_passes: Option<usize>,
    /// Replaces the `%ineffectual` directive of the language.
    pub ineffectual: Option<BTreeSet<String>>,
}

impl ProverConfig {
    /// The language as the prover sees it, with the ineffectual override
    /// applied. Derivation trees are checked against this language.
    pub fn effective_language<'a>(&self, lang: &'a LanguageDef) -> Result<Cow<'a, LanguageDef>> {
        match &self.ineffectual {
            None => Ok(Cow::Borrowed(lang)),
            Some(set) => {
                let declared = lang.metavars();
                if let Some(bad) = set.iter().find(|mv| !declared.contains(mv.as_str())) {
                    return Err(Error::Config(format!("`{bad}` is not a declared metavariable")));
                }
                let mut copy = lang.clone();
                copy.ineffectual = set.clone();
                Ok(Cow::Owned(copy))
            }
        }
    }

    fn passes(&self, lang: &LanguageDef) -> Result<usize> {
        match self.max_passes {
            Some(0) => Err(Error::Config("max passes must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(lang.rules.len() + 1),
        }
    }
}

/// Subtyping rules first, everything else after, both in original order.
pub fn order_rules(rules: &[InferenceRule]) -> Vec<&InferenceRule> {
    let (sub, rest): (Vec<&InferenceRule>, Vec<&InferenceRule>) =
        rules.iter().partition(|r| r.kind() == RuleKind::Subtyping);
    sub.into_iter().chain(rest).collect()
}

/// An application of a base rule that added a new atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub atom: Atom,
    pub justification: Justification,
}

/// New atoms contributed by one component during one sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentRun {
    pub name: String,
    pub applications: Vec<Application>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub subject: Subject,
    pub outcome: RuleOutcome,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub initial: AtomSet,
    /// One run per grammar rule, in grammar order.
    pub grammar: Vec<ComponentRun>,
    /// Rule names in analysis order.
    pub rule_order: Vec<String>,
    /// Every pass performed, the last one possibly unproductive.
    pub passes: Vec<Vec<ComponentRun>>,
    pub atoms: AtomSet,
    pub trace: Vec<TraceEntry>,
}

impl Saturation {
    /// Passes that added at least one atom.
    pub fn productive_passes(&self) -> impl Iterator<Item = &Vec<ComponentRun>> {
        self.passes
            .iter()
            .filter(|p| p.iter().any(|run| !run.applications.is_empty()))
    }

    /// The saturated set as a flat conjunction in sorted order.
    pub fn assertion(&self) -> Assertion {
        Assertion::from_signed(&self.atoms)
    }
}

/// Constructors analyzed for a grammar rule: its own top constructors, and
/// for context categories every constructor of the language.
pub(crate) fn grammar_constructors<'a>(lang: &'a LanguageDef, idx: &CategoryIndex, category: &str) -> Vec<&'a str> {
    let Some(g) = lang.grammar_rule(category) else {
        return Vec::new();
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in g.productions.iter().filter_map(top_constructor) {
        if seen.insert(c) {
            out.push(c);
        }
    }
    let is_context = [idx.eval_ctx(), idx.error_ctx()]
        .into_iter()
        .flatten()
        .any(|ctx| ctx.category == category);
    if is_context {
        for c in lang.constructors() {
            if seen.insert(c) {
                out.push(c);
            }
        }
    }
    out
}

/// Constructors with a contravariance atom in `p`, sorted.
fn contravariant_constructors(p: &AtomSet) -> Vec<String> {
    let set: BTreeSet<&str> = p
        .iter()
        .filter(|s| !s.negated)
        .filter_map(|s| match &s.atom {
            Atom::Contravariant { constructor, .. } => Some(constructor.as_str()),
            _ => None,
        })
        .collect();
    set.into_iter().map(str::to_string).collect()
}

/// Every base rule outcome for an inference rule against `p`, in the fixed
/// order, each computed on the atoms accumulated so far.
fn run_inference_rule(
    r: &InferenceRule,
    idx: &CategoryIndex,
    ineffectual: &BTreeSet<String>,
    atoms: &mut AtomSet,
    trace: &mut Vec<TraceEntry>,
) -> Vec<Application> {
    let mut applications = Vec::new();
    let mut record = |outcome: RuleOutcome, atoms: &mut AtomSet| {
        if let RuleOutcome::Derived { atom, justification } = &outcome {
            if atoms.insert(SignedAtom::positive(atom.clone())) {
                applications.push(Application {
                    atom: atom.clone(),
                    justification: justification.clone(),
                });
            }
        }
        trace.push(TraceEntry {
            subject: Subject::InfRule(r.name.clone()),
            outcome,
        });
    };
    let o = try_ctx_compliant(atoms, r, idx);
    record(o, atoms);
    let o = try_error_handler(atoms, r, idx);
    record(o, atoms);
    let o = try_effectful(r);
    record(o, atoms);
    let o = try_effectual_args(atoms, r, idx, ineffectual);
    record(o, atoms);
    let o = try_contravariant(r);
    record(o, atoms);
    for c in contravariant_constructors(atoms) {
        let o = try_contra_respecting(atoms, r, &c);
        record(o, atoms);
    }
    applications
}

pub fn saturate(lang: &LanguageDef, pre: &Assertion, cfg: &ProverConfig) -> Result<Saturation> {
    saturate_until(lang, pre, cfg, None)
}

/// Saturation that also stops after the first pass whose result entails `goal`.
fn saturate_until(
    lang: &LanguageDef,
    pre: &Assertion,
    cfg: &ProverConfig,
    goal: Option<&AtomSet>,
) -> Result<Saturation> {
    let initial = atoms_of(pre)?;
    let lang = cfg.effective_language(lang)?;
    let max_passes = cfg.passes(&lang)?;
    let idx = CategoryIndex::for_language(&lang);
    let mut atoms = initial.clone();
    let mut trace = Vec::new();

    let mut grammar = Vec::new();
    for g in &lang.grammar {
        let mut applications = Vec::new();
        for c in grammar_constructors(&lang, &idx, &g.category) {
            let outcome = try_inductive(&idx, g, c);
            if let RuleOutcome::Derived { atom, justification } = &outcome {
                if atoms.insert(SignedAtom::positive(atom.clone())) {
                    applications.push(Application {
                        atom: atom.clone(),
                        justification: justification.clone(),
                    });
                }
            }
            trace.push(TraceEntry {
                subject: Subject::GrammarRule(g.category.clone()),
                outcome,
            });
        }
        grammar.push(ComponentRun {
            name: g.category.clone(),
            applications,
        });
    }

    let ordered = order_rules(&lang.rules);
    let mut passes = Vec::new();
    for _ in 0..max_passes {
        let pass: Vec<ComponentRun> = ordered
            .iter()
            .map(|r| ComponentRun {
                name: r.name.clone(),
                applications: run_inference_rule(r, &idx, &lang.ineffectual, &mut atoms, &mut trace),
            })
            .collect();
        let productive = pass.iter().any(|run| !run.applications.is_empty());
        passes.push(pass);
        if !productive || goal.is_some_and(|g| g.is_subset(&atoms)) {
            break;
        }
    }

    Ok(Saturation {
        initial,
        grammar,
        rule_order: ordered.iter().map(|r| r.name.clone()).collect(),
        passes,
        atoms,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestMiss {
    pub at: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub missing: Vec<SignedAtom>,
    pub nearest_misses: Vec<NearestMiss>,
}

impl std::fmt::Display for FailureReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "no proof found")?;
        writeln!(f, "missing:")?;
        for a in &self.missing {
            writeln!(f, "  {a}")?;
        }
        if !self.nearest_misses.is_empty() {
            writeln!(f, "nearest misses:")?;
            for m in &self.nearest_misses {
                writeln!(f, "  {}: {}", m.at, m.reason)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum ProofResult {
    Proved(ProofNode),
    NoProof(FailureReport),
}

pub fn prove(lang: &LanguageDef, pre: &Assertion, goal: &Assertion, cfg: &ProverConfig) -> Result<ProofResult> {
    let want = atoms_of(goal)?;
    let have = atoms_of(pre)?;
    let effective = cfg.effective_language(lang)?;
    if want.is_subset(&have) {
        return Ok(ProofResult::Proved(tree::trivial(&effective, pre, goal)));
    }
    let sat = saturate_until(lang, pre, cfg, Some(&want))?;
    if want.is_subset(&sat.atoms) {
        return Ok(ProofResult::Proved(tree::build(&effective, &sat, pre, goal)));
    }
    let missing: Vec<SignedAtom> = want.difference(&sat.atoms).cloned().collect();
    let nearest_misses = nearest_misses(&effective, &sat.atoms, &missing);
    Ok(ProofResult::NoProof(FailureReport {
        missing,
        nearest_misses,
    }))
}

fn explain(at: String, outcome: RuleOutcome, want: &Atom) -> NearestMiss {
    let reason = match outcome {
        RuleOutcome::NotApplicable(m) => m.to_string(),
        RuleOutcome::Derived { atom, .. } if atom == *want => {
            format!("{atom} is derivable but was not reached within the pass limit")
        }
        RuleOutcome::Derived { atom, .. } => format!("derives {atom} instead"),
    };
    NearestMiss { at, reason }
}

/// Re-runs the base rules that could conclude each missing atom against the
/// saturated set, for the components the atom names.
pub(crate) fn nearest_misses(lang: &LanguageDef, sat: &AtomSet, missing: &[SignedAtom]) -> Vec<NearestMiss> {
    let idx = CategoryIndex::for_language(lang);
    let mut out = Vec::new();
    let at_rule = |r: &InferenceRule, b: BaseRule| format!("[{}] ({b})", r.name);
    let unknown_rule = |name: &str| NearestMiss {
        at: format!("[{name}]"),
        reason: format!("the language has no rule named [{name}]"),
    };
    let reductions_on = |c: &str| -> Vec<&InferenceRule> {
        lang.rules
            .iter()
            .filter(|r| r.step().is_some_and(|(s, _)| top_constructor(&s.subject) == Some(c)))
            .collect()
    };
    for s in missing {
        let want = &s.atom;
        if s.negated {
            out.push(NearestMiss {
                at: want.to_string(),
                reason: "no base rule concludes a negated assertion".into(),
            });
            continue;
        }
        let before = out.len();
        match want {
            Atom::Ctx {
                metavar, constructor, ..
            } => match lang.grammar.iter().find(|g| &g.metavar == metavar) {
                Some(g) => out.push(explain(
                    format!("{} ({})", g.category, BaseRule::Inductive),
                    try_inductive(&idx, g, constructor),
                    want,
                )),
                None => out.push(NearestMiss {
                    at: metavar.clone(),
                    reason: format!("{metavar} is not the metavariable of any category"),
                }),
            },
            Atom::CtxCompliant { rule } => match lang.rule(rule) {
                Some(r) => out.push(explain(
                    at_rule(r, BaseRule::CtxCompliant),
                    try_ctx_compliant(sat, r, &idx),
                    want,
                )),
                None => out.push(unknown_rule(rule)),
            },
            Atom::ErrorHandler { constructor, .. } => {
                for r in reductions_on(constructor) {
                    let compliant = Atom::CtxCompliant { rule: r.name.clone() };
                    if !sat.contains(&SignedAtom::positive(compliant.clone())) {
                        out.push(explain(
                            at_rule(r, BaseRule::CtxCompliant),
                            try_ctx_compliant(sat, r, &idx),
                            &compliant,
                        ));
                    }
                    out.push(explain(
                        at_rule(r, BaseRule::ErrorHandler),
                        try_error_handler(sat, r, &idx),
                        want,
                    ));
                }
            }
            Atom::Effectful { .. } => {
                for r in lang.rules.iter().filter(|r| r.kind() == RuleKind::Reduction) {
                    out.push(explain(at_rule(r, BaseRule::Effectful), try_effectful(r), want));
                }
            }
            Atom::NoDupliEf { rule } => match lang.rule(rule) {
                Some(r) => out.push(explain(
                    at_rule(r, BaseRule::EffectualArgs),
                    try_effectual_args(sat, r, &idx, &lang.ineffectual),
                    want,
                )),
                None => out.push(unknown_rule(rule)),
            },
            Atom::Contravariant { constructor, .. } => {
                for r in lang.rules.iter().filter(|r| {
                    matches!(&r.conclusion, crate::syntax::Formula::Subtype { lhs, .. }
                        if top_constructor(lhs) == Some(constructor.as_str()))
                }) {
                    out.push(explain(at_rule(r, BaseRule::Contravariant), try_contravariant(r), want));
                }
            }
            Atom::ContraResp { rule, constructor } => match lang.rule(rule) {
                Some(r) => out.push(explain(
                    at_rule(r, BaseRule::ContraRespecting),
                    try_contra_respecting(sat, r, constructor),
                    want,
                )),
                None => out.push(unknown_rule(rule)),
            },
        }
        if out.len() == before {
            out.push(NearestMiss {
                at: want.to_string(),
                reason: "no component of the language mentions this constructor".into(),
            });
        }
    }
    out
}
