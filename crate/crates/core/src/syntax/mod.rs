//! Abstract syntax of language definitions.
//!
//! A language definition is a grammar (ordered grammar rules) together with
//! an inference system (ordered, named inference rules). Terms, formulae and
//! rules are kept in abstract-syntax form; the surface `.lan` notation lives
//! in [`parser`] and [`render`].

mod lexer;
pub mod parser;
pub mod render;
pub mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use parser::{parse_language, parse_language_unchecked, ParseError};
pub use render::render_language;
pub use validate::{validate_language, Finding, ValidationReport};

/// Constructor used for typing-environment extension `Gamma, x : T`.
pub const ENV_EXTEND: &str = "extend";

/// Abstract-syntax term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Metavariable occurrence such as `e`, `e2` or `T'`.
    Meta(String),
    /// Constructor application `(c t1 ... tn)`; nullary when `args` is empty.
    Con(String, Vec<Term>),
    /// Unary binder `(x)t`.
    Bind(String, Box<Term>),
    /// Capture-avoiding substitution `body[replacement/var]`.
    Subst {
        body: Box<Term>,
        replacement: Box<Term>,
        var: String,
    },
    /// Context hole `[]`.
    Hole,
    /// String constant.
    Str(String),
}

impl Term {
    pub fn meta(name: impl Into<String>) -> Self {
        Term::Meta(name.into())
    }

    pub fn con(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Con(name.into(), args)
    }

    pub fn atom(name: impl Into<String>) -> Self {
        Term::Con(name.into(), Vec::new())
    }

    pub fn bind(var: impl Into<String>, body: Term) -> Self {
        Term::Bind(var.into(), Box::new(body))
    }

    pub fn subst(body: Term, replacement: Term, var: impl Into<String>) -> Self {
        Term::Subst {
            body: Box::new(body),
            replacement: Box::new(replacement),
            var: var.into(),
        }
    }

    /// Direct subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Meta(_) | Term::Hole | Term::Str(_) => Vec::new(),
            Term::Con(_, args) => args.iter().collect(),
            Term::Bind(_, body) => vec![body.as_ref()],
            Term::Subst { body, replacement, .. } => vec![body.as_ref(), replacement.as_ref()],
        }
    }

    /// Pre-order walk over every subterm position, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

/// Structural equality. Bound variable names are compared literally.
pub fn term_equal(a: &Term, b: &Term) -> bool {
    a == b
}

/// Number of subterm positions of `haystack` structurally equal to `needle`.
pub fn count_occurrences(haystack: &Term, needle: &Term) -> usize {
    let mut count = 0;
    haystack.walk(&mut |t| {
        if t == needle {
            count += 1;
        }
    });
    count
}

/// Whether some substitution node inside `haystack` has a replacement that
/// contains `needle`.
pub fn contains_subst_involving(haystack: &Term, needle: &Term) -> bool {
    let mut found = false;
    haystack.walk(&mut |t| {
        if let Term::Subst { replacement, .. } = t {
            if count_occurrences(replacement, needle) > 0 {
                found = true;
            }
        }
    });
    found
}

/// Top-level constructor of a constructor application.
pub fn top_constructor(t: &Term) -> Option<&str> {
    match t {
        Term::Con(c, _) => Some(c),
        _ => None,
    }
}

/// A reduction configuration `subject, s1, ..., sm`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub subject: Term,
    pub state: Vec<Term>,
}

impl Config {
    pub fn new(subject: Term, state: Vec<Term>) -> Self {
        Config { subject, state }
    }
}

/// A formula. Typing, subtyping and reduction carry reserved meaning; every
/// other predicate is opaque.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `env |- subject : ty`
    Typing { env: Term, subject: Term, ty: Term },
    /// `lhs <: rhs`
    Subtype { lhs: Term, rhs: Term },
    /// `source --> target`
    Step { source: Config, target: Config },
    /// `(pred t1 ... tn)`
    Pred { name: String, args: Vec<Term> },
}

impl Formula {
    pub fn pred_name(&self) -> &str {
        match self {
            Formula::Typing { .. } => "typing",
            Formula::Subtype { .. } => "subtype",
            Formula::Step { .. } => "step",
            Formula::Pred { name, .. } => name,
        }
    }

    /// Every term position of the formula, in surface order.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Formula::Typing { env, subject, ty } => vec![env, subject, ty],
            Formula::Subtype { lhs, rhs } => vec![lhs, rhs],
            Formula::Step { source, target } => std::iter::once(&source.subject)
                .chain(source.state.iter())
                .chain(std::iter::once(&target.subject))
                .chain(target.state.iter())
                .collect(),
            Formula::Pred { args, .. } => args.iter().collect(),
        }
    }
}

/// `cname X ::= t1 | ... | tn`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarRule {
    pub category: String,
    pub metavar: String,
    pub productions: Vec<Term>,
}

/// A named inference rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceRule {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Typing,
    Subtyping,
    Reduction,
    Other,
}

/// Classifies a rule by the predicate of its conclusion.
pub fn classify_rule(r: &InferenceRule) -> RuleKind {
    match r.conclusion {
        Formula::Typing { .. } => RuleKind::Typing,
        Formula::Subtype { .. } => RuleKind::Subtyping,
        Formula::Step { .. } => RuleKind::Reduction,
        Formula::Pred { .. } => RuleKind::Other,
    }
}

impl InferenceRule {
    pub fn kind(&self) -> RuleKind {
        classify_rule(self)
    }

    /// Source and target configurations of a reduction rule.
    pub fn step(&self) -> Option<(&Config, &Config)> {
        match &self.conclusion {
            Formula::Step { source, target } => Some((source, target)),
            _ => None,
        }
    }
}

/// A language definition `(G, I)` plus the designer-declared ineffectual
/// metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LanguageDef {
    pub grammar: Vec<GrammarRule>,
    pub rules: Vec<InferenceRule>,
    pub ineffectual: BTreeSet<String>,
}

impl LanguageDef {
    pub fn grammar_rule(&self, category: &str) -> Option<&GrammarRule> {
        self.grammar.iter().find(|g| g.category == category)
    }

    pub fn rule(&self, name: &str) -> Option<&InferenceRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn metavars(&self) -> BTreeSet<&str> {
        self.grammar.iter().map(|g| g.metavar.as_str()).collect()
    }

    /// Every term occurring in the grammar or in any rule.
    pub fn all_terms(&self) -> impl Iterator<Item = &Term> {
        self.grammar
            .iter()
            .flat_map(|g| g.productions.iter())
            .chain(self.rules.iter().flat_map(|r| {
                r.premises
                    .iter()
                    .chain(std::iter::once(&r.conclusion))
                    .flat_map(|f| f.terms())
            }))
    }

    /// Constructor names in order of first appearance.
    pub fn constructors(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in self.all_terms() {
            t.walk(&mut |s| {
                if let Term::Con(c, _) = s {
                    if seen.insert(c.as_str()) {
                        out.push(c.as_str());
                    }
                }
            });
        }
        out
    }
}

/// Characters allowed to trail a metavariable spelling.
fn is_suffix_char(c: char) -> bool {
    c.is_ascii_digit() || c == '\''
}

/// Resolves an occurrence spelling against a set of declared metavariables.
///
/// Trailing digits and primes are stripped one at a time; the longest
/// declared spelling wins.
pub fn resolve_name<F>(occurrence: &str, is_declared: F) -> Option<&str>
where
    F: Fn(&str) -> bool,
{
    let mut candidate = occurrence;
    loop {
        if !candidate.is_empty() && is_declared(candidate) {
            return Some(candidate);
        }
        match candidate.chars().last() {
            Some(c) if is_suffix_char(c) => candidate = &candidate[..candidate.len() - c.len_utf8()],
            _ => return None,
        }
    }
}

/// Whether a spelling carries a digit or prime suffix.
pub fn has_metavar_suffix(name: &str) -> bool {
    name.chars().last().is_some_and(is_suffix_char) && name.len() > 1
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("expected a constructor application, found `{0}`")]
pub struct NotAConApp(pub String);

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_term(self, None))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_formula(self, None))
    }
}
