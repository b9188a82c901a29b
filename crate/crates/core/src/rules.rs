//! The base proof rules. Each check either derives one new atom, together
//! with the premise instances it discharged, or says why it does not apply.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assertion::{fmt_positions, Atom, SignedAtom};
use crate::grammar::CategoryIndex;
use crate::syntax::{
    contains_subst_involving, count_occurrences, term_equal, Formula, GrammarRule, InferenceRule, RuleKind, Term,
};

pub type AtomSet = BTreeSet<SignedAtom>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseRule {
    Inductive,
    CtxCompliant,
    ErrorHandler,
    Effectful,
    EffectualArgs,
    Contravariant,
    ContraRespecting,
}

impl BaseRule {
    pub const ALL: [BaseRule; 7] = [
        BaseRule::Inductive,
        BaseRule::CtxCompliant,
        BaseRule::ErrorHandler,
        BaseRule::Effectful,
        BaseRule::EffectualArgs,
        BaseRule::Contravariant,
        BaseRule::ContraRespecting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseRule::Inductive => "inductive",
            BaseRule::CtxCompliant => "ctx-compliant",
            BaseRule::ErrorHandler => "error-handler",
            BaseRule::Effectful => "effectful",
            BaseRule::EffectualArgs => "effectual-args",
            BaseRule::Contravariant => "contravariant",
            BaseRule::ContraRespecting => "contra-respecting",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for BaseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justification {
    pub rule: BaseRule,
    pub discharged: Vec<String>,
}

/// Why a base rule does not apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Miss {
    /// The inference rule does not have the shape the base rule is about.
    Shape(String),
    /// An assertion the base rule needs is not in the precondition.
    MissingPrecondition(String),
    /// A premise of the base rule is false for the given subterm.
    PremiseFails {
        position: Option<u32>,
        subterm: String,
        detail: String,
    },
    /// No argument of the reduced term is an error.
    NoErrorArgument(String),
}

impl fmt::Display for Miss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Miss::Shape(s) => write!(f, "not applicable: {s}"),
            Miss::MissingPrecondition(s) => write!(f, "missing precondition: {s}"),
            Miss::PremiseFails { detail, .. } => write!(f, "premise fails: {detail}"),
            Miss::NoErrorArgument(t) => write!(f, "no argument of {t} derives from the error category"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOutcome {
    Derived { atom: Atom, justification: Justification },
    NotApplicable(Miss),
}

impl RuleOutcome {
    fn derived(rule: BaseRule, atom: Atom, discharged: Vec<String>) -> Self {
        debug_assert!(!discharged.is_empty());
        RuleOutcome::Derived {
            atom,
            justification: Justification { rule, discharged },
        }
    }

    pub fn atom(&self) -> Option<&Atom> {
        match self {
            RuleOutcome::Derived { atom, .. } => Some(atom),
            RuleOutcome::NotApplicable(_) => None,
        }
    }

    pub fn miss(&self) -> Option<&Miss> {
        match self {
            RuleOutcome::Derived { .. } => None,
            RuleOutcome::NotApplicable(m) => Some(m),
        }
    }
}

fn shape(msg: impl Into<String>) -> RuleOutcome {
    RuleOutcome::NotApplicable(Miss::Shape(msg.into()))
}

fn missing(msg: impl Into<String>) -> RuleOutcome {
    RuleOutcome::NotApplicable(Miss::MissingPrecondition(msg.into()))
}

fn positive(p: &AtomSet) -> impl Iterator<Item = &Atom> {
    p.iter().filter(|s| !s.negated).map(|s| &s.atom)
}

/// Source arguments `(op t1..tn)` of a reduction rule.
fn reduction_source(r: &InferenceRule) -> Result<(&str, &[Term], &Term), RuleOutcome> {
    if r.kind() != RuleKind::Reduction {
        return Err(shape(format!("[{}] is not a reduction rule", r.name)));
    }
    let (source, target) = r.step().expect("reduction rule has a step conclusion");
    match &source.subject {
        Term::Con(op, args) if !args.is_empty() => Ok((op, args, &target.subject)),
        other => Err(shape(format!(
            "the source {other} of [{}] is not a constructor application",
            r.name
        ))),
    }
}

/// `ctx(X, c, I')` where `I'` collects the self-recursive positions of every
/// production of `g` with top constructor `c`.
pub fn try_inductive(idx: &CategoryIndex, g: &GrammarRule, c: &str) -> RuleOutcome {
    let positions = idx.inductive_positions(g, c);
    let mut discharged: Vec<String> = g
        .productions
        .iter()
        .filter(|p| crate::syntax::top_constructor(p) == Some(c))
        .map(|p| {
            let args = idx.get_args_positions(p, &g.metavar).unwrap_or_default();
            format!("{p}.getArgs({}) = {}", g.metavar, fmt_positions(&args))
        })
        .collect();
    if discharged.is_empty() {
        discharged.push(format!("no production of {} has constructor {c}", g.category));
    }
    discharged.push(format!("I' = {}", fmt_positions(&positions)));
    RuleOutcome::derived(BaseRule::Inductive, Atom::ctx(&g.metavar, c, positions), discharged)
}

/// Every reduced argument that is a value or an error sits at a position the
/// evaluation context reaches.
pub fn try_ctx_compliant(p: &AtomSet, r: &InferenceRule, idx: &CategoryIndex) -> RuleOutcome {
    let (op, args, _) = match reduction_source(r) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let Some(ectx) = idx.eval_ctx() else {
        return missing("the grammar declares no evaluation context category");
    };
    let ectx_mv = ectx.metavar.as_str();
    let candidates: Vec<&BTreeSet<u32>> = positive(p)
        .filter_map(|a| match a {
            Atom::Ctx {
                metavar,
                constructor,
                positions,
            } if metavar == ectx_mv && constructor == op => Some(positions),
            _ => None,
        })
        .collect();
    if candidates.is_empty() {
        return missing(format!("no ctx({ectx_mv}, {op}, _) in the precondition"));
    }
    let roles: Vec<&str> = [idx.value_metavar(), idx.error_metavar()]
        .into_iter()
        .flatten()
        .collect();
    let mut first_failure = None;
    for set in candidates {
        let mut discharged = vec![format!("ctx({ectx_mv}, {op}, {}) ∈ P", fmt_positions(set))];
        let mut failure = None;
        for (i, t) in args.iter().enumerate() {
            let pos = i as u32 + 1;
            let Some(mv) = roles.iter().find(|mv| idx.derives(mv, t)) else {
                continue;
            };
            if set.contains(&pos) {
                discharged.push(format!("{mv} ⇒*_G {t} implies {pos} ∈ {}", fmt_positions(set)));
            } else {
                failure = Some(Miss::PremiseFails {
                    position: Some(pos),
                    subterm: t.to_string(),
                    detail: format!(
                        "in [{}], {mv} ⇒*_G {t} but {pos} ∉ {}: no evaluation context reaches argument {pos} of {op}",
                        r.name,
                        fmt_positions(set)
                    ),
                });
                break;
            }
        }
        match failure {
            None => {
                if discharged.len() == 1 {
                    discharged.push(format!("no argument of {op} derives from a value or an error"));
                }
                return RuleOutcome::derived(
                    BaseRule::CtxCompliant,
                    Atom::CtxCompliant { rule: r.name.clone() },
                    discharged,
                );
            }
            Some(m) => {
                first_failure.get_or_insert(m);
            }
        }
    }
    RuleOutcome::NotApplicable(first_failure.expect("at least one candidate was tried"))
}

/// A ctx-compliant rule that consumes an error at a position the error
/// context does not reach handles that error.
pub fn try_error_handler(p: &AtomSet, r: &InferenceRule, idx: &CategoryIndex) -> RuleOutcome {
    let (op, args, _) = match reduction_source(r) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let compliant = Atom::CtxCompliant { rule: r.name.clone() };
    if !positive(p).any(|a| *a == compliant) {
        return missing(format!("{compliant} is not in the precondition"));
    }
    let Some(fctx) = idx.error_ctx() else {
        return missing("the grammar declares no error context category");
    };
    let Some(err_mv) = idx.error_metavar() else {
        return missing("the grammar declares no error category");
    };
    let fctx_mv = fctx.metavar.as_str();
    let candidates: Vec<&BTreeSet<u32>> = positive(p)
        .filter_map(|a| match a {
            Atom::Ctx {
                metavar,
                constructor,
                positions,
            } if metavar == fctx_mv && constructor == op => Some(positions),
            _ => None,
        })
        .collect();
    if candidates.is_empty() {
        return missing(format!("no ctx({fctx_mv}, {op}, _) in the precondition"));
    }
    let errors: Vec<(u32, &Term)> = args
        .iter()
        .enumerate()
        .filter(|(_, t)| idx.derives(err_mv, t))
        .map(|(i, t)| (i as u32 + 1, t))
        .collect();
    if errors.is_empty() {
        let source = r.step().map(|(s, _)| s.subject.to_string()).unwrap_or_default();
        return RuleOutcome::NotApplicable(Miss::NoErrorArgument(source));
    }
    let mut first_failure = None;
    for set in candidates {
        match errors.iter().find(|(i, _)| !set.contains(i)) {
            Some(&(i, t)) => {
                return RuleOutcome::derived(
                    BaseRule::ErrorHandler,
                    Atom::ErrorHandler {
                        constructor: op.to_string(),
                        position: i,
                    },
                    vec![
                        format!("{compliant} ∈ P"),
                        format!("ctx({fctx_mv}, {op}, {}) ∈ P", fmt_positions(set)),
                        format!("{err_mv} ⇒*_G {t} at position {i}"),
                        format!("{i} ∉ {}", fmt_positions(set)),
                    ],
                );
            }
            None => {
                let (i, t) = errors[0];
                first_failure.get_or_insert(Miss::PremiseFails {
                    position: Some(i),
                    subterm: t.to_string(),
                    detail: format!(
                        "in [{}], {err_mv} ⇒*_G {t} but {i} ∈ {}: the error context {fctx_mv} propagates the error before {op} can handle it",
                        r.name,
                        fmt_positions(set)
                    ),
                });
            }
        }
    }
    RuleOutcome::NotApplicable(first_failure.expect("at least one candidate was tried"))
}

/// A reduction rule that changes some state component is effectful there.
pub fn try_effectful(r: &InferenceRule) -> RuleOutcome {
    let Some((source, target)) = r.step() else {
        return shape(format!("[{}] is not a reduction rule", r.name));
    };
    for (i, (s, s2)) in source.state.iter().zip(&target.state).enumerate() {
        if !term_equal(s, s2) {
            let pos = i as u32 + 1;
            return RuleOutcome::derived(
                BaseRule::Effectful,
                Atom::Effectful { state_position: pos },
                vec![format!("{s} ≠ {s2} at state position {pos}")],
            );
        }
    }
    if source.state.is_empty() {
        shape(format!("[{}] has no state", r.name))
    } else {
        RuleOutcome::NotApplicable(Miss::PremiseFails {
            position: None,
            subterm: String::new(),
            detail: format!("[{}] leaves every state component unchanged", r.name),
        })
    }
}

/// In an effectful language, a reduction rule must not duplicate an argument
/// that may still carry effects.
pub fn try_effectual_args(
    p: &AtomSet,
    r: &InferenceRule,
    idx: &CategoryIndex,
    ineffectual: &BTreeSet<String>,
) -> RuleOutcome {
    let (_, args, target) = match reduction_source(r) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let Some(effect) = positive(p).find(|a| matches!(a, Atom::Effectful { .. })) else {
        return missing("no effectful(_) in the precondition");
    };
    let mut discharged = vec![format!("{effect} ∈ P")];
    for t in args {
        if let Some(mv) = ineffectual.iter().find(|mv| idx.derives(mv, t)) {
            discharged.push(format!("{mv} ⇒*_G {t} with {mv} ∈ ineffectual"));
            continue;
        }
        let copies = count_occurrences(target, t);
        if copies > 1 {
            let many = vec![t.to_string(); copies].join(", ");
            return RuleOutcome::NotApplicable(Miss::PremiseFails {
                position: None,
                subterm: t.to_string(),
                detail: format!("in [{}], {target} is of the form C[{many}]: {t} is duplicated", r.name),
            });
        }
        if contains_subst_involving(target, t) {
            return RuleOutcome::NotApplicable(Miss::PremiseFails {
                position: None,
                subterm: t.to_string(),
                detail: format!(
                    "in [{}], {target} is of the form C[t″[{t}/x]]: {t} is substituted and may be duplicated",
                    r.name
                ),
            });
        }
        discharged.push(format!("{t} occurs {copies} times in {target} and in no substitution"));
    }
    RuleOutcome::derived(
        BaseRule::EffectualArgs,
        Atom::NoDupliEf { rule: r.name.clone() },
        discharged,
    )
}

/// `(c A1..An) <: (c B1..Bn)` is contravariant at every `i` with a premise
/// `B_i <: A_i`.
pub fn try_contravariant(r: &InferenceRule) -> RuleOutcome {
    let Formula::Subtype { lhs, rhs } = &r.conclusion else {
        return shape(format!("[{}] is not a subtyping rule", r.name));
    };
    let (Term::Con(c, a), Term::Con(d, b)) = (lhs, rhs) else {
        return shape(format!("[{}] does not relate two constructor applications", r.name));
    };
    if c != d || a.len() != b.len() {
        return shape(format!("[{}] relates different constructors {c} and {d}", r.name));
    }
    let mut positions = BTreeSet::new();
    let mut discharged = Vec::new();
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let flipped = r
            .premises
            .iter()
            .any(|f| matches!(f, Formula::Subtype { lhs, rhs } if term_equal(lhs, bi) && term_equal(rhs, ai)));
        if flipped {
            positions.insert(i as u32 + 1);
            discharged.push(format!("{bi} <: {ai} is a premise, so {} is contravariant", i + 1));
        }
    }
    if discharged.is_empty() {
        discharged.push(format!("no premise flips an argument of {c}"));
    }
    RuleOutcome::derived(
        BaseRule::Contravariant,
        Atom::Contravariant {
            constructor: c.clone(),
            positions,
        },
        discharged,
    )
}

/// A typing rule respects the contravariance of `c` when no premise places
/// a contravariant argument of a `c`-typed premise on the left of `<:`.
pub fn try_contra_respecting(p: &AtomSet, r: &InferenceRule, c: &str) -> RuleOutcome {
    if r.kind() != RuleKind::Typing {
        return shape(format!("[{}] is not a typing rule", r.name));
    }
    let candidates: Vec<&BTreeSet<u32>> = positive(p)
        .filter_map(|a| match a {
            Atom::Contravariant { constructor, positions } if constructor == c && !positions.is_empty() => {
                Some(positions)
            }
            _ => None,
        })
        .collect();
    if candidates.is_empty() {
        return missing(format!("no contravariant({c}, I) with nonempty I in the precondition"));
    }
    let mut first_failure = None;
    'candidates: for set in candidates {
        let mut discharged = vec![format!("contravariant({c}, {}) ∈ P", fmt_positions(set))];
        for prem in &r.premises {
            let Formula::Typing {
                ty: Term::Con(d, targs),
                ..
            } = prem
            else {
                continue;
            };
            if d != c {
                continue;
            }
            for &i in set {
                let Some(ti) = targs.get(i as usize - 1) else {
                    continue;
                };
                let offending = r
                    .premises
                    .iter()
                    .find(|f| matches!(f, Formula::Subtype { lhs, .. } if term_equal(lhs, ti)));
                match offending {
                    Some(f) => {
                        first_failure.get_or_insert(Miss::PremiseFails {
                            position: Some(i),
                            subterm: ti.to_string(),
                            detail: format!(
                                "in [{}], the premise {f} has {ti} on the left, but {ti} sits at contravariant position {i} of {c} in {prem}",
                                r.name
                            ),
                        });
                        continue 'candidates;
                    }
                    None => discharged.push(format!("no premise {ti} <: _ for position {i} of {prem}")),
                }
            }
        }
        if discharged.len() == 1 {
            discharged.push(format!("no premise types a term at {c}"));
        }
        return RuleOutcome::derived(
            BaseRule::ContraRespecting,
            Atom::ContraResp {
                rule: r.name.clone(),
                constructor: c.to_string(),
            },
            discharged,
        );
    }
    RuleOutcome::NotApplicable(first_failure.expect("at least one candidate was tried"))
}
