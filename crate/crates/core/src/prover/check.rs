//! Independent re-validation of derivation trees. Nothing computed by the
//! prover is trusted: every base-rule leaf is re-run against its own
//! precondition and every structural rule is re-checked from its children.

use thiserror::Error;

use super::tree::{consequence_conditions, lang_subjects, permutation_condition, ProofNode, ProofRule};
use crate::assertion::{atoms_of, Atom, Subject};
use crate::grammar::CategoryIndex;
use crate::rules::{
    try_contra_respecting, try_contravariant, try_ctx_compliant, try_effectful, try_effectual_args, try_error_handler,
    try_inductive, AtomSet, BaseRule, RuleOutcome,
};
use crate::syntax::LanguageDef;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at {path}: {reason}")]
pub struct CheckError {
    pub path: String,
    pub reason: String,
}

/// Whether `tree` is a valid derivation of a statement about `lang`.
pub fn check_derivation(lang: &LanguageDef, tree: &ProofNode) -> bool {
    check_derivation_detailed(lang, tree).is_ok()
}

/// Like [`check_derivation`], reporting the first violation found.
pub fn check_derivation_detailed(lang: &LanguageDef, tree: &ProofNode) -> Result<(), CheckError> {
    let checker = Checker {
        lang,
        idx: CategoryIndex::for_language(lang),
        categories: lang.grammar.iter().map(|g| g.category.clone()).collect(),
        rules: lang.rules.iter().map(|r| r.name.clone()).collect(),
    };
    if tree.subject != Subject::Lang {
        return Err(CheckError {
            path: tree.rule.to_string(),
            reason: "the root must be a statement about the whole language".into(),
        });
    }
    let root_sets = sets(tree).map_err(|reason| CheckError {
        path: tree.rule.to_string(),
        reason,
    })?;
    checker.node(tree, root_sets, &mut Vec::new())
}

struct Checker<'a> {
    lang: &'a LanguageDef,
    idx: CategoryIndex,
    categories: Vec<String>,
    rules: Vec<String>,
}

type Step = Result<(), String>;

fn ensure(cond: bool, reason: impl FnOnce() -> String) -> Step {
    if cond {
        Ok(())
    } else {
        Err(reason())
    }
}

fn sets(n: &ProofNode) -> Result<(AtomSet, AtomSet), String> {
    let pre = atoms_of(&n.pre).map_err(|e| format!("precondition: {e}"))?;
    let post = atoms_of(&n.post).map_err(|e| format!("postcondition: {e}"))?;
    Ok((pre, post))
}

fn is_permutation(a: &[String], b: &[String]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

/// `pre` of the first child is `pre`, each post feeds the next pre, and the
/// last post is `post`.
fn chain(pre: &AtomSet, children: &[(AtomSet, AtomSet)], post: &AtomSet) -> Step {
    let mut current = pre;
    for (i, (cpre, cpost)) in children.iter().enumerate() {
        ensure(cpre == current, || {
            format!("child {i} does not start from the preceding postcondition")
        })?;
        current = cpost;
    }
    ensure(current == post, || {
        "the children do not end in the postcondition".into()
    })
}

impl Checker<'_> {
    fn node(&self, n: &ProofNode, sets_here: (AtomSet, AtomSet), path: &mut Vec<String>) -> Result<(), CheckError> {
        path.push(n.rule.to_string());
        let fail = |reason, path: &Vec<String>| CheckError {
            path: path.join(" > "),
            reason,
        };
        let mut child_sets = Vec::with_capacity(n.children.len());
        for (i, c) in n.children.iter().enumerate() {
            child_sets.push(sets(c).map_err(|e| fail(format!("child {i}: {e}"), path))?);
        }
        self.local(n, &sets_here, &child_sets).map_err(|e| fail(e, path))?;
        for (i, (c, cs)) in n.children.iter().zip(child_sets).enumerate() {
            path.push(format!("#{i}"));
            self.node(c, cs, path)?;
            path.pop();
        }
        path.pop();
        Ok(())
    }

    fn subject_resolves(&self, s: &Subject) -> Step {
        let (categories, rules) = (&self.categories, &self.rules);
        match s {
            Subject::Lang => Ok(()),
            Subject::Grammar(list) => ensure(is_permutation(list, categories), || {
                "grammar subject does not list each category exactly once".into()
            }),
            Subject::InfSystem(list) => ensure(is_permutation(list, rules), || {
                "inference-system subject does not list each rule exactly once".into()
            }),
            Subject::GrammarRule(c) => ensure(categories.contains(c), || format!("unknown category {c}")),
            Subject::InfRule(r) => ensure(rules.contains(r), || format!("unknown rule [{r}]")),
        }
    }

    fn local(&self, n: &ProofNode, (pre, post): &(AtomSet, AtomSet), child_sets: &[(AtomSet, AtomSet)]) -> Step {
        self.subject_resolves(&n.subject)?;
        let arity = |k: usize| {
            ensure(n.children.len() == k, || {
                format!("({}) needs {k} premises, found {}", n.rule, n.children.len())
            })
        };
        let no_side = || {
            ensure(n.side_conditions.is_empty(), || {
                format!("({}) discharges no side conditions", n.rule)
            })
        };
        match n.rule {
            ProofRule::Consequence => {
                arity(1)?;
                let c = &n.children[0];
                let (cpre, cpost) = &child_sets[0];
                ensure(c.subject == n.subject, || "consequence changes the subject".into())?;
                ensure(cpre.is_subset(pre), || format!("{} does not entail {}", n.pre, c.pre))?;
                ensure(post.is_subset(cpost), || {
                    let missing: Vec<String> = post.difference(cpost).map(ToString::to_string).collect();
                    format!("the postcondition below does not entail {}", missing.join(", "))
                })?;
                ensure(
                    n.side_conditions == consequence_conditions(&n.pre, &c.pre, &n.post, cpost),
                    || "side conditions do not match the entailments".into(),
                )
            }
            ProofRule::Lang => {
                arity(2)?;
                no_side()?;
                ensure(n.subject == Subject::Lang, || {
                    "(lang) concludes about the whole language".into()
                })?;
                let (g, i) = lang_subjects(self.lang);
                ensure(n.children[0].subject == g, || {
                    "first premise must be about the grammar".into()
                })?;
                ensure(n.children[1].subject == i, || {
                    "second premise must be about the inference system".into()
                })?;
                chain(pre, child_sets, post)
            }
            ProofRule::PermG | ProofRule::PermR => {
                arity(1)?;
                let c = &n.children[0];
                let (list, clist) = match (n.rule, &n.subject, &c.subject) {
                    (ProofRule::PermG, Subject::Grammar(a), Subject::Grammar(b)) => (a, b),
                    (ProofRule::PermR, Subject::InfSystem(a), Subject::InfSystem(b)) => (a, b),
                    _ => return Err(format!("({}) has the wrong kind of subject", n.rule)),
                };
                ensure(is_permutation(list, clist), || {
                    "premise subject is not a permutation".into()
                })?;
                ensure(n.side_conditions == permutation_condition(&c.subject), || {
                    "side condition does not describe the permutation".into()
                })?;
                chain(pre, child_sets, post)
            }
            ProofRule::Grammar | ProofRule::Inf => {
                no_side()?;
                let expected: Vec<Subject> = match (n.rule, &n.subject) {
                    (ProofRule::Grammar, Subject::Grammar(list)) => {
                        list.iter().cloned().map(Subject::GrammarRule).collect()
                    }
                    (ProofRule::Inf, Subject::InfSystem(list)) => list.iter().cloned().map(Subject::InfRule).collect(),
                    _ => return Err(format!("({}) has the wrong kind of subject", n.rule)),
                };
                arity(expected.len())?;
                for (i, (c, s)) in n.children.iter().zip(&expected).enumerate() {
                    ensure(c.subject == *s, || format!("premise {i} should be about {s}"))?;
                }
                chain(pre, child_sets, post)
            }
            ProofRule::Iterate => {
                arity(2)?;
                no_side()?;
                for c in &n.children {
                    ensure(c.subject == n.subject, || {
                        "(iterate) premises must share its subject".into()
                    })?;
                }
                chain(pre, child_sets, post)
            }
            ProofRule::Neutral => {
                arity(0)?;
                no_side()?;
                ensure(pre == post, || {
                    "(X-neutral) must propagate its precondition unchanged".into()
                })
            }
            ProofRule::Base(b) => {
                arity(0)?;
                ensure(pre.is_subset(post), || "a base rule may not drop assertions".into())?;
                let added: Vec<_> = post.difference(pre).collect();
                ensure(added.len() == 1, || format!("({b}) must add exactly one assertion"))?;
                let added = added[0];
                ensure(!added.negated, || "base rules conclude positive assertions only".into())?;
                let outcome = self.rerun(b, &n.subject, pre, &added.atom)?;
                match outcome {
                    RuleOutcome::Derived { atom, justification } => {
                        ensure(atom == added.atom, || {
                            format!("({b}) derives {atom}, not {}", added.atom)
                        })?;
                        ensure(justification.rule == b, || "justification names another rule".into())?;
                        ensure(n.side_conditions == justification.discharged, || {
                            "side conditions differ from the discharged premises".into()
                        })
                    }
                    RuleOutcome::NotApplicable(m) => Err(format!("({b}) does not apply: {m}")),
                }
            }
        }
    }

    fn rerun(&self, b: BaseRule, subject: &Subject, pre: &AtomSet, added: &Atom) -> Result<RuleOutcome, String> {
        if b == BaseRule::Inductive {
            let Subject::GrammarRule(cat) = subject else {
                return Err("(inductive) applies to a grammar rule".into());
            };
            let g = self
                .lang
                .grammar_rule(cat)
                .ok_or_else(|| format!("unknown category {cat}"))?;
            let Atom::Ctx { constructor, .. } = added else {
                return Err("(inductive) concludes a ctx assertion".into());
            };
            return Ok(try_inductive(&self.idx, g, constructor));
        }
        let Subject::InfRule(name) = subject else {
            return Err(format!("({b}) applies to an inference rule"));
        };
        let r = self.lang.rule(name).ok_or_else(|| format!("unknown rule [{name}]"))?;
        Ok(match b {
            BaseRule::Inductive => unreachable!("handled above"),
            BaseRule::CtxCompliant => try_ctx_compliant(pre, r, &self.idx),
            BaseRule::ErrorHandler => try_error_handler(pre, r, &self.idx),
            BaseRule::Effectful => try_effectful(r),
            BaseRule::EffectualArgs => try_effectual_args(pre, r, &self.idx, &self.lang.ineffectual),
            BaseRule::Contravariant => try_contravariant(r),
            BaseRule::ContraRespecting => {
                let Atom::ContraResp { constructor, .. } = added else {
                    return Err("(contra-respecting) concludes a contra-resp assertion".into());
                };
                try_contra_respecting(pre, r, constructor)
            }
        })
    }
}
