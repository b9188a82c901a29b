//! One-node mutations of a derivation tree. Each must make the tree invalid.

use langlogic::assertion::{atoms_of, Assertion, Atom, SignedAtom, Subject};
use langlogic::prover::{ProofNode, ProofRule};
use langlogic::rules::{AtomSet, BaseRule};

/// Every node's path, with the single atom it adds when it is a base leaf.
fn index(n: &ProofNode, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Option<Atom>)>) {
    let adds = if matches!(n.rule, ProofRule::Base(_)) {
        added(n)
    } else {
        None
    };
    out.push((path.clone(), adds));
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        index(c, path, out);
        path.pop();
    }
}

fn node_at<'a>(n: &'a ProofNode, path: &[usize]) -> &'a ProofNode {
    path.iter().fold(n, |n, &i| &n.children[i])
}

fn at<'a>(n: &'a mut ProofNode, path: &[usize]) -> &'a mut ProofNode {
    path.iter().fold(n, |n, &i| &mut n.children[i])
}

fn added(n: &ProofNode) -> Option<Atom> {
    let pre = atoms_of(&n.pre).ok()?;
    let post = atoms_of(&n.post).ok()?;
    let diff: Vec<&SignedAtom> = post.difference(&pre).collect();
    (diff.len() == 1).then(|| diff[0].atom.clone())
}

fn edit(a: &Assertion, f: impl FnOnce(&mut AtomSet)) -> Assertion {
    let mut set = atoms_of(a).unwrap();
    f(&mut set);
    Assertion::from_signed(&set)
}

fn swap_atom(set: &mut AtomSet, from: &Atom, to: Atom) {
    assert!(set.remove(&SignedAtom::positive(from.clone())), "{from} present");
    set.insert(SignedAtom::positive(to));
}

fn stray() -> Atom {
    Atom::Effectful { state_position: 9 }
}

enum Target {
    Adds(Atom),
    Rule(ProofRule),
    Root,
    RuleIterate,
}

struct Tamper<'a> {
    tree: &'a ProofNode,
    nodes: Vec<(Vec<usize>, Option<Atom>)>,
}

impl Tamper<'_> {
    fn path(&self, target: &Target) -> &[usize] {
        let hit = |(path, adds): &&(Vec<usize>, Option<Atom>)| {
            let n = node_at(self.tree, path);
            match target {
                Target::Adds(a) => adds.as_ref() == Some(a),
                Target::Rule(r) => n.rule == *r,
                Target::Root => n.rule == ProofRule::Consequence,
                Target::RuleIterate => n.rule == ProofRule::Iterate && matches!(n.subject, Subject::InfRule(_)),
            }
        };
        &self.nodes.iter().find(hit).expect("mutation target exists").0
    }

    /// A copy of the tree with the first node matching `target` changed by `f`.
    fn mutate(&self, target: Target, f: impl FnOnce(&mut ProofNode)) -> ProofNode {
        let mut t = self.tree.clone();
        f(at(&mut t, self.path(&target)));
        t
    }
}

/// Twenty systematically tampered copies of a derivation of
/// `error-handler(try, 1)` on the fixed3 variant.
pub fn tampered(tree: &ProofNode) -> Vec<(&'static str, ProofNode)> {
    let arrow_ctx = Atom::ctx("T", "arrow", [1, 2]);
    let print_effect = Atom::Effectful { state_position: 1 };
    let contra = Atom::contravariant("arrow", [1]);
    let err_compliant = Atom::CtxCompliant { rule: "ERR".into() };
    let handler = Atom::ErrorHandler {
        constructor: "try".into(),
        position: 1,
    };
    let mut nodes = Vec::new();
    index(tree, &mut Vec::new(), &mut nodes);
    let tm = Tamper { tree, nodes };
    let mutate = |target, f: &dyn Fn(&mut ProofNode)| tm.mutate(target, f);
    let is_arrow_ctx = || Target::Adds(arrow_ctx.clone());
    let is_print = || Target::Adds(print_effect.clone());
    let is_contra = || Target::Adds(contra.clone());
    let is_compliant = || Target::Adds(err_compliant.clone());
    let is_handler = || Target::Adds(handler.clone());
    let rule_is = Target::Rule;

    vec![
        (
            "goal gains an underived atom",
            mutate(Target::Root, &|n| {
                n.post = edit(&n.post, |s| {
                    s.insert(SignedAtom::positive(Atom::NoDupliEf {
                        rule: "CBN-BETA".into(),
                    }));
                })
            }),
        ),
        (
            "leaf drops the atom it derives",
            mutate(is_arrow_ctx(), &|n| n.post = n.pre.clone()),
        ),
        (
            "ctx positions changed",
            mutate(is_arrow_ctx(), &|n| {
                n.post = edit(&n.post, |s| swap_atom(s, &arrow_ctx, Atom::ctx("T", "arrow", [1])))
            }),
        ),
        (
            "neutral leaf renamed to a base rule",
            mutate(rule_is(ProofRule::Neutral), &|n| {
                n.rule = ProofRule::Base(BaseRule::Effectful)
            }),
        ),
        (
            "base leaf renamed",
            mutate(is_print(), &|n| n.rule = ProofRule::Base(BaseRule::Contravariant)),
        ),
        (
            "side condition edited",
            mutate(is_compliant(), &|n| n.side_conditions[0].push_str(" (edited)")),
        ),
        (
            "lang premises swapped",
            mutate(rule_is(ProofRule::Lang), &|n| n.children.swap(0, 1)),
        ),
        (
            "grammar premise dropped",
            mutate(rule_is(ProofRule::Grammar), &|n| {
                n.children.remove(0);
            }),
        ),
        (
            "inf premise duplicated",
            mutate(rule_is(ProofRule::Inf), &|n| {
                let last = n.children.last().unwrap().clone();
                n.children.push(last);
            }),
        ),
        (
            "subject names an unknown rule",
            mutate(rule_is(ProofRule::Neutral), &|n| {
                n.subject = Subject::InfRule("NOWHERE".into())
            }),
        ),
        (
            "grammar order is not a permutation",
            mutate(rule_is(ProofRule::Grammar), &|n| {
                if let Subject::Grammar(list) = &mut n.subject {
                    list.pop();
                }
            }),
        ),
        (
            "neutral leaf gains an atom",
            mutate(rule_is(ProofRule::Neutral), &|n| {
                n.post = edit(&n.post, |s| {
                    s.insert(SignedAtom::positive(stray()));
                })
            }),
        ),
        (
            "iterate premises swapped",
            mutate(Target::RuleIterate, &|n| n.children.swap(0, 1)),
        ),
        (
            "lang precondition altered",
            mutate(rule_is(ProofRule::Lang), &|n| {
                n.pre = edit(&n.pre, |s| {
                    s.insert(SignedAtom::positive(stray()));
                })
            }),
        ),
        (
            "effectful index changed",
            mutate(is_print(), &|n| {
                n.post = edit(&n.post, |s| {
                    swap_atom(s, &print_effect, Atom::Effectful { state_position: 2 })
                })
            }),
        ),
        (
            "contravariant positions changed",
            mutate(is_contra(), &|n| {
                n.post = edit(&n.post, |s| swap_atom(s, &contra, Atom::contravariant("arrow", [1, 2])))
            }),
        ),
        (
            "leaf precondition loses its premise",
            mutate(is_handler(), &|n| {
                n.pre = edit(&n.pre, |s| {
                    s.remove(&SignedAtom::positive(err_compliant.clone()));
                })
            }),
        ),
        (
            "error-handler position changed",
            mutate(is_handler(), &|n| {
                n.post = edit(&n.post, |s| {
                    swap_atom(
                        s,
                        &handler,
                        Atom::ErrorHandler {
                            constructor: "try".into(),
                            position: 2,
                        },
                    )
                })
            }),
        ),
        (
            "ctx-compliant names another rule",
            mutate(is_compliant(), &|n| {
                n.post = edit(&n.post, |s| {
                    swap_atom(s, &err_compliant, Atom::CtxCompliant { rule: "TRY".into() })
                })
            }),
        ),
        (
            "consequence loses a side condition",
            mutate(Target::Root, &|n| {
                n.side_conditions.pop();
            }),
        ),
    ]
}
