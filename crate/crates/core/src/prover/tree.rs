use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use super::{Application, ComponentRun, Saturation};
use crate::assertion::{atoms_of, Assertion, Subject};
use crate::rules::{AtomSet, BaseRule};
use crate::syntax::LanguageDef;

/// The proof rule a derivation node applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofRule {
    Lang,
    Grammar,
    Inf,
    PermG,
    PermR,
    Neutral,
    Iterate,
    Consequence,
    Base(BaseRule),
}

impl ProofRule {
    pub fn name(self) -> &'static str {
        match self {
            ProofRule::Lang => "lang",
            ProofRule::Grammar => "grammar",
            ProofRule::Inf => "inf",
            ProofRule::PermG => "perm-g",
            ProofRule::PermR => "perm-r",
            ProofRule::Neutral => "X-neutral",
            ProofRule::Iterate => "iterate",
            ProofRule::Consequence => "consequence",
            ProofRule::Base(b) => b.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let structural = [
            ProofRule::Lang,
            ProofRule::Grammar,
            ProofRule::Inf,
            ProofRule::PermG,
            ProofRule::PermR,
            ProofRule::Neutral,
            ProofRule::Iterate,
            ProofRule::Consequence,
        ];
        structural
            .into_iter()
            .find(|r| r.name() == name)
            .or_else(|| BaseRule::from_name(name).map(ProofRule::Base))
    }
}

impl fmt::Display for ProofRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ProofRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ProofRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        ProofRule::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown proof rule `{name}`")))
    }
}

/// A node of a derivation: the rule applied, the statement `{pre} subject
/// {post}` it concludes, the premises it discharged and its subderivations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofNode {
    pub rule: ProofRule,
    pub pre: Assertion,
    pub subject: Subject,
    pub post: Assertion,
    pub side_conditions: Vec<String>,
    pub children: Vec<ProofNode>,
}

pub(crate) fn consequence_conditions(
    pre: &Assertion,
    inner_pre: &Assertion,
    post: &Assertion,
    inner: &AtomSet,
) -> Vec<String> {
    vec![
        format!("{pre} ⇒ {inner_pre}"),
        format!("Q ⇒ {post}, where Q is the postcondition below ({} atoms)", inner.len()),
    ]
}

pub(crate) fn permutation_condition(to: &Subject) -> Vec<String> {
    vec![format!("{} is a permutation of the definition order", to.reference())]
}

pub(crate) fn lang_subjects(lang: &LanguageDef) -> (Subject, Subject) {
    (
        Subject::Grammar(lang.grammar.iter().map(|g| g.category.clone()).collect()),
        Subject::InfSystem(lang.rules.iter().map(|r| r.name.clone()).collect()),
    )
}

fn node(rule: ProofRule, pre: &AtomSet, subject: Subject, post: &AtomSet, children: Vec<ProofNode>) -> ProofNode {
    ProofNode {
        rule,
        pre: Assertion::from_signed(pre),
        subject,
        post: Assertion::from_signed(post),
        side_conditions: Vec::new(),
        children,
    }
}

/// Splits a run of same-subject derivations into a balanced tree of
/// (iterate) nodes, so depth stays logarithmic in the number of steps.
fn balanced(mut steps: Vec<ProofNode>, subject: &Subject) -> ProofNode {
    if steps.len() == 1 {
        return steps.pop().expect("one step");
    }
    let right = steps.split_off(steps.len() / 2);
    let left = balanced(steps, subject);
    let right = balanced(right, subject);
    ProofNode {
        rule: ProofRule::Iterate,
        pre: left.pre.clone(),
        subject: subject.clone(),
        post: right.post.clone(),
        side_conditions: Vec::new(),
        children: vec![left, right],
    }
}

fn component(subject: Subject, applications: &[Application], atoms: &mut AtomSet) -> ProofNode {
    if applications.is_empty() {
        return node(ProofRule::Neutral, atoms, subject, atoms, Vec::new());
    }
    let leaves: Vec<ProofNode> = applications
        .iter()
        .map(|app| {
            let pre = atoms.clone();
            atoms.insert(crate::assertion::SignedAtom::positive(app.atom.clone()));
            let mut leaf = node(
                ProofRule::Base(app.justification.rule),
                &pre,
                subject.clone(),
                atoms,
                Vec::new(),
            );
            leaf.side_conditions = app.justification.discharged.clone();
            leaf
        })
        .collect();
    balanced(leaves, &subject)
}

fn sweep(
    rule: ProofRule,
    subject: Subject,
    runs: &[ComponentRun],
    part: fn(String) -> Subject,
    atoms: &mut AtomSet,
) -> ProofNode {
    let pre = atoms.clone();
    let children = runs
        .iter()
        .map(|run| component(part(run.name.clone()), &run.applications, atoms))
        .collect();
    node(rule, &pre, subject, atoms, children)
}

pub(crate) fn build(lang: &LanguageDef, sat: &Saturation, pre: &Assertion, goal: &Assertion) -> ProofNode {
    let (g_subject, i_subject) = lang_subjects(lang);
    let mut atoms = sat.initial.clone();

    let start = atoms.clone();
    let grammar = sweep(
        ProofRule::Grammar,
        g_subject.clone(),
        &sat.grammar,
        Subject::GrammarRule,
        &mut atoms,
    );
    let mut perm_g = node(ProofRule::PermG, &start, g_subject.clone(), &atoms, vec![grammar]);
    perm_g.side_conditions = permutation_condition(&g_subject);

    let ordered = Subject::InfSystem(sat.rule_order.clone());
    let after_grammar = atoms.clone();
    let mut passes: Vec<&Vec<ComponentRun>> = sat.productive_passes().collect();
    if passes.is_empty() {
        passes.extend(sat.passes.first());
    }
    let sweeps: Vec<ProofNode> = passes
        .into_iter()
        .map(|runs| sweep(ProofRule::Inf, ordered.clone(), runs, Subject::InfRule, &mut atoms))
        .collect();
    let inf = if sweeps.is_empty() {
        node(ProofRule::Inf, &atoms, ordered.clone(), &atoms, Vec::new())
    } else {
        balanced(sweeps, &ordered)
    };
    let mut perm_r = node(ProofRule::PermR, &after_grammar, i_subject, &atoms, vec![inf]);
    perm_r.side_conditions = permutation_condition(&ordered);

    let lang_node = node(
        ProofRule::Lang,
        &sat.initial,
        Subject::Lang,
        &atoms,
        vec![perm_g, perm_r],
    );
    consequence(pre, goal, lang_node, &atoms)
}

fn consequence(pre: &Assertion, goal: &Assertion, inner: ProofNode, inner_atoms: &AtomSet) -> ProofNode {
    ProofNode {
        rule: ProofRule::Consequence,
        side_conditions: consequence_conditions(pre, &inner.pre, goal, inner_atoms),
        pre: pre.clone(),
        subject: Subject::Lang,
        post: goal.clone(),
        children: vec![inner],
    }
}

/// `{P} (G, I) {Q}` for a goal the precondition already entails.
pub(crate) fn trivial(lang: &LanguageDef, pre: &Assertion, goal: &Assertion) -> ProofNode {
    let atoms = atoms_of(pre).expect("precondition checked flat");
    let (g_subject, i_subject) = lang_subjects(lang);
    let children = vec![
        node(ProofRule::Neutral, &atoms, g_subject, &atoms, Vec::new()),
        node(ProofRule::Neutral, &atoms, i_subject, &atoms, Vec::new()),
    ];
    let lang_node = node(ProofRule::Lang, &atoms, Subject::Lang, &atoms, children);
    consequence(pre, goal, lang_node, &atoms)
}

/// Indented text rendering: one line per node with the atoms it adds, and
/// the discharged premises of base rules underneath.
pub fn render_tree_text(root: &ProofNode) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(consequence) {{{}}} {} {{{}}}", root.pre, root.subject, root.post);
    if root.rule != ProofRule::Consequence {
        out.clear();
        write_node(&mut out, root, 0);
        return out;
    }
    for c in &root.side_conditions {
        let _ = writeln!(out, "    {c}");
    }
    for child in &root.children {
        write_node(&mut out, child, 1);
    }
    out
}

fn write_node(out: &mut String, n: &ProofNode, depth: usize) {
    let indent = "  ".repeat(depth);
    let added: Vec<String> = match (atoms_of(&n.pre), atoms_of(&n.post)) {
        (Ok(pre), Ok(post)) => post.difference(&pre).map(ToString::to_string).collect(),
        _ => Vec::new(),
    };
    let _ = write!(out, "{indent}({}) {}", n.rule, n.subject);
    match added.len() {
        0 => {}
        1 => {
            let _ = write!(out, ": +{}", added[0]);
        }
        k => {
            let _ = write!(out, ": +{k} atoms");
        }
    }
    out.push('\n');
    for c in &n.side_conditions {
        let _ = writeln!(out, "{indent}    {c}");
    }
    for child in &n.children {
        write_node(out, child, depth + 1);
    }
}
