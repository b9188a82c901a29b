//! Assertions about language definitions: the seven atom forms closed under
//! conjunction, negation and `true`, plus annotated statements `{P} X {Q}`.
//!
//! Entailment is decided syntactically on flat assertions (conjunctions of
//! possibly negated atoms): `P => Q` holds when every signed atom of `Q`
//! appears in `P`.

mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_assertion, AssertionParseError};

/// An atomic assertion.
///
/// Variant order fixes the order used for sorted listings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Atom {
    /// `ctx(X, c, {n1..nk})`
    Ctx {
        metavar: String,
        constructor: String,
        positions: BTreeSet<u32>,
    },
    /// `ctx-compliant([rn])`
    CtxCompliant { rule: String },
    /// `error-handler(op, n)`
    ErrorHandler { constructor: String, position: u32 },
    /// `effectful(i)`, indexing state components from 1
    Effectful { state_position: u32 },
    /// `no-dupli-ef([rn])`
    NoDupliEf { rule: String },
    /// `contravariant(c, {n..})`
    Contravariant {
        constructor: String,
        positions: BTreeSet<u32>,
    },
    /// `contra-resp([rn], c)`
    ContraResp { rule: String, constructor: String },
}

impl Atom {
    pub fn ctx(metavar: &str, constructor: &str, positions: impl IntoIterator<Item = u32>) -> Self {
        Atom::Ctx {
            metavar: metavar.into(),
            constructor: constructor.into(),
            positions: positions.into_iter().collect(),
        }
    }

    pub fn contravariant(constructor: &str, positions: impl IntoIterator<Item = u32>) -> Self {
        Atom::Contravariant {
            constructor: constructor.into(),
            positions: positions.into_iter().collect(),
        }
    }

    /// Short name of the atom form, as written in assertion text.
    pub fn form(&self) -> &'static str {
        match self {
            Atom::Ctx { .. } => "ctx",
            Atom::CtxCompliant { .. } => "ctx-compliant",
            Atom::ErrorHandler { .. } => "error-handler",
            Atom::Effectful { .. } => "effectful",
            Atom::NoDupliEf { .. } => "no-dupli-ef",
            Atom::Contravariant { .. } => "contravariant",
            Atom::ContraResp { .. } => "contra-resp",
        }
    }
}

pub(crate) fn fmt_positions(set: &BTreeSet<u32>) -> String {
    let items: Vec<String> = set.iter().map(u32::to_string).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ctx {
                metavar,
                constructor,
                positions,
            } => write!(f, "ctx({metavar}, {constructor}, {})", fmt_positions(positions)),
            Atom::CtxCompliant { rule } => write!(f, "ctx-compliant([{rule}])"),
            Atom::ErrorHandler { constructor, position } => write!(f, "error-handler({constructor}, {position})"),
            Atom::Effectful { state_position } => write!(f, "effectful({state_position})"),
            Atom::NoDupliEf { rule } => write!(f, "no-dupli-ef([{rule}])"),
            Atom::Contravariant { constructor, positions } => {
                write!(f, "contravariant({constructor}, {})", fmt_positions(positions))
            }
            Atom::ContraResp { rule, constructor } => write!(f, "contra-resp([{rule}], {constructor})"),
        }
    }
}

/// An atom with a polarity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedAtom {
    pub atom: Atom,
    pub negated: bool,
}

impl SignedAtom {
    pub fn positive(atom: Atom) -> Self {
        SignedAtom { atom, negated: false }
    }

    pub fn negative(atom: Atom) -> Self {
        SignedAtom { atom, negated: true }
    }

    pub fn to_assertion(&self) -> Assertion {
        let a = Assertion::Atom(self.atom.clone());
        if self.negated {
            Assertion::Not(Box::new(a))
        } else {
            a
        }
    }
}

impl fmt::Display for SignedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

impl Serialize for SignedAtom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        if !self.negated {
            return self.atom.serialize(s);
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("kind", "not")?;
        m.serialize_entry("inner", &self.atom)?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for SignedAtom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Assertion::deserialize(d)? {
            Assertion::Atom(a) => Ok(SignedAtom::positive(a)),
            Assertion::Not(inner) => match *inner {
                Assertion::Atom(a) => Ok(SignedAtom::negative(a)),
                _ => Err(serde::de::Error::custom("expected a possibly negated atom")),
            },
            _ => Err(serde::de::Error::custom("expected a possibly negated atom")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Assertion {
    True,
    Atom(Atom),
    Not(Box<Assertion>),
    And(Box<Assertion>, Box<Assertion>),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("assertion is not flat: negation must wrap a single atom (found `{0}`)")]
pub struct NotFlat(pub String);

impl Assertion {
    pub fn atom(a: Atom) -> Self {
        Assertion::Atom(a)
    }

    pub fn and(p: Assertion, q: Assertion) -> Self {
        Assertion::And(Box::new(p), Box::new(q))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Assertion) -> Self {
        Assertion::Not(Box::new(p))
    }

    /// Left-nested conjunction of the given signed atoms; `true` when empty.
    pub fn from_signed<'a>(atoms: impl IntoIterator<Item = &'a SignedAtom>) -> Self {
        atoms
            .into_iter()
            .map(SignedAtom::to_assertion)
            .reduce(Assertion::and)
            .unwrap_or(Assertion::True)
    }

    /// Atoms asserted positively at conjunction level, in textual order.
    pub fn positive_atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(a: &'a Assertion, out: &mut Vec<&'a Atom>) {
            match a {
                Assertion::Atom(x) => out.push(x),
                Assertion::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Assertion::True | Assertion::Not(_) => {}
            }
        }
        go(self, &mut out);
        out
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.positive_atoms().into_iter().any(|a| a == atom)
    }
}

/// The set of signed atoms of a flat assertion.
pub fn atoms_of(a: &Assertion) -> Result<BTreeSet<SignedAtom>, NotFlat> {
    let mut out = BTreeSet::new();
    fn go(a: &Assertion, out: &mut BTreeSet<SignedAtom>) -> Result<(), NotFlat> {
        match a {
            Assertion::True => Ok(()),
            Assertion::Atom(x) => {
                out.insert(SignedAtom::positive(x.clone()));
                Ok(())
            }
            Assertion::Not(inner) => match inner.as_ref() {
                Assertion::Atom(x) => {
                    out.insert(SignedAtom::negative(x.clone()));
                    Ok(())
                }
                other => Err(NotFlat(format!("~{}", Parenthesized(other)))),
            },
            Assertion::And(l, r) => {
                go(l, out)?;
                go(r, out)
            }
        }
    }
    go(a, &mut out)?;
    Ok(out)
}

/// Syntactic entailment on flat assertions.
pub fn entails(p: &Assertion, q: &Assertion) -> Result<bool, NotFlat> {
    let have = atoms_of(p)?;
    let want = atoms_of(q)?;
    Ok(want.is_subset(&have))
}

/// `p /\ atom`, leaving `p` unchanged when the atom is already asserted.
pub fn conjoin(p: &Assertion, atom: Atom) -> Assertion {
    if p.contains(&atom) {
        return p.clone();
    }
    match p {
        Assertion::True => Assertion::Atom(atom),
        _ => Assertion::and(p.clone(), Assertion::Atom(atom)),
    }
}

struct Parenthesized<'a>(&'a Assertion);

impl fmt::Display for Parenthesized<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Assertion::And(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::True => f.write_str("true"),
            Assertion::Atom(a) => write!(f, "{a}"),
            Assertion::Not(inner) => write!(f, "~{}", Parenthesized(inner)),
            Assertion::And(l, r) => write!(f, "{l} /\\ {}", Parenthesized(r)),
        }
    }
}

/// JSON shape of an assertion: atoms are tagged objects, connectives carry
/// `"kind": "true" | "not" | "and"`, and conjunction chains are flattened.
impl Serialize for Assertion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Assertion::Atom(x) => x.serialize(s),
            Assertion::True => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "true")?;
                m.end()
            }
            Assertion::Not(inner) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "not")?;
                m.serialize_entry("inner", inner)?;
                m.end()
            }
            Assertion::And(..) => {
                fn flatten<'a>(a: &'a Assertion, out: &mut Vec<&'a Assertion>) {
                    match a {
                        Assertion::And(l, r) => {
                            flatten(l, out);
                            flatten(r, out);
                        }
                        other => out.push(other),
                    }
                }
                let mut parts = Vec::new();
                flatten(self, &mut parts);
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "and")?;
                m.serialize_entry("conjuncts", &parts)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Assertion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        assertion_from_json(v).map_err(serde::de::Error::custom)
    }
}

fn assertion_from_json(v: serde_json::Value) -> Result<Assertion, String> {
    use serde_json::Value;
    let Value::Object(mut m) = v else {
        return Err("expected an assertion object".into());
    };
    let kind = match m.get("kind") {
        Some(Value::String(k)) => k.clone(),
        _ => return Err("assertion object without a string \"kind\"".into()),
    };
    let only =
        |m: &serde_json::Map<String, Value>, fields: &[&str]| match m.keys().find(|k| !fields.contains(&k.as_str())) {
            Some(k) => Err(format!("unknown field `{k}` in a \"{kind}\" assertion")),
            None => Ok(()),
        };
    match kind.as_str() {
        "true" => {
            only(&m, &["kind"])?;
            Ok(Assertion::True)
        }
        "not" => {
            only(&m, &["kind", "inner"])?;
            let inner = m.remove("inner").ok_or("missing field `inner`")?;
            Ok(Assertion::not(assertion_from_json(inner)?))
        }
        "and" => {
            only(&m, &["kind", "conjuncts"])?;
            let Some(Value::Array(parts)) = m.remove("conjuncts") else {
                return Err("missing array field `conjuncts`".into());
            };
            let mut out = Assertion::True;
            for (i, p) in parts.into_iter().enumerate() {
                let p = assertion_from_json(p)?;
                out = if i == 0 { p } else { Assertion::and(out, p) };
            }
            Ok(out)
        }
        _ => Atom::deserialize(Value::Object(m))
            .map(Assertion::Atom)
            .map_err(|e| e.to_string()),
    }
}

/// The subject of an annotated statement.
///
/// Whole grammars and inference systems carry the order in which their
/// components are analyzed (category names, rule names).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    Lang,
    Grammar(Vec<String>),
    InfSystem(Vec<String>),
    GrammarRule(String),
    InfRule(String),
}

impl Subject {
    pub fn kind(&self) -> &'static str {
        match self {
            Subject::Lang => "lang",
            Subject::Grammar(_) => "grammar",
            Subject::InfSystem(_) => "inf",
            Subject::GrammarRule(_) => "grammar-rule",
            Subject::InfRule(_) => "inf-rule",
        }
    }

    pub fn reference(&self) -> String {
        match self {
            Subject::Lang => String::new(),
            Subject::Grammar(v) | Subject::InfSystem(v) => v.join(" "),
            Subject::GrammarRule(r) | Subject::InfRule(r) => r.clone(),
        }
    }

    pub fn from_parts(kind: &str, reference: &str) -> Option<Self> {
        let list = || reference.split_whitespace().map(str::to_string).collect();
        match kind {
            "lang" => Some(Subject::Lang),
            "grammar" => Some(Subject::Grammar(list())),
            "inf" => Some(Subject::InfSystem(list())),
            "grammar-rule" => Some(Subject::GrammarRule(reference.to_string())),
            "inf-rule" => Some(Subject::InfRule(reference.to_string())),
            _ => None,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Lang => f.write_str("(G, I)"),
            Subject::Grammar(_) => f.write_str("G"),
            Subject::InfSystem(_) => f.write_str("I"),
            Subject::GrammarRule(c) => f.write_str(c),
            Subject::InfRule(r) => write!(f, "[{r}]"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SubjectRepr {
    kind: String,
    #[serde(rename = "ref")]
    reference: String,
}

impl Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SubjectRepr {
            kind: self.kind().to_string(),
            reference: self.reference(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subject {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SubjectRepr::deserialize(d)?;
        Subject::from_parts(&r.kind, &r.reference)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown subject kind `{}`", r.kind)))
    }
}

/// `{pre} subject {post}`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub pre: Assertion,
    pub subject: Subject,
    pub post: Assertion,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} {} {{{}}}", self.pre, self.subject, self.post)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Atom {
        Atom::Effectful { state_position: 1 }
    }

    fn y() -> Atom {
        Atom::NoDupliEf { rule: "BETA".into() }
    }

    fn z() -> Atom {
        Atom::CtxCompliant { rule: "BETA".into() }
    }

    #[test]
    fn atoms_of_flat_forms() {
        let a = Assertion::and(Assertion::atom(x()), Assertion::True);
        assert_eq!(atoms_of(&a).unwrap(), BTreeSet::from([SignedAtom::positive(x())]));
        let b = Assertion::and(Assertion::atom(x()), Assertion::not(Assertion::atom(y())));
        assert_eq!(
            atoms_of(&b).unwrap(),
            BTreeSet::from([SignedAtom::positive(x()), SignedAtom::negative(y())])
        );
        let nested = Assertion::not(Assertion::and(Assertion::atom(x()), Assertion::atom(y())));
        assert!(atoms_of(&nested).is_err());
    }

    #[test]
    fn associations_give_the_same_set() {
        let (a, b, c) = (Assertion::atom(x()), Assertion::atom(y()), Assertion::atom(z()));
        let left = Assertion::and(Assertion::and(a.clone(), b.clone()), c.clone());
        let right = Assertion::and(a, Assertion::and(b, c));
        assert_eq!(atoms_of(&left).unwrap(), atoms_of(&right).unwrap());
        assert_eq!(atoms_of(&left).unwrap().len(), 3);
    }

    #[test]
    fn entailment_examples() {
        let p = Assertion::and(Assertion::atom(y()), Assertion::atom(x()));
        assert!(entails(&p, &Assertion::atom(y())).unwrap());
        assert!(!entails(&Assertion::True, &Assertion::atom(z())).unwrap());
        let a = Assertion::atom(Atom::ctx("E", "app", [2, 1]));
        let b = Assertion::atom(Atom::ctx("E", "app", [1, 2]));
        assert!(entails(&a, &b).unwrap());
        assert!(entails(&p, &Assertion::True).unwrap());
    }

    #[test]
    fn conjoin_is_idempotent() {
        assert_eq!(conjoin(&Assertion::True, x()), Assertion::atom(x()));
        let once = conjoin(&Assertion::atom(x()), x());
        assert_eq!(once, Assertion::atom(x()));
        let ctx_try = Atom::ctx("E", "try", [1]);
        let try_f = Atom::ctx("F", "try", []);
        let both = conjoin(&Assertion::atom(ctx_try.clone()), try_f.clone());
        assert_eq!(both, Assertion::and(Assertion::atom(ctx_try), Assertion::atom(try_f)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Atom::ctx("T", "arrow", [1, 2]).to_string(), "ctx(T, arrow, {1,2})");
        assert_eq!(Atom::ctx("F", "try", []).to_string(), "ctx(F, try, {})");
        assert_eq!(
            Atom::ContraResp {
                rule: "T-APP".into(),
                constructor: "arrow".into()
            }
            .to_string(),
            "contra-resp([T-APP], arrow)"
        );
        let a = Assertion::and(Assertion::atom(x()), Assertion::not(Assertion::atom(y())));
        assert_eq!(a.to_string(), "effectful(1) /\\ ~no-dupli-ef([BETA])");
    }

    #[test]
    fn json_shapes() {
        let a = Assertion::and(
            Assertion::and(Assertion::atom(Atom::ctx("E", "app", [1, 2])), Assertion::atom(x())),
            Assertion::not(Assertion::atom(y())),
        );
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"and","conjuncts":[{"kind":"ctx","metavar":"E","constructor":"app","positions":[1,2]},{"kind":"effectful","state_position":1},{"kind":"not","inner":{"kind":"no-dupli-ef","rule":"BETA"}}]}"#
        );
        let back: Assertion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        let t: Assertion = serde_json::from_str(r#"{"kind":"true"}"#).unwrap();
        assert_eq!(t, Assertion::True);
    }
}
