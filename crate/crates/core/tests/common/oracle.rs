//! Brute-force reference for grammar derivation, and random grammars to
//! compare it against.
//!
//! The oracle explores sentential forms breadth first, starting from the
//! metavariable and rewriting the leftmost open metavariable with each of
//! its productions. Forms that can no longer match the query are dropped, so
//! the set of reachable forms is finite and the search is exhaustive.

use std::collections::{HashSet, VecDeque};

use langlogic::syntax::{GrammarRule, Term};
use rand::seq::SliceRandom;
use rand::Rng;

fn resolve<'a>(declared: &[&str], occ: &'a str) -> Option<&'a str> {
    let mut s = occ;
    loop {
        if declared.contains(&s) {
            return Some(s);
        }
        let last = s.chars().last()?;
        if last.is_ascii_digit() || last == '\'' {
            s = &s[..s.len() - 1];
        } else {
            return None;
        }
    }
}

enum Status {
    Dead,
    Done,
    /// Path to the leftmost open metavariable, whether only metavariable
    /// productions can help there, and the metavariable.
    Open(Vec<usize>, bool, String),
}

fn status(form: &Term, query: &Term, declared: &[&str]) -> Status {
    let mut path = Vec::new();
    let mut open = None;
    if walk(form, query, declared, &mut path, &mut open) {
        match open {
            Some((p, meta_only, x)) => Status::Open(p, meta_only, x),
            None => Status::Done,
        }
    } else {
        Status::Dead
    }
}

type Open = Option<(Vec<usize>, bool, String)>;

/// False when `form` cannot become `query`; records the first open spot.
fn walk(form: &Term, query: &Term, declared: &[&str], path: &mut Vec<usize>, open: &mut Open) -> bool {
    match (form, query) {
        (Term::Meta(x), q) => {
            let Some(x) = resolve(declared, x) else {
                return false;
            };
            let meta_only = match q {
                Term::Meta(occ) => {
                    if resolve(declared, occ) == Some(x) {
                        return true;
                    }
                    true
                }
                _ => false,
            };
            if open.is_none() {
                *open = Some((path.clone(), meta_only, x.to_string()));
            }
            true
        }
        (Term::Con(c, fa), Term::Con(d, qa)) => {
            if c != d || fa.len() != qa.len() {
                return false;
            }
            for (i, (f, q)) in fa.iter().zip(qa).enumerate() {
                path.push(i);
                let ok = walk(f, q, declared, path, open);
                path.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        (Term::Hole, Term::Hole) => true,
        (Term::Str(a), Term::Str(b)) => a == b,
        (Term::Bind(_, fb), Term::Bind(_, qb)) => {
            path.push(0);
            let ok = walk(fb, qb, declared, path, open);
            path.pop();
            ok
        }
        (
            Term::Subst {
                body: fb,
                replacement: fr,
                ..
            },
            Term::Subst {
                body: qb,
                replacement: qr,
                ..
            },
        ) => {
            path.push(0);
            let ok = walk(fb, qb, declared, path, open);
            path.pop();
            if !ok {
                return false;
            }
            path.push(1);
            let ok = walk(fr, qr, declared, path, open);
            path.pop();
            ok
        }
        _ => false,
    }
}

fn replace(form: &Term, path: &[usize], with: &Term) -> Term {
    let Some((&i, rest)) = path.split_first() else {
        return with.clone();
    };
    match form {
        Term::Con(c, args) => {
            let mut args = args.clone();
            args[i] = replace(&args[i], rest, with);
            Term::Con(c.clone(), args)
        }
        Term::Bind(x, body) => Term::Bind(x.clone(), Box::new(replace(body, rest, with))),
        Term::Subst { body, replacement, var } => {
            let (mut b, mut r) = ((**body).clone(), (**replacement).clone());
            if i == 0 {
                b = replace(&b, rest, with);
            } else {
                r = replace(&r, rest, with);
            }
            Term::subst(b, r, var.clone())
        }
        _ => unreachable!("paths only lead through compound terms"),
    }
}

pub fn oracle_derives(grammar: &[GrammarRule], mv: &str, query: &Term) -> bool {
    let declared: Vec<&str> = grammar.iter().map(|g| g.metavar.as_str()).collect();
    let mut queue = VecDeque::from([Term::meta(mv)]);
    let mut seen = HashSet::new();
    seen.insert(Term::meta(mv));
    while let Some(form) = queue.pop_front() {
        match status(&form, query, &declared) {
            Status::Dead => {}
            Status::Done => return true,
            Status::Open(path, meta_only, x) => {
                let Some(rule) = grammar.iter().find(|g| g.metavar == x) else {
                    continue;
                };
                for p in &rule.productions {
                    if meta_only && !matches!(p, Term::Meta(_)) {
                        continue;
                    }
                    let next = replace(&form, &path, p);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    false
}

const METAVARS: [&str; 5] = ["A", "B", "C", "D", "K"];
const ATOMS: [&str; 3] = ["a", "b", "c"];

fn random_leaf(rng: &mut impl Rng, mvs: &[&str]) -> Term {
    match rng.gen_range(0..6) {
        0..=2 => Term::meta(*mvs.choose(rng).unwrap()),
        3 => Term::atom(*ATOMS.choose(rng).unwrap()),
        4 => Term::Hole,
        _ => Term::Str("s".into()),
    }
}

fn random_production(rng: &mut impl Rng, mvs: &[&str], depth: usize) -> Term {
    if depth == 0 {
        return random_leaf(rng, mvs);
    }
    match rng.gen_range(0..8) {
        0 | 1 => Term::meta(*mvs.choose(rng).unwrap()),
        2 => Term::atom(*ATOMS.choose(rng).unwrap()),
        3 => Term::con("f", vec![random_production(rng, mvs, depth - 1)]),
        4 | 5 => Term::con(
            "g",
            vec![
                random_production(rng, mvs, depth - 1),
                random_production(rng, mvs, depth - 1),
            ],
        ),
        6 => Term::con("lam", vec![Term::bind("x", random_production(rng, mvs, depth - 1))]),
        _ => random_leaf(rng, mvs),
    }
}

/// A grammar with at most 5 categories of at most 6 productions each.
pub fn random_grammar(rng: &mut impl Rng) -> Vec<GrammarRule> {
    let k = rng.gen_range(1..=5);
    let mvs = &METAVARS[..k];
    mvs.iter()
        .map(|mv| GrammarRule {
            category: format!("Cat{mv}"),
            metavar: mv.to_string(),
            productions: (0..rng.gen_range(1..=6))
                .map(|_| random_production(rng, mvs, 2))
                .collect(),
        })
        .collect()
}

fn occurrence(rng: &mut impl Rng, mv: &str) -> Term {
    match rng.gen_range(0..4) {
        0 => Term::meta(format!("{mv}1")),
        1 => Term::meta(format!("{mv}'")),
        _ => Term::meta(mv),
    }
}

/// A term reachable from `mv`, cut off at random depth by metavariable
/// occurrences.
fn sample(rng: &mut impl Rng, grammar: &[GrammarRule], mv: &str, depth: usize) -> Term {
    let rule = grammar.iter().find(|g| g.metavar == mv).unwrap();
    let p = rule.productions.choose(rng).unwrap().clone();
    instantiate(rng, grammar, &p, depth)
}

fn instantiate(rng: &mut impl Rng, grammar: &[GrammarRule], p: &Term, depth: usize) -> Term {
    match p {
        Term::Meta(y) => {
            if depth == 0 || rng.gen_bool(0.3) {
                occurrence(rng, y)
            } else {
                sample(rng, grammar, y, depth - 1)
            }
        }
        Term::Con(c, args) => Term::Con(
            c.clone(),
            args.iter().map(|a| instantiate(rng, grammar, a, depth)).collect(),
        ),
        Term::Bind(_, body) => {
            let x = if rng.gen_bool(0.5) { "x" } else { "y" };
            Term::bind(x, instantiate(rng, grammar, body, depth))
        }
        other => other.clone(),
    }
}

fn random_query(rng: &mut impl Rng, mvs: &[&str], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => {
                let mv = *mvs.choose(rng).unwrap();
                occurrence(rng, mv)
            }
            _ => random_leaf(rng, mvs),
        };
    }
    random_production(rng, mvs, depth.min(3))
}

/// Query terms of depth at most 4: half sampled from the grammar, half
/// arbitrary.
pub fn random_queries(rng: &mut impl Rng, grammar: &[GrammarRule], n: usize) -> Vec<(String, Term)> {
    let mvs: Vec<&str> = grammar.iter().map(|g| g.metavar.as_str()).collect();
    (0..n)
        .map(|i| {
            let mv = mvs.choose(rng).unwrap().to_string();
            let t = if i % 2 == 0 {
                let from = mvs.choose(rng).unwrap();
                sample(rng, grammar, from, 3)
            } else {
                random_query(rng, &mvs, 3)
            };
            (mv, t)
        })
        .collect()
}
