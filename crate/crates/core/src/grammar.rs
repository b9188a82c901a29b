//! Grammar queries: metavariable resolution, the derivation relation
//! `X =>*_G t`, and the argument positions behind `ctx` assertions.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{resolve_name, top_constructor, GrammarRule, LanguageDef, NotAConApp, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` does not resolve to a declared metavariable")]
pub struct UnresolvedMetaVar(pub String);

/// Category names with reserved roles.
const EVAL_CTX_NAMES: [&str; 2] = ["EvalCtx", "Context"];
const ERROR_CTX_NAMES: [&str; 2] = ["ErrCtx", "ErrorCtx"];
const VALUE_NAMES: [&str; 1] = ["Value"];
const ERROR_NAMES: [&str; 1] = ["Error"];

/// Query-ready view of a grammar.
#[derive(Clone, Debug)]
pub struct CategoryIndex {
    rules: Vec<GrammarRule>,
    by_metavar: HashMap<String, usize>,
    by_category: HashMap<String, usize>,
}

impl CategoryIndex {
    pub fn new(grammar: &[GrammarRule]) -> Self {
        let mut by_metavar = HashMap::new();
        let mut by_category = HashMap::new();
        for (i, g) in grammar.iter().enumerate() {
            by_metavar.entry(g.metavar.clone()).or_insert(i);
            by_category.entry(g.category.clone()).or_insert(i);
        }
        CategoryIndex {
            rules: grammar.to_vec(),
            by_metavar,
            by_category,
        }
    }

    pub fn for_language(lang: &LanguageDef) -> Self {
        Self::new(&lang.grammar)
    }

    pub fn rule_for_metavar(&self, mv: &str) -> Option<&GrammarRule> {
        self.by_metavar.get(mv).map(|&i| &self.rules[i])
    }

    pub fn rule_for_category(&self, category: &str) -> Option<&GrammarRule> {
        self.by_category.get(category).map(|&i| &self.rules[i])
    }

    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    fn role(&self, names: &[&str]) -> Option<&GrammarRule> {
        names.iter().find_map(|n| self.rule_for_category(n))
    }

    pub fn eval_ctx(&self) -> Option<&GrammarRule> {
        self.role(&EVAL_CTX_NAMES)
    }

    pub fn error_ctx(&self) -> Option<&GrammarRule> {
        self.role(&ERROR_CTX_NAMES)
    }

    pub fn value_metavar(&self) -> Option<&str> {
        self.role(&VALUE_NAMES).map(|g| g.metavar.as_str())
    }

    pub fn error_metavar(&self) -> Option<&str> {
        self.role(&ERROR_NAMES).map(|g| g.metavar.as_str())
    }

    /// Maps an occurrence such as `e2` or `T1'` to its declared metavariable.
    pub fn resolve_metavar<'a>(&'a self, occurrence: &'a str) -> Result<&'a str, UnresolvedMetaVar> {
        resolve_name(occurrence, |s| self.by_metavar.contains_key(s))
            .ok_or_else(|| UnresolvedMetaVar(occurrence.to_string()))
    }

    fn resolves_to(&self, occurrence: &str, mv: &str) -> bool {
        self.resolve_metavar(occurrence).is_ok_and(|r| r == mv)
    }

    /// `mv =>*_G t`.
    pub fn derives(&self, mv: &str, t: &Term) -> bool {
        let mut search = DeriveSearch::default();
        self.derives_in(&mut search, mv, t)
    }

    fn derives_in(&self, search: &mut DeriveSearch, mv: &str, t: &Term) -> bool {
        if let Term::Meta(occ) = t {
            if self.resolves_to(occ, mv) {
                return true;
            }
        }
        let Some(rule) = self.rule_for_metavar(mv) else {
            return false;
        };
        let key = (mv.to_string(), t.clone());
        if let Some(&known) = search.memo.get(&key) {
            return known;
        }
        if search.active.contains(&key) {
            // a unit-production cycle back to the same goal never helps
            search.cycle_hit = true;
            return false;
        }
        search.active.insert(key.clone());
        let outer_hit = std::mem::replace(&mut search.cycle_hit, false);
        let found = rule.productions.iter().any(|p| self.matches(search, p, t));
        search.active.remove(&key);
        // negative answers reached through an open cycle are provisional
        if found || !search.cycle_hit {
            search.memo.insert(key, found);
        }
        search.cycle_hit |= outer_hit;
        found
    }

    /// Whether production pattern `p` derives `t`.
    fn matches(&self, search: &mut DeriveSearch, p: &Term, t: &Term) -> bool {
        match (p, t) {
            (Term::Meta(occ), _) => match self.resolve_metavar(occ) {
                Ok(y) => {
                    let y = y.to_string();
                    self.derives_in(search, &y, t)
                }
                Err(_) => false,
            },
            (Term::Con(c, ps), Term::Con(d, ts)) => {
                c == d && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| self.matches(search, p, t))
            }
            (Term::Hole, Term::Hole) => true,
            (Term::Str(a), Term::Str(b)) => a == b,
            (Term::Bind(_, pb), Term::Bind(_, tb)) => self.matches(search, pb, tb),
            (
                Term::Subst {
                    body: pb,
                    replacement: pr,
                    ..
                },
                Term::Subst {
                    body: tb,
                    replacement: tr,
                    ..
                },
            ) => self.matches(search, pb, tb) && self.matches(search, pr, tr),
            _ => false,
        }
    }

    /// Whether some metavariable in `mvs` derives `t`.
    pub fn derivable_from_any<'a, I>(&self, mvs: I, t: &Term) -> bool
    where
        I: IntoIterator<Item = &'a str>,
    {
        mvs.into_iter().any(|mv| self.derives(mv, t))
    }

    /// 1-based positions of arguments of `t` that are occurrences of `mv`.
    pub fn get_args_positions(&self, t: &Term, mv: &str) -> Result<BTreeSet<u32>, NotAConApp> {
        match t {
            Term::Con(_, args) => Ok(args
                .iter()
                .enumerate()
                .filter(|(_, a)| matches!(a, Term::Meta(occ) if self.resolves_to(occ, mv)))
                .map(|(i, _)| i as u32 + 1)
                .collect()),
            other => Err(NotAConApp(other.to_string())),
        }
    }

    /// Union of the self-recursive argument positions over every production
    /// of `g` whose top constructor is `c`.
    pub fn inductive_positions(&self, g: &GrammarRule, c: &str) -> BTreeSet<u32> {
        g.productions
            .iter()
            .filter(|p| top_constructor(p) == Some(c))
            .flat_map(|p| self.get_args_positions(p, &g.metavar).unwrap_or_default())
            .collect()
    }
}

#[derive(Default)]
struct DeriveSearch {
    memo: HashMap<(String, Term), bool>,
    active: HashSet<(String, Term)>,
    cycle_hit: bool,
}
