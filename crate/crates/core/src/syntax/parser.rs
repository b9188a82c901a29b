//! Parser for the `.lan` textual format.
//!
//! ```text
//! Type T ::= bool | (arrow T T)
//! %ineffectual v er
//!
//! [BETA]
//! (app (abs T (x)E) V) --> E[V/x] <== value V.
//! ```
//!
//! A bare identifier is a metavariable occurrence when it resolves to a
//! declared metavariable (after stripping digit and prime suffixes) or
//! carries such a suffix; otherwise it is a nullary constructor.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{tokenize, Tok, Token};
use super::{
    has_metavar_suffix, resolve_name, Config, Formula, GrammarRule, InferenceRule, LanguageDef, Term, ENV_EXTEND,
};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// Parses and validates a `.lan` document.
pub fn parse_language(source: &str) -> Result<LanguageDef, Error> {
    let lang = parse_language_unchecked(source)?;
    let report = super::validate_language(&lang);
    if report.is_empty() {
        Ok(lang)
    } else {
        Err(Error::Validation(report))
    }
}

/// Parses a `.lan` document without running validation.
pub fn parse_language_unchecked(source: &str) -> Result<LanguageDef, ParseError> {
    let tokens = tokenize(source)?;
    let declared = declared_metavars(&tokens);
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        skip_newlines: false,
        declared: &declared,
    };
    p.document()
}

/// Parses a single term in the context of a set of declared metavariables.
pub fn parse_term(source: &str, declared: &BTreeSet<String>) -> Result<Term, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        skip_newlines: true,
        declared,
    };
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

fn declared_metavars(tokens: &[Token]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for w in tokens.windows(3) {
        if let (Tok::Ident(_), Tok::Ident(mv), Tok::DefEq) = (&w[0].tok, &w[1].tok, &w[2].tok) {
            out.insert(mv.clone());
        }
    }
    out
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    skip_newlines: bool,
    declared: &'a BTreeSet<String>,
}

/// A parsed term together with its raw spelling when it was a bare identifier.
struct Parsed {
    term: Term,
    bare: Option<String>,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::RuleHeader(s) => format!("rule header `[{s}]`"),
        Tok::Directive(s) => format!("directive `%{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::DefEq => "`::=`".into(),
        Tok::Turnstile => "`|-`".into(),
        Tok::Arrow => "`-->`".into(),
        Tok::SubtypeOp => "`<:`".into(),
        Tok::Provided => "`<==`".into(),
        Tok::Conj => "`/\\`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Newline => "end of line".into(),
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        if self.skip_newlines {
            while matches!(self.tokens.get(self.pos), Some(Token { tok: Tok::Newline, .. })) {
                self.pos += 1;
            }
        }
    }

    fn peek_token(&mut self) -> Option<&'a Token> {
        self.skip_ws();
        self.tokens.get(self.pos)
    }

    fn peek(&mut self) -> Option<&'a Tok> {
        self.peek_token().map(|t| &t.tok)
    }

    fn peek_at(&mut self, offset: usize) -> Option<&'a Tok> {
        self.skip_ws();
        let mut i = self.pos;
        let mut left = offset;
        loop {
            let t = self.tokens.get(i)?;
            if self.skip_newlines && t.tok == Tok::Newline {
                i += 1;
                continue;
            }
            if left == 0 {
                return Some(&t.tok);
            }
            left -= 1;
            i += 1;
        }
    }

    fn next(&mut self) -> Option<&'a Token> {
        self.skip_ws();
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&mut self, message: impl Into<String>) -> ParseError {
        let message = message.into();
        match self.peek_token() {
            Some(t) => ParseError::new(t.line, t.column, format!("{message}, found {}", describe(&t.tok))),
            None => {
                let (line, column) = self.tokens.last().map(|t| (t.line, t.column + 1)).unwrap_or((1, 1));
                ParseError::new(line, column, format!("{message}, found end of input"))
            }
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<&'a Token, ParseError> {
        if self.peek() == Some(want) {
            Ok(self.next().unwrap())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.error_here("expected end of input"))
        } else {
            Ok(())
        }
    }

    fn document(&mut self) -> Result<LanguageDef, ParseError> {
        let mut lang = LanguageDef::default();
        loop {
            self.skip_newlines = true;
            let Some(tok) = self.peek() else { break };
            self.skip_newlines = false;
            match tok {
                Tok::Directive(name) => {
                    let name = name.clone();
                    self.next();
                    if name != "ineffectual" {
                        let t = &self.tokens[self.pos - 1];
                        return Err(ParseError::new(
                            t.line,
                            t.column,
                            format!("unknown directive `%{name}`"),
                        ));
                    }
                    while let Some(Tok::Ident(mv)) = self.peek() {
                        lang.ineffectual.insert(mv.clone());
                        self.next();
                    }
                    self.end_of_line()?;
                }
                Tok::RuleHeader(name) => {
                    let name = name.clone();
                    self.next();
                    self.skip_newlines = true;
                    let rule = self.rule_body(name)?;
                    lang.rules.push(rule);
                }
                Tok::Ident(_) if self.peek_at(2) == Some(&Tok::DefEq) => {
                    lang.grammar.push(self.grammar_rule()?);
                }
                _ => {
                    return Err(self.error_here("expected a grammar rule, a `[RULE]` header or a directive"));
                }
            }
        }
        if lang.grammar.is_empty() {
            let (line, column) = self.tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
            return Err(ParseError::new(
                line,
                column,
                "a language definition needs at least one grammar rule",
            ));
        }
        Ok(lang)
    }

    fn end_of_line(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok::Newline) => {
                self.next();
                Ok(())
            }
            Some(_) => Err(self.error_here("expected end of line")),
        }
    }

    fn grammar_rule(&mut self) -> Result<GrammarRule, ParseError> {
        let category = self.expect_ident("a category name")?;
        let metavar = self.expect_ident("a metavariable")?;
        self.expect(&Tok::DefEq, "`::=`")?;
        let mut productions = vec![self.term()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.next();
            productions.push(self.term()?);
        }
        self.end_of_line()?;
        Ok(GrammarRule {
            category,
            metavar,
            productions,
        })
    }

    fn rule_body(&mut self, name: String) -> Result<InferenceRule, ParseError> {
        let conclusion = self.formula()?;
        let mut premises = Vec::new();
        if self.peek() == Some(&Tok::Provided) {
            self.next();
            premises.push(self.formula()?);
            while self.peek() == Some(&Tok::Conj) {
                self.next();
                premises.push(self.formula()?);
            }
        }
        self.expect(&Tok::Dot, "`.` to end the rule")?;
        Ok(InferenceRule {
            name,
            premises,
            conclusion,
        })
    }

    fn starts_term(tok: Option<&Tok>) -> bool {
        matches!(tok, Some(Tok::LParen | Tok::Ident(_) | Tok::LBracket | Tok::Str(_)))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let first = self.parsed_term()?;
        if Self::starts_term(self.peek()) {
            // `pred t1 ... tn`
            let Some(name) = first.bare else {
                return Err(self.error_here("expected a formula operator"));
            };
            let mut args = Vec::new();
            while Self::starts_term(self.peek()) {
                args.push(self.term()?);
            }
            return reserved_or_pred(name, args).map_err(|m| self.error_here(m));
        }

        // `, item` continuations: environment bindings or state components
        let mut items: Vec<(Term, Option<Term>)> = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            let t = self.term()?;
            let ty = if self.peek() == Some(&Tok::Colon) {
                self.next();
                Some(self.term()?)
            } else {
                None
            };
            items.push((t, ty));
        }

        match self.peek() {
            Some(Tok::Turnstile) => {
                self.next();
                let mut env = first.term;
                for (x, ty) in items {
                    let Some(ty) = ty else {
                        return Err(self.error_here("environment bindings need the form `x : T`"));
                    };
                    env = Term::con(ENV_EXTEND, vec![env, x, ty]);
                }
                let subject = self.term()?;
                self.expect(&Tok::Colon, "`:` in typing formula")?;
                let ty = self.term()?;
                Ok(Formula::Typing { env, subject, ty })
            }
            Some(Tok::Arrow) => {
                self.next();
                let mut state = Vec::new();
                for (t, ty) in items {
                    if ty.is_some() {
                        return Err(self.error_here("unexpected `:` in a reduction configuration"));
                    }
                    state.push(t);
                }
                let source = Config::new(first.term, state);
                let subject = self.term()?;
                let mut tstate = Vec::new();
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    tstate.push(self.term()?);
                }
                Ok(Formula::Step {
                    source,
                    target: Config::new(subject, tstate),
                })
            }
            Some(Tok::SubtypeOp) => {
                if !items.is_empty() {
                    return Err(self.error_here("unexpected `,` before `<:`"));
                }
                self.next();
                let rhs = self.term()?;
                Ok(Formula::Subtype { lhs: first.term, rhs })
            }
            _ => {
                if !items.is_empty() {
                    return Err(self.error_here("expected `|-` or `-->`"));
                }
                match first.term {
                    Term::Con(name, args) if first.bare.is_none() && !args.is_empty() => {
                        reserved_or_pred(name, args).map_err(|m| self.error_here(m))
                    }
                    _ => Err(self.error_here("expected a formula")),
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        Ok(self.parsed_term()?.term)
    }

    fn parsed_term(&mut self) -> Result<Parsed, ParseError> {
        let mut parsed = self.atom()?;
        // postfix substitutions must be glued: `E[V/x]`
        while let Some(t) = self.peek_token() {
            if t.tok != Tok::LBracket || !t.glued {
                break;
            }
            self.next();
            let replacement = self.term()?;
            self.expect(&Tok::Slash, "`/` in substitution")?;
            let var = self.expect_ident("a substitution variable")?;
            self.expect(&Tok::RBracket, "`]` closing substitution")?;
            parsed = Parsed {
                term: Term::subst(parsed.term, replacement, var),
                bare: None,
            };
        }
        Ok(parsed)
    }

    fn atom(&mut self) -> Result<Parsed, ParseError> {
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expected a term"));
        };
        match tok {
            Tok::Ident(name) => {
                let name = name.clone();
                self.next();
                Ok(Parsed {
                    term: self.bare_identifier(&name),
                    bare: Some(name),
                })
            }
            Tok::Str(s) => {
                let s = s.clone();
                self.next();
                Ok(Parsed {
                    term: Term::Str(s),
                    bare: None,
                })
            }
            Tok::LBracket => {
                self.next();
                match self.tokens.get(self.pos) {
                    Some(Token {
                        tok: Tok::RBracket,
                        glued: true,
                        ..
                    }) => {
                        self.pos += 1;
                        Ok(Parsed {
                            term: Term::Hole,
                            bare: None,
                        })
                    }
                    _ => Err(self.error_here("expected `]` to close the hole `[]`")),
                }
            }
            Tok::LParen => {
                self.next();
                let head = self.expect_ident("a constructor name or bound variable")?;
                if self.peek() == Some(&Tok::RParen) {
                    self.next();
                    // `(x)t` binds when the body follows without whitespace
                    if let Some(t) = self.tokens.get(self.pos) {
                        let hole_next = t.tok == Tok::LBracket
                            && self
                                .tokens
                                .get(self.pos + 1)
                                .is_some_and(|n| n.tok == Tok::RBracket && n.glued);
                        if t.glued && (hole_next || matches!(t.tok, Tok::LParen | Tok::Ident(_) | Tok::Str(_))) {
                            let body = self.term()?;
                            return Ok(Parsed {
                                term: Term::bind(head, body),
                                bare: None,
                            });
                        }
                    }
                    return Ok(Parsed {
                        term: Term::atom(head),
                        bare: None,
                    });
                }
                let mut args = Vec::new();
                while self.peek() != Some(&Tok::RParen) {
                    if !Self::starts_term(self.peek()) {
                        return Err(self.error_here("expected a term or `)`"));
                    }
                    args.push(self.term()?);
                }
                self.next();
                Ok(Parsed {
                    term: Term::con(head, args),
                    bare: None,
                })
            }
            _ => Err(self.error_here("expected a term")),
        }
    }

    fn bare_identifier(&self, name: &str) -> Term {
        if resolve_name(name, |s| self.declared.contains(s)).is_some() || has_metavar_suffix(name) {
            Term::meta(name)
        } else {
            Term::atom(name)
        }
    }
}

fn reserved_or_pred(name: String, mut args: Vec<Term>) -> Result<Formula, String> {
    if args.is_empty() {
        return Err(format!("predicate `{name}` needs at least one argument"));
    }
    match name.as_str() {
        "typing" => {
            if args.len() != 3 {
                return Err("`typing` takes three arguments".into());
            }
            let ty = args.pop().unwrap();
            let subject = args.pop().unwrap();
            let env = args.pop().unwrap();
            Ok(Formula::Typing { env, subject, ty })
        }
        "subtype" => {
            if args.len() != 2 {
                return Err("`subtype` takes two arguments".into());
            }
            let rhs = args.pop().unwrap();
            let lhs = args.pop().unwrap();
            Ok(Formula::Subtype { lhs, rhs })
        }
        "step" => {
            if args.len() != 2 {
                return Err("`step` takes two arguments".into());
            }
            let target = args.pop().unwrap();
            let source = args.pop().unwrap();
            Ok(Formula::Step {
                source: Config::new(source, Vec::new()),
                target: Config::new(target, Vec::new()),
            })
        }
        _ => Ok(Formula::Pred { name, args }),
    }
}
