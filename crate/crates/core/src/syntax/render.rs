//! Printing of terms, formulae and whole language definitions in `.lan`
//! surface syntax.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::lexer::{is_ident_char, is_ident_start};
use super::{has_metavar_suffix, resolve_name, Formula, LanguageDef, Term, ENV_EXTEND};

/// Renders a term. With `declared` metavariables, nullary constructors whose
/// bare spelling would read back as a metavariable are parenthesized.
pub fn render_term(t: &Term, declared: Option<&BTreeSet<String>>) -> String {
    let mut out = String::new();
    write_term(&mut out, t, declared);
    out
}

fn bare_is_safe(name: &str, declared: Option<&BTreeSet<String>>) -> bool {
    let mut chars = name.chars();
    let well_formed =
        chars.next().is_some_and(is_ident_start) && name.trim_end_matches('\'').chars().all(is_ident_char);
    if !well_formed || has_metavar_suffix(name) {
        return false;
    }
    match declared {
        Some(d) => resolve_name(name, |s| d.contains(s)).is_none(),
        None => true,
    }
}

fn write_term(out: &mut String, t: &Term, declared: Option<&BTreeSet<String>>) {
    match t {
        Term::Meta(name) => out.push_str(name),
        Term::Con(c, args) if args.is_empty() => {
            if bare_is_safe(c, declared) {
                out.push_str(c);
            } else {
                let _ = write!(out, "({c})");
            }
        }
        Term::Con(c, args) => {
            out.push('(');
            out.push_str(c);
            for a in args {
                out.push(' ');
                write_term(out, a, declared);
            }
            out.push(')');
        }
        Term::Bind(x, body) => {
            let _ = write!(out, "({x})");
            write_term(out, body, declared);
        }
        Term::Subst { body, replacement, var } => {
            write_term(out, body, declared);
            out.push('[');
            write_term(out, replacement, declared);
            let _ = write!(out, "/{var}]");
        }
        Term::Hole => out.push_str("[]"),
        Term::Str(s) => {
            out.push('"');
            for ch in s.chars() {
                match ch {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
    }
}

fn write_env(out: &mut String, env: &Term, declared: Option<&BTreeSet<String>>) {
    match env {
        Term::Con(c, args) if c == ENV_EXTEND && args.len() == 3 => {
            write_env(out, &args[0], declared);
            out.push_str(", ");
            write_term(out, &args[1], declared);
            out.push_str(" : ");
            write_term(out, &args[2], declared);
        }
        other => write_term(out, other, declared),
    }
}

pub fn render_formula(f: &Formula, declared: Option<&BTreeSet<String>>) -> String {
    let mut out = String::new();
    match f {
        Formula::Typing { env, subject, ty } => {
            write_env(&mut out, env, declared);
            out.push_str(" |- ");
            write_term(&mut out, subject, declared);
            out.push_str(" : ");
            write_term(&mut out, ty, declared);
        }
        Formula::Subtype { lhs, rhs } => {
            write_term(&mut out, lhs, declared);
            out.push_str(" <: ");
            write_term(&mut out, rhs, declared);
        }
        Formula::Step { source, target } => {
            for (i, cfg) in [source, target].into_iter().enumerate() {
                if i == 1 {
                    out.push_str(" --> ");
                }
                write_term(&mut out, &cfg.subject, declared);
                for s in &cfg.state {
                    out.push_str(", ");
                    write_term(&mut out, s, declared);
                }
            }
        }
        Formula::Pred { name, args } => {
            out.push('(');
            out.push_str(name);
            for a in args {
                out.push(' ');
                write_term(&mut out, a, declared);
            }
            out.push(')');
        }
    }
    out
}

/// Prints a language definition in `.lan` syntax.
pub fn render_language(lang: &LanguageDef) -> String {
    let declared: BTreeSet<String> = lang.grammar.iter().map(|g| g.metavar.clone()).collect();
    let d = Some(&declared);
    let mut out = String::new();
    for g in &lang.grammar {
        let prods: Vec<String> = g.productions.iter().map(|p| render_term(p, d)).collect();
        let _ = writeln!(out, "{} {} ::= {}", g.category, g.metavar, prods.join(" | "));
    }
    if !lang.ineffectual.is_empty() {
        let names: Vec<&str> = lang.ineffectual.iter().map(String::as_str).collect();
        let _ = writeln!(out, "\n%ineffectual {}", names.join(" "));
    }
    for r in &lang.rules {
        let _ = write!(out, "\n[{}]\n{}", r.name, render_formula(&r.conclusion, d));
        if !r.premises.is_empty() {
            let prems: Vec<String> = r.premises.iter().map(|p| render_formula(p, d)).collect();
            let _ = write!(out, " <== {}", prems.join(" /\\ "));
        }
        out.push_str(".\n");
    }
    out
}
