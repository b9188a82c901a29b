//! Surface syntax for assertions:
//!
//! ```text
//! P ::= true | atom | ~P | P /\ P | (P)
//! ```
//!
//! `¬` and `∧` are accepted as alternatives. Rule names may be written with
//! or without their brackets.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Assertion, Atom};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("assertion, column {column}: {message}")]
pub struct AssertionParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    And,
    Not,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::And => "`/\\`".into(),
        Tok::Not => "`~`".into(),
        Tok::End => "end of input".into(),
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '-')
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, AssertionParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '~' | '¬' => Some(Tok::Not),
            '∧' => Some(Tok::And),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'\\') {
            out.push((Tok::And, col));
            i += 2;
        } else if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), col));
        } else {
            return Err(AssertionParseError {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AssertionParseError> {
        Err(AssertionParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), AssertionParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(&want), describe(self.peek())))
        }
    }

    fn conjunction(&mut self) -> Result<Assertion, AssertionParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Assertion::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Assertion, AssertionParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Assertion::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.conjunction()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Word(w) if w == "true" => {
                self.bump();
                Ok(Assertion::True)
            }
            Tok::Word(w) => {
                self.bump();
                Ok(Assertion::Atom(self.atom(&w)?))
            }
            other => self.err(format!("expected an assertion, found {}", describe(&other))),
        }
    }

    fn word(&mut self, what: &str) -> Result<String, AssertionParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            other => self.err(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn rule_name(&mut self) -> Result<String, AssertionParseError> {
        if *self.peek() == Tok::LBracket {
            self.bump();
            let name = self.word("a rule name")?;
            self.expect(Tok::RBracket)?;
            Ok(name)
        } else {
            self.word("a rule name")
        }
    }

    fn number(&mut self) -> Result<u32, AssertionParseError> {
        let col = self.column();
        let w = self.word("a position")?;
        w.parse::<u32>().map_err(|_| AssertionParseError {
            column: col,
            message: format!("`{w}` is not a position"),
        })
    }

    fn positions(&mut self) -> Result<BTreeSet<u32>, AssertionParseError> {
        self.expect(Tok::LBrace)?;
        let mut set = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                set.insert(self.number()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(set)
    }

    fn comma(&mut self) -> Result<(), AssertionParseError> {
        self.expect(Tok::Comma)
    }

    fn atom(&mut self, form: &str) -> Result<Atom, AssertionParseError> {
        self.expect(Tok::LParen)?;
        let atom = match form {
            "ctx" => {
                let metavar = self.word("a metavariable")?;
                self.comma()?;
                let constructor = self.word("a constructor")?;
                self.comma()?;
                let positions = self.positions()?;
                Atom::Ctx {
                    metavar,
                    constructor,
                    positions,
                }
            }
            "ctx-compliant" => Atom::CtxCompliant {
                rule: self.rule_name()?,
            },
            "error-handler" => {
                let constructor = self.word("a constructor")?;
                self.comma()?;
                let position = self.number()?;
                Atom::ErrorHandler { constructor, position }
            }
            "effectful" => Atom::Effectful {
                state_position: self.number()?,
            },
            "no-dupli-ef" => Atom::NoDupliEf {
                rule: self.rule_name()?,
            },
            "contravariant" => {
                let constructor = self.word("a constructor")?;
                self.comma()?;
                let positions = self.positions()?;
                Atom::Contravariant { constructor, positions }
            }
            "contra-resp" => {
                let rule = self.rule_name()?;
                self.comma()?;
                let constructor = self.word("a constructor")?;
                Atom::ContraResp { rule, constructor }
            }
            other => return self.err(format!("unknown assertion form `{other}`")),
        };
        self.expect(Tok::RParen)?;
        Ok(atom)
    }
}

pub fn parse_assertion(text: &str) -> Result<Assertion, AssertionParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let a = p.conjunction()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after assertion", describe(p.peek())));
    }
    Ok(a)
}
