use super::parser::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    RuleHeader(String),
    Directive(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Slash,
    Comma,
    Colon,
    Pipe,
    DefEq,
    Turnstile,
    Arrow,
    SubtypeOp,
    Provided,
    Conj,
    Dot,
    Newline,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    /// No whitespace separates this token from the previous one.
    pub glued: bool,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_rule_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let mut glued = false;
    let mut at_line_start = true;

    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {{
            out.push(Token {
                tok: $tok,
                line: $l,
                column: $c,
                glued,
            });
            glued = true;
            at_line_start = false;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                if !matches!(out.last(), Some(Token { tok: Tok::Newline, .. })) && !out.is_empty() {
                    out.push(Token {
                        tok: Tok::Newline,
                        line: l0,
                        column: c0,
                        glued,
                    });
                }
                i += 1;
                line += 1;
                col = 1;
                glued = false;
                at_line_start = true;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                glued = false;
            }
            '\\' => {
                // line continuation: the rest of the line must be blank
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], ' ' | '\t' | '\r') {
                    j += 1;
                }
                if j < chars.len() && chars[j] != '\n' {
                    return Err(ParseError::new(l0, c0, "`\\` must end a line"));
                }
                col += j - i;
                i = j;
                if i < chars.len() {
                    i += 1;
                    line += 1;
                    col = 1;
                }
                glued = false;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'\\') => {
                push!(Tok::Conj, l0, c0);
                i += 2;
                col += 2;
            }
            '/' => {
                push!(Tok::Slash, l0, c0);
                i += 1;
                col += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(ParseError::new(l0, c0, "unterminated string literal")),
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('"') => '"',
                                Some('\\') => '\\',
                                _ => return Err(ParseError::new(line, col, "unknown escape in string literal")),
                            };
                            s.push(esc);
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                push!(Tok::Str(s), l0, c0);
            }
            '[' if at_line_start => {
                let mut j = i + 1;
                while j < chars.len() && is_rule_name_char(chars[j]) {
                    j += 1;
                }
                if j > i + 1 && chars.get(j) == Some(&']') {
                    let name: String = chars[i + 1..j].iter().collect();
                    push!(Tok::RuleHeader(name), l0, c0);
                    col += j + 1 - i;
                    i = j + 1;
                } else {
                    push!(Tok::LBracket, l0, c0);
                    i += 1;
                    col += 1;
                }
            }
            '[' => {
                push!(Tok::LBracket, l0, c0);
                i += 1;
                col += 1;
            }
            ']' => {
                push!(Tok::RBracket, l0, c0);
                i += 1;
                col += 1;
            }
            '(' => {
                push!(Tok::LParen, l0, c0);
                i += 1;
                col += 1;
            }
            ')' => {
                push!(Tok::RParen, l0, c0);
                i += 1;
                col += 1;
            }
            ',' => {
                push!(Tok::Comma, l0, c0);
                i += 1;
                col += 1;
            }
            '.' => {
                push!(Tok::Dot, l0, c0);
                i += 1;
                col += 1;
            }
            ':' if chars.get(i + 1) == Some(&':') && chars.get(i + 2) == Some(&'=') => {
                push!(Tok::DefEq, l0, c0);
                i += 3;
                col += 3;
            }
            ':' => {
                push!(Tok::Colon, l0, c0);
                i += 1;
                col += 1;
            }
            '|' if chars.get(i + 1) == Some(&'-') => {
                push!(Tok::Turnstile, l0, c0);
                i += 2;
                col += 2;
            }
            '|' => {
                push!(Tok::Pipe, l0, c0);
                i += 1;
                col += 1;
            }
            '-' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push!(Tok::Arrow, l0, c0);
                i += 3;
                col += 3;
            }
            '<' if chars.get(i + 1) == Some(&':') => {
                push!(Tok::SubtypeOp, l0, c0);
                i += 2;
                col += 2;
            }
            '<' if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'=') => {
                push!(Tok::Provided, l0, c0);
                i += 3;
                col += 3;
            }
            '%' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().collect();
                if name.is_empty() {
                    return Err(ParseError::new(l0, c0, "expected a directive name after `%`"));
                }
                push!(Tok::Directive(name), l0, c0);
                col += j - i;
                i = j;
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                while j < chars.len() && chars[j] == '\'' {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                push!(Tok::Ident(name), l0, c0);
                col += j - i;
                i = j;
            }
            other => {
                return Err(ParseError::new(l0, c0, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}
