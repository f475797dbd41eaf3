//! Tokens for `.sig`, `.mod` and `.thm` files.

use std::fmt;

/// Source location (1-based line and column, end exclusive). Spans are
/// ignored by equality so that parse trees compare structurally.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span {
            line: self.line,
            col: self.col,
            end_line: other.end_line,
            end_col: other.end_col,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    ColonEq,
    ColonDash,
    Arrow,
    DArrow,
    Amp,
    Cons,
    And,
    Or,
    Eq,
    Turnstile,
    At(u32),
    Star(u32),
    Backslash,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "{s}"),
            Tok::Num(n) => return write!(f, "{n}"),
            Tok::Str(s) => return write!(f, "\"{s}\""),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::ColonEq => ":=",
            Tok::ColonDash => ":-",
            Tok::Arrow => "->",
            Tok::DArrow => "=>",
            Tok::Amp => "&",
            Tok::Cons => "::",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Eq => "=",
            Tok::Turnstile => "|-",
            Tok::At(k) => return write!(f, "{}", "@".repeat(*k as usize)),
            Tok::Star(k) => return write!(f, "{}", "*".repeat(*k as usize)),
            Tok::Backslash => "\\",
            Tok::Semi => ";",
            Tok::Eof => "end of input",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '?' || c == '!'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let (sl, sc) = (line, col);
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i >= chars.len() {
                    return Err(LexError {
                        span: Span {
                            line: sl,
                            col: sc,
                            end_line: line,
                            end_col: col,
                        },
                        message: "unterminated comment".into(),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (sl, sc) = (line, col);
        let (tok, len) = if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse().map_err(|_| LexError {
                span: Span {
                    line,
                    col,
                    end_line: line,
                    end_col: col + (j - i) as u32,
                },
                message: format!("number {s} is too large"),
            })?;
            (Tok::Num(n), j - i)
        } else if c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != '"' {
                return Err(LexError {
                    span: Span {
                        line,
                        col,
                        end_line: line,
                        end_col: col + (j - i) as u32,
                    },
                    message: "unterminated string".into(),
                });
            }
            (Tok::Str(chars[i + 1..j].iter().collect()), j + 1 - i)
        } else if c == '@' || c == '*' {
            let mut j = i;
            while j < chars.len() && chars[j] == c {
                j += 1;
            }
            let k = (j - i) as u32;
            (if c == '@' { Tok::At(k) } else { Tok::Star(k) }, j - i)
        } else {
            match (c, next) {
                (':', Some('=')) => (Tok::ColonEq, 2),
                (':', Some('-')) => (Tok::ColonDash, 2),
                (':', Some(':')) => (Tok::Cons, 2),
                (':', _) => (Tok::Colon, 1),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('=', Some('>')) => (Tok::DArrow, 2),
                ('=', _) => (Tok::Eq, 1),
                ('/', Some('\\')) => (Tok::And, 2),
                ('\\', Some('/')) => (Tok::Or, 2),
                ('\\', _) => (Tok::Backslash, 1),
                ('|', Some('-')) => (Tok::Turnstile, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('&', _) => (Tok::Amp, 1),
                (';', _) => (Tok::Semi, 1),
                _ => {
                    return Err(LexError {
                        span: Span {
                            line,
                            col,
                            end_line: line,
                            end_col: col + 1,
                        },
                        message: format!("unexpected character '{c}'"),
                    })
                }
            }
        };
        advance(&mut i, &mut line, &mut col, len);
        out.push(Token {
            tok,
            span: Span {
                line: sl,
                col: sc,
                end_line: line,
                end_col: col,
            },
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span {
            line,
            col,
            end_line: line,
            end_col: col,
        },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("x\\ a /\\ b \\/ c % comment\n -> => :: := :- |- @@ * /* block */ ."),
            vec![
                Tok::Ident("x".into()),
                Tok::Backslash,
                Tok::Ident("a".into()),
                Tok::And,
                Tok::Ident("b".into()),
                Tok::Or,
                Tok::Ident("c".into()),
                Tok::Arrow,
                Tok::DArrow,
                Tok::Cons,
                Tok::ColonEq,
                Tok::ColonDash,
                Tok::Turnstile,
                Tok::At(2),
                Tok::Star(1),
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines() {
        let t = tokenize("a\n  bc").unwrap();
        assert_eq!((t[1].span.line, t[1].span.col, t[1].span.end_col), (2, 3, 5));
    }
}
