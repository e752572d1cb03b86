use num_rational::BigRational;

use super::PgclParseError;
use crate::extreal::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    Num(BigRational),
    /// Punctuation and operators, e.g. `:=`, `<=`, `[`.
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &[
    ":=", "==", "!=", "<=", ">=", "&&", "||", ";", "{", "}", "[", "]", "(", ")", ",", "+", "-", "*", "=", "<", ">",
    "!",
];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, PgclParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                line,
                col: start_col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // `p/q` or a decimal fraction
            if i + 1 < chars.len() && (chars[i] == '/' || chars[i] == '.') && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let q = parse_rational(&text).ok_or_else(|| PgclParseError {
                line,
                col: start_col,
                message: format!("invalid number `{}`", text),
            })?;
            out.push(Token {
                kind: TokenKind::Num(q),
                line,
                col: start_col,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token {
                    kind: TokenKind::Sym(s),
                    line,
                    col: start_col,
                });
            }
            None => {
                return Err(PgclParseError {
                    line,
                    col,
                    message: format!("unexpected character `{}`", c),
                })
            }
        }
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_kinds() {
        let toks = tokenize("x := 3/2;\n  tick(inf)").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("x".into()));
        assert_eq!(toks[1].kind, TokenKind::Sym(":="));
        assert_eq!(toks[2].kind, TokenKind::Num(BigRational::new(3.into(), 2.into())));
        assert_eq!((toks[4].line, toks[4].col), (2, 3));
        assert_eq!(toks.last().unwrap().kind, TokenKind::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x := $").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
    }
}
