use alloc::string::String;
use alloc::vec::Vec;

use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    /// A number immediately followed by `i`, e.g. `0.5i`.
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semicolon,
    Colon,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        use alloc::format;
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Imag(x) => format!("imaginary number {x}i"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Semicolon => "';'".into(),
            Tok::Colon => "':'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// A token with its 1-based column.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let column = i + 1;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semicolon),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, column });
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            let value: f64 = lexeme
                .parse()
                .map_err(|_| ParseError::new(ParseErrorKind::BadNumber(lexeme.clone()), column))?;
            if !value.is_finite() {
                return Err(ParseError::new(ParseErrorKind::BadNumber(lexeme), column));
            }
            let imaginary = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
            if imaginary {
                i += 1;
                out.push(Spanned { tok: Tok::Imag(value), column });
            } else {
                out.push(Spanned { tok: Tok::Num(value), column });
            }
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), column });
            continue;
        }
        return Err(ParseError::new(ParseErrorKind::UnexpectedChar(ch), column));
    }
    out.push(Spanned { tok: Tok::End, column: chars.len() + 1 });
    Ok(out)
}
