//! Recursive-descent parser for function specifications.
//!
//! ```text
//! input     = expr EOF ;
//! expr      = term { ("+" | "-") term } ;
//! term      = unary { ("*" | "/") unary } ;
//! unary     = ("+" | "-") unary | power ;
//! power     = primary [ "^" exponent ] ;
//! exponent  = int | ("+" | "-") int | "(" [ "+" | "-" ] int ")" ;
//! primary   = number | imag | "z" | "i" | "pi" | "(" expr ")"
//!           | func "(" expr ")"
//!           | "blaschke" "(" zero { sep zero } ")"
//!           | "poly" "(" expr { sep expr } ")" ;
//! func      = "exp" | "logabs" | "abs" | "re" | "im" | "conj" ;
//! zero      = expr [ ":" int ] ;
//! sep       = "," | ";" ;
//! number    = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! imag      = number "i" ;            (no space before the i)
//! ```
//!
//! Arguments of `blaschke` and `poly` must be constant (free of `z`).
//! `poly` takes coefficients in ascending order of powers.

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;


use super::ast::{Blaschke, Expr, Func};
use super::lexer::{tokenize, Spanned, Tok};
use super::{ParseError, ParseErrorKind};
use crate::Complex;

const MAX_EXPONENT: f64 = 1024.0;

pub(crate) fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.len() == 1 {
        return Err(ParseError::new(ParseErrorKind::Empty, 1));
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].column
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd { expected },
            other => ParseErrorKind::UnexpectedToken { expected, found: other.describe() },
        };
        ParseError::new(kind, self.column())
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.unexpected("operator or end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let n = self.exponent()?;
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesised = *self.peek() == Tok::LParen;
        if parenthesised {
            self.bump();
        }
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        let column = self.column();
        let n = match self.peek() {
            Tok::Num(x) => *x,
            _ => return Err(self.unexpected("integer exponent")),
        };
        if n.fract() != 0.0 || n > MAX_EXPONENT {
            return Err(ParseError::new(ParseErrorKind::BadExponent, column));
        }
        self.bump();
        if parenthesised {
            self.expect(Tok::RParen, "')'")?;
        }
        Ok((sign * n) as i32)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Spanned { tok, column } = self.bump();
        match tok {
            Tok::Num(x) => Ok(Expr::Const(Complex::new(x, 0.0))),
            Tok::Imag(y) => Ok(Expr::Const(Complex::new(0.0, y))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, column),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a number, 'z', a function or '('"))
            }
        }
    }

    fn identifier(&mut self, name: String, column: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "z" => return Ok(Expr::Z),
            "i" => return Ok(Expr::Const(Complex::new(0.0, 1.0))),
            "pi" => return Ok(Expr::Const(Complex::new(PI, 0.0))),
            _ => {}
        }
        let func = Func::from_name(&name);
        let is_ctor = name == "blaschke" || name == "poly";
        if func.is_none() && !is_ctor {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier(name), column));
        }
        self.expect(Tok::LParen, "'('")?;
        if let Some(func) = func {
            if *self.peek() == Tok::RParen {
                return Err(ParseError::new(
                    ParseErrorKind::Arity { name, expected: 1, found: 0 },
                    self.column(),
                ));
            }
            let arg = self.expr()?;
            if matches!(self.peek(), Tok::Comma | Tok::Semicolon) {
                let col = self.column();
                let mut found = 1;
                while matches!(self.peek(), Tok::Comma | Tok::Semicolon) {
                    self.bump();
                    self.expr()?;
                    found += 1;
                }
                return Err(ParseError::new(ParseErrorKind::Arity { name, expected: 1, found }, col));
            }
            self.expect(Tok::RParen, "')'")?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if name == "blaschke" {
            self.blaschke_args(column)
        } else {
            self.poly_args(column)
        }
    }

    fn constant_arg(&mut self) -> Result<Complex, ParseError> {
        let column = self.column();
        let e = self.expr()?;
        if e.contains_z() {
            return Err(ParseError::new(ParseErrorKind::NonConstantArgument, column));
        }
        let v = e
            .eval(Complex::new(0.0, 0.0))
            .map_err(|_| ParseError::new(ParseErrorKind::NonConstantArgument, column))?;
        let c = match v {
            super::ast::Value::Real(x) => Complex::new(x, 0.0),
            super::ast::Value::Cplx(c) => c,
        };
        if !c.is_finite() {
            return Err(ParseError::new(ParseErrorKind::NonConstantArgument, column));
        }
        Ok(c)
    }

    fn separated<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            return Err(self.unexpected("an argument"));
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Tok::Comma | Tok::Semicolon => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.unexpected("',', ';' or ')'")),
            }
        }
    }

    fn blaschke_args(&mut self, column: usize) -> Result<Expr, ParseError> {
        let entries = self.separated(|p| {
            let at = p.constant_arg()?;
            let mut m = 1u32;
            if *p.peek() == Tok::Colon {
                p.bump();
                let col = p.column();
                match p.peek() {
                    Tok::Num(x) if x.fract() == 0.0 && *x >= 1.0 && *x <= u32::MAX as f64 => {
                        m = *x as u32;
                        p.bump();
                    }
                    Tok::Num(_) => {
                        return Err(ParseError::new(ParseErrorKind::BadMultiplicity, col));
                    }
                    _ => return Err(p.unexpected("multiplicity")),
                }
            }
            Ok((at, m))
        })?;
        Blaschke::new(entries)
            .map(Expr::Blaschke)
            .map_err(|e| ParseError::new(ParseErrorKind::InvalidConstructor(alloc::format!("{e}")), column))
    }

    fn poly_args(&mut self, _column: usize) -> Result<Expr, ParseError> {
        let coeffs = self.separated(|p| p.constant_arg())?;
        Ok(Expr::Poly(coeffs))
    }
}
