//! Function specifications: parsing, evaluation and grid sampling.
//!
//! A [`FunctionSpec`] is either a finite Blaschke product, a polynomial, or a
//! general expression tree. The text grammar is documented in
//! `docs/grammar.ebnf`; `Display` prints text that parses back to a spec with
//! the same values.

mod ast;
mod field;
mod grid;
mod lexer;
mod parser;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::domain::DomainSpec;
use crate::ext::{ComplexPoint, ExtReal};
use crate::Complex;

pub use ast::{Blaschke, BlaschkeZero, Expr, Func};
pub use field::{FnField, LogModulus, RealField, ScalarField};
pub use grid::{sample_field, sample_grid, sample_real_grid, sample_row, GridField, GridRect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("malformed number '{0}'")]
    BadNumber(String),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: &'static str, found: String },
    #[error("expected {expected}, found end of input")]
    UnexpectedEnd { expected: &'static str },
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("'{name}' takes {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("constructor arguments must be constants")]
    NonConstantArgument,
    #[error("multiplicity must be a positive integer")]
    BadMultiplicity,
    #[error("exponent must be an integer of magnitude at most 1024")]
    BadExponent,
    #[error("empty specification")]
    Empty,
    #[error("invalid constructor: {0}")]
    InvalidConstructor(String),
}

/// A parse failure with its 1-based column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at column {column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub column: usize,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, column: usize) -> ParseError {
        ParseError { kind, column }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation at a pole")]
    Pole,
    #[error("point outside the declared domain")]
    OutsideDomain,
    #[error("value is undefined (NaN)")]
    Undefined,
    #[error("expression is not real-valued at this point")]
    NotReal,
    #[error("value overflowed")]
    Infinite,
    #[error("{0}")]
    InvalidConstructor(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    BlaschkeProduct(Blaschke),
    /// Ascending coefficients with a nonzero leading term.
    Polynomial(Vec<Complex>),
    Expression(Expr),
}

/// An evaluable function together with its declared domain of validity.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub domain: DomainSpec,
}

/// Parses specification text; see the module docs for the grammar.
pub fn parse_function(text: &str) -> Result<FunctionSpec, ParseError> {
    Ok(FunctionSpec::from_expr(parser::parse_expr(text)?))
}

const REAL_SLACK: f64 = 1e-12;

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<FunctionSpec, ParseError> {
        parse_function(text)
    }

    /// Normalises a tree: a lone `blaschke(...)` becomes a product, a tree
    /// that expands to a nonzero polynomial becomes a polynomial.
    pub fn from_expr(e: Expr) -> FunctionSpec {
        let domain = if e.contains_blaschke() {
            DomainSpec::unit_disk()
        } else {
            DomainSpec::whole_plane()
        };
        let kind = match e {
            Expr::Blaschke(b) => FunctionKind::BlaschkeProduct(b),
            e => match e.to_polynomial() {
                Some(p) if !(p.len() == 1 && p[0].is_zero()) => FunctionKind::Polynomial(p),
                _ => FunctionKind::Expression(e),
            },
        };
        FunctionSpec { kind, domain }
    }

    pub fn blaschke(b: Blaschke) -> FunctionSpec {
        FunctionSpec { kind: FunctionKind::BlaschkeProduct(b), domain: DomainSpec::unit_disk() }
    }

    /// A Blaschke product from `(zero, multiplicity)` pairs.
    pub fn blaschke_from_zeros(
        zeros: impl IntoIterator<Item = (Complex, u32)>,
    ) -> Result<FunctionSpec, EvalError> {
        Ok(FunctionSpec::blaschke(Blaschke::new(zeros)?))
    }

    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn polynomial(mut coeffs: Vec<Complex>) -> Result<FunctionSpec, EvalError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(EvalError::InvalidConstructor("polynomial needs a nonzero coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(EvalError::InvalidConstructor("polynomial coefficients must be finite"));
        }
        Ok(FunctionSpec { kind: FunctionKind::Polynomial(coeffs), domain: DomainSpec::whole_plane() })
    }

    pub fn constant(c: f64) -> FunctionSpec {
        FunctionSpec::from_expr(Expr::Const(Complex::new(c, 0.0)))
    }

    /// The spec as an expression tree.
    pub fn to_expr(&self) -> Expr {
        match &self.kind {
            FunctionKind::BlaschkeProduct(b) => Expr::Blaschke(b.clone()),
            FunctionKind::Polynomial(p) => Expr::Poly(p.clone()),
            FunctionKind::Expression(e) => e.clone(),
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        match &self.kind {
            FunctionKind::Expression(e) => e.is_holomorphic(),
            _ => true,
        }
    }

    /// Zeros (positive order) and poles (negative order) of a holomorphic
    /// spec when they are known in closed form.
    pub fn known_zeros(&self) -> Option<Vec<(Complex, f64)>> {
        match &self.kind {
            FunctionKind::BlaschkeProduct(b) => {
                Some(b.zeros().iter().map(|z| (z.at, z.multiplicity as f64)).collect())
            }
            _ => self.to_expr().known_zeros(),
        }
    }

    /// For a real-valued spec `Σ w log|ζ − a| + harmonic`, the `(a, w)` terms.
    pub fn real_log_charge(&self) -> Option<Vec<(Complex, f64)>> {
        match &self.kind {
            FunctionKind::Expression(e) => e.log_charge(),
            FunctionKind::Polynomial(p) if p.len() == 1 && p[0].im == 0.0 => Some(Vec::new()),
            _ => None,
        }
    }

    fn raw(&self, z: Complex) -> Result<ast::Value, EvalError> {
        if !self.domain.contains_closure(z) {
            return Err(EvalError::OutsideDomain);
        }
        match &self.kind {
            FunctionKind::BlaschkeProduct(b) => b.eval(z).map(ast::Value::Cplx),
            FunctionKind::Polynomial(p) => Ok(ast::Value::Cplx(ast::horner(p, z))),
            FunctionKind::Expression(e) => e.eval(z),
        }
    }

    /// Complex value at a finite point.
    pub fn value(&self, z: Complex) -> Result<Complex, EvalError> {
        let w = match self.raw(z)? {
            ast::Value::Real(x) => Complex::new(x, 0.0),
            ast::Value::Cplx(c) => c,
        };
        if w.re.is_nan() || w.im.is_nan() {
            return Err(EvalError::Undefined);
        }
        if !w.is_finite() {
            return Err(EvalError::Infinite);
        }
        Ok(w)
    }

    pub fn eval_value(&self, z: ComplexPoint) -> Result<ComplexPoint, EvalError> {
        let z = z.finite().ok_or(EvalError::OutsideDomain)?;
        self.value(z).map(ComplexPoint::Finite)
    }

    /// `log|f(z)|`, exactly `-∞` where `f(z) = 0`.
    pub fn log_modulus(&self, z: Complex) -> Result<ExtReal, EvalError> {
        let w = self.value(z)?;
        if w.is_zero() {
            return Ok(ExtReal::NegInf);
        }
        // hypot-based norm avoids spurious underflow of |w|²
        Ok(ExtReal::Finite(w.norm().ln()))
    }

    pub fn eval_log_modulus(&self, z: ComplexPoint) -> Result<ExtReal, EvalError> {
        self.log_modulus(z.finite().ok_or(EvalError::OutsideDomain)?)
    }

    /// Value of a real-valued spec; `logabs` at a zero gives `-∞`.
    pub fn real(&self, z: Complex) -> Result<ExtReal, EvalError> {
        let x = match self.raw(z)? {
            ast::Value::Real(x) => x,
            ast::Value::Cplx(c) => {
                if c.im.abs() > REAL_SLACK * (1.0 + c.re.abs()) {
                    return Err(EvalError::NotReal);
                }
                c.re
            }
        };
        ExtReal::from_f64(x).ok_or(EvalError::Undefined)
    }

    pub fn eval_real(&self, z: ComplexPoint) -> Result<ExtReal, EvalError> {
        self.real(z.finite().ok_or(EvalError::OutsideDomain)?)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::BlaschkeProduct(b) => ast::fmt_blaschke(b, f),
            FunctionKind::Polynomial(p) => ast::fmt_poly(p, f),
            FunctionKind::Expression(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn cube_is_a_polynomial() {
        let s = parse_function("z^3").unwrap();
        assert_eq!(s.kind, FunctionKind::Polynomial(vec![c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]));
        assert_eq!(s.value(c(2.0, 0.0)).unwrap(), c(8.0, 0.0));
    }

    #[test]
    fn blaschke_constructor_form() {
        let s = parse_function("blaschke(0.5; 0.5i)").unwrap();
        let FunctionKind::BlaschkeProduct(b) = &s.kind else { panic!("{s:?}") };
        assert_eq!(
            b.zeros(),
            [
                BlaschkeZero { at: c(0.5, 0.0), multiplicity: 1 },
                BlaschkeZero { at: c(0.0, 0.5), multiplicity: 1 }
            ]
        );
        assert_eq!(s.domain, DomainSpec::unit_disk());
    }

    #[test]
    fn unbalanced_parenthesis_column() {
        let err = parse_function("exp(z").unwrap_err();
        assert_eq!(err.column, 6);
        assert!(err.to_string().starts_with("syntax error at column 6"));
    }

    #[test]
    fn error_kinds() {
        let k = |s: &str| parse_function(s).unwrap_err().kind;
        assert!(matches!(k("foo(z)"), ParseErrorKind::UnknownIdentifier(_)));
        assert!(matches!(k("exp(z, 2)"), ParseErrorKind::Arity { expected: 1, found: 2, .. }));
        assert!(matches!(k("blaschke(z)"), ParseErrorKind::NonConstantArgument));
        assert!(matches!(k("blaschke(1.5)"), ParseErrorKind::InvalidConstructor(_)));
        assert!(matches!(k("blaschke(0.5:0)"), ParseErrorKind::BadMultiplicity));
        assert!(matches!(k("z^0.5"), ParseErrorKind::BadExponent));
        assert!(matches!(k("   "), ParseErrorKind::Empty));
        assert!(matches!(k("z z"), ParseErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn blaschke_values() {
        let s = parse_function("blaschke(0)").unwrap();
        assert_eq!(s.value(c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
        let s = parse_function("blaschke(0.5)").unwrap();
        assert_eq!(s.value(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(s.log_modulus(c(0.5, 0.0)).unwrap(), ExtReal::NegInf);
        for k in 0..16 {
            let z = Complex::from_polar(1.0, k as f64 * 0.4);
            assert!(s.log_modulus(z).unwrap().to_f64().abs() < 1e-12);
        }
        assert_eq!(s.value(c(1.5, 0.0)), Err(EvalError::OutsideDomain));
    }

    #[test]
    fn log_modulus_of_identity() {
        let s = parse_function("z").unwrap();
        let v = s.log_modulus(c(0.5, 0.0)).unwrap().to_f64();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn real_expressions() {
        let s = parse_function("logabs(z - 0.3) + 2*re(z)").unwrap();
        assert_eq!(s.real(c(0.3, 0.0)).unwrap(), ExtReal::NegInf);
        let v = s.real(c(0.0, 0.4)).unwrap().to_f64();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(s.real_log_charge().unwrap().len(), 1);
        assert_eq!(parse_function("z").unwrap().real(c(0.0, 1.0)), Err(EvalError::NotReal));
        assert_eq!(parse_function("1/z").unwrap().value(c(0.0, 0.0)), Err(EvalError::Pole));
    }

    #[test]
    fn zero_constant_stays_an_expression() {
        let s = parse_function("0").unwrap();
        assert!(matches!(s.kind, FunctionKind::Expression(_)));
        assert_eq!(s.log_modulus(c(0.1, 0.0)).unwrap(), ExtReal::NegInf);
        assert!(matches!(parse_function("1").unwrap().kind, FunctionKind::Polynomial(_)));
    }

    #[test]
    fn print_parses_back() {
        for text in [
            "blaschke(0.5:2; -0.25i; 0.1-0.2i)",
            "exp(z)*(z - 0.5i)^-2 + conj(z)/3",
            "logabs(blaschke(0.3)) - 2*logabs(z + 0.1)",
            "poly(1, -2, 0.5i)",
            "-(z^2) - -1",
            "abs(z)^2 + im(z) * pi",
        ] {
            let s = parse_function(text).unwrap();
            let t = parse_function(&s.to_string()).unwrap();
            for k in 0..20 {
                let z = Complex::from_polar(0.05 * k as f64, 0.7 * k as f64);
                assert_eq!(s.value(z), t.value(z), "{text} vs {t}");
            }
        }
    }

    #[test]
    fn known_zeros_of_polynomials() {
        let s = parse_function("z^2 - 0.25").unwrap();
        let mut z: Vec<f64> = s.known_zeros().unwrap().iter().map(|p| p.0.re).collect();
        z.sort_by(f64::total_cmp);
        assert_eq!(z, [-0.5, 0.5]);
    }
}
