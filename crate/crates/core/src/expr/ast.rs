#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use super::EvalError;
use crate::Complex;

/// Unary built-ins of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    LogAbs,
    Abs,
    Re,
    Im,
    Conj,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::LogAbs => "logabs",
            Func::Abs => "abs",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "logabs" => Func::LogAbs,
            "abs" => Func::Abs,
            "re" => Func::Re,
            "im" => Func::Im,
            "conj" => Func::Conj,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeZero {
    pub at: Complex,
    pub multiplicity: u32,
}

/// Finite Blaschke product `∏ ((|a|/a)(a − z)/(1 − ā z))^m`, with the factor
/// `z` for `a = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blaschke {
    zeros: Vec<BlaschkeZero>,
}

impl Blaschke {
    /// Validates `|a| < 1`, `m ≥ 1`, and merges repeated zeros.
    pub fn new(entries: impl IntoIterator<Item = (Complex, u32)>) -> Result<Blaschke, EvalError> {
        let mut zeros: Vec<BlaschkeZero> = Vec::new();
        for (at, m) in entries {
            if !at.is_finite() || at.norm() >= 1.0 {
                return Err(EvalError::InvalidConstructor("Blaschke zeros must lie in |z| < 1"));
            }
            if m == 0 {
                return Err(EvalError::InvalidConstructor("multiplicity must be positive"));
            }
            match zeros.iter_mut().find(|z| z.at == at) {
                Some(existing) => existing.multiplicity += m,
                None => zeros.push(BlaschkeZero { at, multiplicity: m }),
            }
        }
        if zeros.is_empty() {
            return Err(EvalError::InvalidConstructor("Blaschke product needs at least one zero"));
        }
        Ok(Blaschke { zeros })
    }

    pub fn zeros(&self) -> &[BlaschkeZero] {
        &self.zeros
    }

    pub fn degree(&self) -> u32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    /// Evaluates on the closed unit disk.
    pub fn eval(&self, z: Complex) -> Result<Complex, EvalError> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(EvalError::OutsideDomain);
        }
        let mut acc = Complex::new(1.0, 0.0);
        for zero in &self.zeros {
            let a = zero.at;
            let factor = if a.is_zero() {
                z
            } else {
                let den = Complex::new(1.0, 0.0) - a.conj() * z;
                if den.is_zero() {
                    return Err(EvalError::Pole);
                }
                (a - z) / den * (a.norm() / a)
            };
            acc *= factor.powu(zero.multiplicity);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex),
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    Blaschke(Blaschke),
    /// Coefficients in ascending order.
    Poly(Vec<Complex>),
}

/// Intermediate value: real-valued sub-expressions stay real so that
/// `logabs(...)` can carry `-∞` through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Value {
    Real(f64),
    Cplx(Complex),
}

impl Value {
    fn to_complex(self) -> Complex {
        match self {
            Value::Real(x) => Complex::new(x, 0.0),
            Value::Cplx(c) => c,
        }
    }

    fn is_zero(self) -> bool {
        match self {
            Value::Real(x) => x == 0.0,
            Value::Cplx(c) => c.is_zero(),
        }
    }
}

pub(crate) fn horner(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl Expr {
    pub(crate) fn eval(&self, z: Complex) -> Result<Value, EvalError> {
        use Value::{Cplx, Real};
        Ok(match self {
            Expr::Const(c) => {
                if c.im == 0.0 {
                    Real(c.re)
                } else {
                    Cplx(*c)
                }
            }
            Expr::Z => Cplx(z),
            Expr::Neg(e) => match e.eval(z)? {
                Real(x) => Real(-x),
                Cplx(c) => Cplx(-c),
            },
            Expr::Add(a, b) => match (a.eval(z)?, b.eval(z)?) {
                (Real(x), Real(y)) => Real(x + y),
                (Real(x), Cplx(c)) | (Cplx(c), Real(x)) => Cplx(Complex::new(c.re + x, c.im)),
                (Cplx(p), Cplx(q)) => Cplx(p + q),
            },
            Expr::Sub(a, b) => match (a.eval(z)?, b.eval(z)?) {
                (Real(x), Real(y)) => Real(x - y),
                (Real(x), Cplx(c)) => Cplx(Complex::new(x - c.re, -c.im)),
                (Cplx(c), Real(x)) => Cplx(Complex::new(c.re - x, c.im)),
                (Cplx(p), Cplx(q)) => Cplx(p - q),
            },
            Expr::Mul(a, b) => match (a.eval(z)?, b.eval(z)?) {
                (Real(x), Real(y)) => Real(x * y),
                (Real(x), Cplx(c)) | (Cplx(c), Real(x)) => Cplx(c * x),
                (Cplx(p), Cplx(q)) => Cplx(p * q),
            },
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den.is_zero() {
                    return Err(EvalError::Pole);
                }
                match (a.eval(z)?, den) {
                    (Real(x), Real(y)) => Real(x / y),
                    (Cplx(c), Real(y)) => Cplx(c / y),
                    (num, Cplx(q)) => Cplx(num.to_complex() / q),
                }
            }
            Expr::Pow(e, n) => {
                let base = e.eval(z)?;
                if *n < 0 && base.is_zero() {
                    return Err(EvalError::Pole);
                }
                match base {
                    Real(x) => Real(x.powi(*n)),
                    Cplx(c) => Cplx(c.powi(*n)),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(z)?;
                match (f, v) {
                    (Func::Exp, Real(x)) => Real(x.exp()),
                    (Func::Exp, Cplx(c)) => Cplx(c.exp()),
                    (Func::LogAbs, Real(x)) => Real(x.abs().ln()),
                    (Func::LogAbs, Cplx(c)) => Real(c.norm().ln()),
                    (Func::Abs, Real(x)) => Real(x.abs()),
                    (Func::Abs, Cplx(c)) => Real(c.norm()),
                    (Func::Re, Real(x)) => Real(x),
                    (Func::Re, Cplx(c)) => Real(c.re),
                    (Func::Im, Real(_)) => Real(0.0),
                    (Func::Im, Cplx(c)) => Real(c.im),
                    (Func::Conj, Real(x)) => Real(x),
                    (Func::Conj, Cplx(c)) => Cplx(c.conj()),
                }
            }
            Expr::Blaschke(b) => Cplx(b.eval(z)?),
            Expr::Poly(coeffs) => Cplx(horner(coeffs, z)),
        })
    }

    pub fn contains_z(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Z | Expr::Blaschke(_) | Expr::Poly(_) => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.contains_z(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_z() || b.contains_z()
            }
        }
    }

    pub fn contains_blaschke(&self) -> bool {
        match self {
            Expr::Blaschke(_) => true,
            Expr::Const(_) | Expr::Z | Expr::Poly(_) => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.contains_blaschke(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_blaschke() || b.contains_blaschke()
            }
        }
    }

    /// Expands to ascending coefficients when the tree is a polynomial in `z`.
    pub fn to_polynomial(&self) -> Option<Vec<Complex>> {
        const MAX_DEGREE: usize = 1024;
        let p = match self {
            Expr::Const(c) => vec![*c],
            Expr::Z => vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            Expr::Poly(c) => c.clone(),
            Expr::Neg(e) => e.to_polynomial()?.into_iter().map(|c| -c).collect(),
            Expr::Add(a, b) => poly_add(&a.to_polynomial()?, &b.to_polynomial()?, 1.0),
            Expr::Sub(a, b) => poly_add(&a.to_polynomial()?, &b.to_polynomial()?, -1.0),
            Expr::Mul(a, b) => {
                let (p, q) = (a.to_polynomial()?, b.to_polynomial()?);
                if p.len() + q.len() > MAX_DEGREE {
                    return None;
                }
                poly_mul(&p, &q)
            }
            Expr::Div(a, b) => {
                let q = trim(b.to_polynomial()?);
                if q.len() != 1 || q[0].is_zero() {
                    return None;
                }
                a.to_polynomial()?.into_iter().map(|c| c / q[0]).collect()
            }
            Expr::Pow(e, n) => {
                if *n < 0 {
                    return None;
                }
                let base = e.to_polynomial()?;
                if (trim(base.clone()).len().max(1) - 1) * (*n as usize) > MAX_DEGREE {
                    return None;
                }
                let mut acc = vec![Complex::new(1.0, 0.0)];
                for _ in 0..*n {
                    acc = poly_mul(&acc, &base);
                }
                acc
            }
            Expr::Call(..) | Expr::Blaschke(_) => return None,
        };
        Some(trim(p))
    }

    /// Holomorphic (away from poles) on its domain of validity.
    pub fn is_holomorphic(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Z | Expr::Blaschke(_) | Expr::Poly(_) => true,
            Expr::Neg(e) | Expr::Pow(e, _) => e.is_holomorphic(),
            Expr::Call(Func::Exp, e) => e.is_holomorphic(),
            Expr::Call(..) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_holomorphic() && b.is_holomorphic()
            }
        }
    }

    /// For a holomorphic tree whose zeros and poles are known in closed form,
    /// returns them as `(point, order)` with poles carrying negative order.
    pub fn known_zeros(&self) -> Option<Vec<(Complex, f64)>> {
        match self {
            Expr::Z => Some(vec![(Complex::new(0.0, 0.0), 1.0)]),
            Expr::Blaschke(b) => Some(
                b.zeros()
                    .iter()
                    .map(|z| (z.at, z.multiplicity as f64))
                    .collect(),
            ),
            Expr::Neg(e) => e.known_zeros(),
            Expr::Mul(a, b) => {
                let mut z = a.known_zeros()?;
                z.extend(b.known_zeros()?);
                Some(z)
            }
            Expr::Div(a, b) => {
                let mut z = a.known_zeros()?;
                z.extend(b.known_zeros()?.into_iter().map(|(p, w)| (p, -w)));
                Some(z)
            }
            Expr::Pow(e, n) => Some(
                e.known_zeros()?
                    .into_iter()
                    .map(|(p, w)| (p, w * *n as f64))
                    .collect(),
            ),
            Expr::Call(Func::Exp, e) if e.is_holomorphic() => Some(Vec::new()),
            _ => polynomial_roots(&self.to_polynomial()?),
        }
    }

    /// For a real-valued tree of the form `Σ w log|ζ − a| + (harmonic)`,
    /// returns the `(a, w)` terms.
    pub fn log_charge(&self) -> Option<Vec<(Complex, f64)>> {
        match self {
            Expr::Const(c) if c.im == 0.0 => Some(Vec::new()),
            Expr::Neg(e) => Some(e.log_charge()?.into_iter().map(|(a, w)| (a, -w)).collect()),
            Expr::Add(a, b) => {
                let mut t = a.log_charge()?;
                t.extend(b.log_charge()?);
                Some(t)
            }
            Expr::Sub(a, b) => {
                let mut t = a.log_charge()?;
                t.extend(b.log_charge()?.into_iter().map(|(p, w)| (p, -w)));
                Some(t)
            }
            Expr::Mul(a, b) => match (a.as_real_const(), b.as_real_const()) {
                (Some(s), _) => Some(b.log_charge()?.into_iter().map(|(p, w)| (p, w * s)).collect()),
                (_, Some(s)) => Some(a.log_charge()?.into_iter().map(|(p, w)| (p, w * s)).collect()),
                _ => None,
            },
            Expr::Div(a, b) => {
                let s = b.as_real_const().filter(|s| *s != 0.0)?;
                Some(a.log_charge()?.into_iter().map(|(p, w)| (p, w / s)).collect())
            }
            Expr::Call(Func::LogAbs, e) if e.is_holomorphic() => e.known_zeros(),
            Expr::Call(Func::Re | Func::Im, e) if e.is_holomorphic() => Some(Vec::new()),
            _ => None,
        }
    }

    fn as_real_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) if c.im == 0.0 => Some(c.re),
            Expr::Neg(e) => e.as_real_const().map(|x| -x),
            _ => None,
        }
    }
}

fn trim(mut p: Vec<Complex>) -> Vec<Complex> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add(p: &[Complex], q: &[Complex], sign: f64) -> Vec<Complex> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| {
            let a = p.get(k).copied().unwrap_or_default();
            let b = q.get(k).copied().unwrap_or_default();
            a + b * sign
        })
        .collect()
}

fn poly_mul(p: &[Complex], q: &[Complex]) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Closed-form roots for degree ≤ 2 (nonzero constants have none).
fn polynomial_roots(p: &[Complex]) -> Option<Vec<(Complex, f64)>> {
    let p = trim(p.to_vec());
    match p.len() {
        1 if !p[0].is_zero() => Some(Vec::new()),
        2 => Some(vec![(-p[0] / p[1], 1.0)]),
        3 => {
            let (c, b, a) = (p[0], p[1], p[2]);
            let disc = (b * b - a * c * 4.0).sqrt();
            if disc.is_zero() {
                return Some(vec![(-b / (a * 2.0), 2.0)]);
            }
            // pick the sign that avoids cancellation
            let q = if (b.conj() * disc).re >= 0.0 { (b + disc) * -0.5 } else { (b - disc) * -0.5 };
            if q.is_zero() {
                return Some(vec![(Complex::new(0.0, 0.0), 2.0)]);
            }
            Some(vec![(q / a, 1.0), (c / q, 1.0)])
        }
        _ => None,
    }
}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{x}")
    }
}

pub(crate) fn fmt_const(c: Complex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        return fmt_real(c.re, f);
    }
    let sign = if c.im < 0.0 { '-' } else { '+' };
    write!(f, "({}{}{}i)", c.re, sign, c.im.abs())
}

pub(crate) fn fmt_blaschke(b: &Blaschke, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("blaschke(")?;
    for (k, z) in b.zeros().iter().enumerate() {
        if k > 0 {
            f.write_str("; ")?;
        }
        fmt_const(z.at, f)?;
        if z.multiplicity != 1 {
            write!(f, ":{}", z.multiplicity)?;
        }
    }
    f.write_str(")")
}

pub(crate) fn fmt_poly(coeffs: &[Complex], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("poly(")?;
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        fmt_const(*c, f)?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_const(*c, f),
            Expr::Z => f.write_str("z"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(e, n) if *n < 0 => write!(f, "({e})^({n})"),
            Expr::Pow(e, n) => write!(f, "({e})^{n}"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Blaschke(b) => fmt_blaschke(b, f),
            Expr::Poly(c) => fmt_poly(c, f),
        }
    }
}
