//! Extended reals and points of the Riemann sphere.

use core::cmp::Ordering;
use core::fmt;

use crate::Complex;

/// A value in `[-∞, +∞]`.
///
/// The infinities are explicit variants so that a `log|f|` sample at a zero
/// can never leak into a quadrature sum as a huge finite number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Converts an IEEE value; `NaN` has no extended-real meaning.
    pub fn from_f64(x: f64) -> Option<ExtReal> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtReal::NegInf)
        } else {
            Some(ExtReal::Finite(x))
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// IEEE view, with the infinities mapped to `±INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl From<f64> for ExtReal {
    /// Panics on `NaN`; use [`ExtReal::from_f64`] for unchecked input.
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x).expect("NaN is not an extended real")
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

/// A point of `ℂ∞`. Finite points always have finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex),
    Infinity,
}

impl ComplexPoint {
    /// Builds a finite point, rejecting non-finite coordinates.
    pub fn new(re: f64, im: f64) -> Option<ComplexPoint> {
        if re.is_finite() && im.is_finite() {
            Some(ComplexPoint::Finite(Complex::new(re, im)))
        } else {
            None
        }
    }

    pub fn finite(self) -> Option<Complex> {
        match self {
            ComplexPoint::Finite(z) => Some(z),
            ComplexPoint::Infinity => None,
        }
    }
}

impl From<Complex> for ComplexPoint {
    fn from(z: Complex) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexPoint::Finite(z)
        } else {
            ComplexPoint::Infinity
        }
    }
}
