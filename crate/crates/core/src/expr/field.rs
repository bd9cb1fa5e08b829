use alloc::vec::Vec;

use super::{EvalError, FunctionSpec};
use crate::ext::ExtReal;
use crate::Complex;

/// A real-valued (possibly `-∞`) function on a planar region.
pub trait ScalarField {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError>;

    /// Terms `(a, w)` such that the field is `Σ w log|ζ − a|` plus a smooth
    /// function, when known. Means use them to subtract the singularities.
    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        None
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        (**self).value(z)
    }

    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        (**self).log_singularities()
    }
}

/// `log|f|` for a holomorphic spec `f`.
#[derive(Debug, Clone, Copy)]
pub struct LogModulus<'a>(pub &'a FunctionSpec);

impl ScalarField for LogModulus<'_> {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        self.0.log_modulus(z)
    }

    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        self.0.known_zeros()
    }
}

/// A real-valued spec used directly as a field.
#[derive(Debug, Clone, Copy)]
pub struct RealField<'a>(pub &'a FunctionSpec);

impl ScalarField for RealField<'_> {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        self.0.real(z)
    }

    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        self.0.real_log_charge()
    }
}

/// A closure `ℂ → ℝ ∪ {±∞}`; NaN is reported as undefined.
#[derive(Debug, Clone, Copy)]
pub struct FnField<F>(pub F);

impl<F: Fn(Complex) -> f64> ScalarField for FnField<F> {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        ExtReal::from_f64((self.0)(z)).ok_or(EvalError::Undefined)
    }
}
