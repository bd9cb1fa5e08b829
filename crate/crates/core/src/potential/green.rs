#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;


use super::PotentialError;
use crate::domain::DomainSpec;
use crate::expr::{EvalError, ScalarField};
use crate::ext::{ComplexPoint, ExtReal};
use crate::Complex;

/// `g_𝔻(z, z0) = log|1 − z̄0 z| − log|z − z0|` inside the disk, `0` outside.
///
/// Evaluated as `½ log1p((1 − |z|²)(1 − |z0|²) / |z − z0|²)`, which is exactly
/// symmetric and keeps full relative accuracy near the circle.
pub fn green_unit_disk(z: Complex, z0: Complex) -> Result<f64, PotentialError> {
    let a0 = z0.norm();
    if !(a0 < 1.0) {
        return Err(PotentialError::PoleOutsideDomain);
    }
    let a = z.norm();
    if a >= 1.0 {
        return Ok(0.0);
    }
    let d2 = (z - z0).norm_sqr();
    if d2 == 0.0 {
        return Err(PotentialError::Pole);
    }
    let q = (1.0 - a) * (1.0 + a) * (1.0 - a0) * (1.0 + a0) / d2;
    Ok(0.5 * q.ln_1p())
}

/// Green's function of a disk-type domain through its chart `φ: D → 𝔻`.
pub fn green_domain(d: &DomainSpec, z: ComplexPoint, z0: ComplexPoint) -> Result<f64, PotentialError> {
    let phi = d.chart().ok_or(PotentialError::UnsupportedDomain)?;
    let w0 = match phi.apply(z0) {
        ComplexPoint::Finite(w) if w.norm() < 1.0 => w,
        _ => return Err(PotentialError::PoleOutsideDomain),
    };
    match phi.apply(z) {
        ComplexPoint::Finite(w) => green_unit_disk(w, w0),
        ComplexPoint::Infinity => Ok(0.0),
    }
}

/// `g_D(·, z0)` as a scalar field; `+∞` at the pole.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenField {
    pub domain: DomainSpec,
    pub pole: Complex,
}

impl GreenField {
    pub fn new(domain: DomainSpec, pole: Complex) -> Result<GreenField, PotentialError> {
        green_domain(&domain, ComplexPoint::Finite(pole + 1.0), ComplexPoint::Finite(pole))?;
        Ok(GreenField { domain, pole })
    }
}

impl ScalarField for GreenField {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        match green_domain(&self.domain, ComplexPoint::Finite(z), ComplexPoint::Finite(self.pole)) {
            Ok(g) => Ok(ExtReal::Finite(g)),
            Err(PotentialError::Pole) => Ok(ExtReal::PosInf),
            Err(_) => Err(EvalError::OutsideDomain),
        }
    }

    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        Some(vec![(self.pole, -1.0)])
    }
}
