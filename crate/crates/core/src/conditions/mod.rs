//! Test functions `v ∈ sbh₀⁺(D∖D₀; ≤ b)`, the Blaschke-type functionals and
//! the checks of (O), (⇒), (C), (C′), (L) and Green's identity on sampled
//! data.
//!
//! Constants are empirical minima and maxima over the data at hand; nothing
//! here claims the existential constants of the theory.

mod identity;
mod inequality;
mod lbound;
mod majorant;
mod series;
mod testfn;

use core::fmt;

use thiserror::Error;

use crate::domain::{DomainError, DomainSpec};
use crate::expr::{sample_field, EvalError, GridRect, ScalarField};
use crate::potential::{riesz_measure_grid, MeasureEstimate, PotentialError};
use crate::zeros::ZeroError;
use crate::Complex;

pub use identity::{green_identity_residual, IdentityReport};
pub use inequality::{estimate_c_prime, evaluate_inequality_c, CPrimeEstimate, InequalityInput, InequalityReport};
pub use lbound::{check_l_bound, LBoundReport, L_BOUND_NODES, TOL_L};
pub use majorant::{check_implication, verify_majorant, ImplicationReport, MajorantReport, TOL_MAJORANT};
pub use series::{blaschke_functional, SeriesVerdict, SumTrace, TailFit, TraceEntry, MIN_TAIL_TERMS};
pub use testfn::{
    check_o_condition, make_test_function, validate_test_function, Collar, OReport, TestFlags, TestFunction,
    TestKind, ValidationReport, MIN_GAP_NODES,
};

/// Outcome of a condition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Fails => "FAILS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("the domain needs an inner domain D0")]
    NoInnerDomain,
    #[error("operation needs a bounded disk-type domain")]
    UnsupportedDomain,
    #[error("the test function's singular point must lie in D0")]
    PoleOutsideInner,
    #[error("D0 must contain the disk where the power test function is not subharmonic (chart radius {0})")]
    CoreNotExcluded(f64),
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
    #[error("test function failed validation: {0}")]
    Validation(&'static str),
    #[error("test function is infinite at the zero {at}")]
    InfiniteAtZero { at: Complex },
    #[error("the point {at} is not in dom_M")]
    NotInDomM { at: Complex },
    #[error("majorization fails: worst violation {violation} at {at}")]
    MajorantFails { violation: f64, at: Complex },
    #[error("constraint (d) violated: need 0 < r < {bound}, got r = {r}")]
    ConstraintD { r: f64, bound: f64 },
    #[error("the identity needs v = 0 and a zero normal derivative on the outer boundary")]
    FlagsNotSet,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Grid of step `h` over the bounding box of `D̄`.
pub fn domain_grid(domain: &DomainSpec, h: f64) -> Result<GridRect, ConditionError> {
    let (ll, ur) = domain.bounding_box()?;
    Ok(GridRect::new(ll, ur, h)?)
}

/// Grid estimate of `ν_M` over the bounding box of `D̄`: the five-point
/// charge with flagged singular nodes patched by their boundary flux.
pub fn grid_charge<F: ScalarField + ?Sized>(m: &F, domain: &DomainSpec, h: f64) -> Result<MeasureEstimate, ConditionError> {
    let grid = sample_field(m, domain_grid(domain, h)?);
    let mut rg = riesz_measure_grid(&grid)?;
    rg.patch_by_flux(&grid);
    Ok(rg.measure)
}
