#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use super::ConditionError;
use crate::domain::DomainSpec;
use crate::expr::{FunctionSpec, ScalarField};
use crate::ext::ExtReal;
use crate::potential::circular_mean;
use crate::Complex;

/// Angular nodes of the circle mean in [`check_l_bound`].
pub const L_BOUND_NODES: usize = 2048;
/// Slack allowed in (L).
pub const TOL_L: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LBoundReport {
    /// `u0(z) + log|f(z)|`.
    pub lhs: ExtReal,
    /// `(1/2π) ∫ M(z + r e^{iθ}) dθ`.
    pub mean: f64,
    /// `(1 + ε) log((1 + |z|)/r)`; the exponent is applied to the whole
    /// logarithm.
    pub log_term: f64,
    pub rhs: f64,
    pub holds: bool,
    pub tol: f64,
}

/// Checks (L) at one admissible `(z, r)`:
/// `u0(z) + log|f(z)| ≤ mean of M on ∂D(z, r) + (1 + ε) log((1 + |z|)/r)`,
/// after enforcing (d): `0 < r < min{1 + |z|, dist(z, ∂D)}`.
#[allow(clippy::too_many_arguments)]
pub fn check_l_bound<U, M>(
    u0: &U,
    f: &FunctionSpec,
    m: &M,
    domain: &DomainSpec,
    z: Complex,
    r: f64,
    eps: f64,
) -> Result<LBoundReport, ConditionError>
where
    U: ScalarField + ?Sized,
    M: ScalarField + ?Sized,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ConditionError::BadParameter("epsilon must be positive"));
    }
    if !domain.contains(z) {
        return Err(ConditionError::BadParameter("z must lie in D"));
    }
    let bound = (1.0 + z.norm()).min(domain.dist_to_boundary(z));
    if !(r > 0.0 && r < bound) {
        return Err(ConditionError::ConstraintD { r, bound });
    }
    let lhs = match (u0.value(z)?, f.log_modulus(z)?) {
        (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => ExtReal::NegInf,
        (ExtReal::PosInf, _) | (_, ExtReal::PosInf) => ExtReal::PosInf,
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
    };
    let mean = circular_mean(m, z, r, L_BOUND_NODES)?;
    let log_term = (1.0 + eps) * ((1.0 + z.norm()) / r).ln();
    let rhs = mean + log_term;
    let holds = lhs <= ExtReal::Finite(rhs + TOL_L);
    Ok(LBoundReport { lhs, mean, log_term, rhs, holds, tol: TOL_L })
}
