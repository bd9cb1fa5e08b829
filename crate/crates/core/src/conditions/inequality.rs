use alloc::vec::Vec;

use super::majorant::MajorantReport;
use super::{ConditionError, TestFunction, Verdict};
use crate::domain::{DomainSpec, BOUNDARY_SAMPLES};
use crate::ext::ExtReal;
use crate::potential::{hahn_jordan_split, integrate_measure, GreenField, MeasureEstimate};
use crate::Complex;

/// Data for one evaluation of the (C) inequalities.
#[derive(Debug, Clone, Copy)]
pub struct InequalityInput<'a> {
    pub nu_u: &'a MeasureEstimate,
    pub nu_m: &'a MeasureEstimate,
    /// `u(z0)`, finite.
    pub u_z0: f64,
    /// `M(z0)` as recovered from disk means; `+∞` off `dom_M`.
    pub m_z0: ExtReal,
    pub z0: Complex,
    pub v: &'a TestFunction,
    /// `D̃`; defaults to the concentric disk halfway between `D₀` and `∂D`.
    pub dtilde: Option<&'a DomainSpec>,
    /// Outcome of the majorization check `u ≤ M` on `D ∖ D₀`, if run.
    pub majorant: Option<&'a MajorantReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    /// `∫_{D∖D₀} v dν_u`.
    pub t_u: f64,
    /// `∫_{D∖D₀} v dν_M`.
    pub t_m: f64,
    /// `∫_{D̃∖D₀} v dν_M⁻`.
    pub t_m_minus: f64,
    /// `∫_{D̃} g_D̃(·, z0) dν_M`.
    pub g_m: f64,
    /// `∫_{D̃∖D₀} g_D̃(·, z0) dν_M⁻`.
    pub g_m_minus: f64,
    pub u_z0: f64,
    pub m_z0: f64,
    /// Smallest `C ≥ 0` for which the first display holds; `None` if none does.
    pub c_min: Option<f64>,
    /// Smallest `C̄ ≥ 0` for which (C) holds with `C = c_min`.
    pub c_bar: Option<f64>,
    /// The `b` used for (C).
    pub b: f64,
    pub dtilde: DomainSpec,
    /// `D̃ ⋐ D`, so that the (C) form applies.
    pub dtilde_compact: bool,
    pub verdict: Verdict,
}

impl InequalityReport {
    /// Left minus right side of the first display for a given `C`; `≤ 0`
    /// when it holds.
    pub fn display_gap(&self, c: f64) -> f64 {
        let lhs = c * self.u_z0 + self.t_u;
        let rhs = self.t_m + self.t_m_minus + c * (self.g_m + self.g_m_minus + self.m_z0);
        lhs - rhs
    }

    /// Left minus right side of (C) for given `C` and `C̄`.
    pub fn c_form_gap(&self, c: f64, c_bar: f64) -> f64 {
        self.t_u - (self.t_m + (self.b + c) * c_bar - c * self.u_z0)
    }
}

/// Every term of the first display of the main inequality, and the minimal
/// constants `C` and `C̄` that make it and (C) hold on this data.
pub fn evaluate_inequality_c(input: InequalityInput<'_>) -> Result<InequalityReport, ConditionError> {
    let v = input.v;
    let domain = &v.domain;
    let d0 = domain.inner().ok_or(ConditionError::NoInnerDomain)?;
    if let Some(m) = input.majorant {
        if !m.holds {
            return Err(ConditionError::MajorantFails { violation: m.worst_violation, at: m.worst_at.unwrap_or_default() });
        }
    }
    if !d0.contains(input.z0) {
        return Err(ConditionError::PoleOutsideInner);
    }
    let m_z0 = match input.m_z0 {
        ExtReal::Finite(x) => x,
        _ => return Err(ConditionError::NotInDomM { at: input.z0 }),
    };
    if !input.u_z0.is_finite() {
        return Err(ConditionError::BadParameter("u(z0) must be finite"));
    }
    let dtilde = match input.dtilde {
        Some(d) => d.without_inner(),
        None => {
            let rho = domain.inner_chart_radius()?;
            domain.concentric_subdomain(0.5 * (1.0 + rho))?
        }
    };
    // D₀ ⋐ D̃ ⊆ D, checked on sampled boundaries
    for s in d0.boundary_samples(BOUNDARY_SAMPLES)? {
        if !dtilde.contains(s.point) {
            return Err(ConditionError::BadParameter("D0 must be compactly contained in the comparison domain"));
        }
    }
    let mut dtilde_compact = true;
    for s in dtilde.boundary_samples(BOUNDARY_SAMPLES)? {
        if !domain.contains_closure(s.point) {
            return Err(ConditionError::BadParameter("the comparison domain must lie in D"));
        }
        dtilde_compact &= domain.dist_to_boundary(s.point) > 1e-9;
    }

    let split = hahn_jordan_split(input.nu_m);
    let shell = |z: Complex| domain.in_shell(z);
    let tilde_shell = |z: Complex| dtilde.contains(z) && !d0.contains(z);
    let green = GreenField::new(dtilde.clone(), input.z0)?;
    let t_u = integrate_measure(v, input.nu_u, shell)?;
    let t_m = integrate_measure(v, input.nu_m, shell)?;
    let t_m_minus = integrate_measure(v, &split.negative, tilde_shell)?;
    let g_m = integrate_measure(&green, input.nu_m, |z| dtilde.contains(z))?;
    let g_m_minus = integrate_measure(&green, &split.negative, tilde_shell)?;

    // C·a ≤ r with a = u(z0) − M(z0) − G_M − G_M⁻ and r = T_M + T_M⁻ − T_u
    let a = input.u_z0 - m_z0 - g_m - g_m_minus;
    let r = t_m + t_m_minus - t_u;
    let c_min = if r >= 0.0 {
        Some(0.0)
    } else if a < 0.0 {
        Some(r / a)
    } else {
        None
    };
    let b = v.b_bound;
    let c_bar = c_min.and_then(|c| {
        let need = t_u - t_m + c * input.u_z0;
        if b + c > 0.0 {
            Some((need / (b + c)).max(0.0))
        } else {
            (need <= 0.0).then_some(0.0)
        }
    });
    let verdict = if c_min.is_some() { Verdict::Holds } else { Verdict::Fails };
    Ok(InequalityReport {
        t_u,
        t_m,
        t_m_minus,
        g_m,
        g_m_minus,
        u_z0: input.u_z0,
        m_z0,
        c_min,
        c_bar,
        b,
        dtilde,
        dtilde_compact,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CPrimeEstimate {
    /// `max(0, max_v (∫v dν − ∫v dν_M))` over the family.
    pub value: f64,
    /// `∫v dν − ∫v dν_M` for each member, in order.
    pub per_v: Vec<f64>,
}

/// Empirical `C′` for (C′) over a family of test functions.
pub fn estimate_c_prime(
    nu: &MeasureEstimate,
    nu_m: &MeasureEstimate,
    family: &[TestFunction],
) -> Result<CPrimeEstimate, ConditionError> {
    let mut per_v = Vec::with_capacity(family.len());
    for v in family {
        let shell = |z: Complex| v.domain.in_shell(z);
        per_v.push(integrate_measure(v, nu, shell)? - integrate_measure(v, nu_m, shell)?);
    }
    let value = per_v.iter().copied().fold(0.0, f64::max);
    Ok(CPrimeEstimate { value, per_v })
}
