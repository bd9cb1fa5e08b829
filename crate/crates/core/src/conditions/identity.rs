use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{ConditionError, TestFunction};
use crate::domain::BOUNDARY_SAMPLES;
use crate::expr::ScalarField;
use crate::ext::ExtReal;
use crate::quad::{pairwise_sum, GaussLegendre};
use crate::Complex;

const RADIAL_PANELS: usize = 4;
const RADIAL_NODES: usize = 16;
const ANGULAR_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `|R|`.
    pub residual: f64,
    /// `∫_{D∖D₀} v dν_M`.
    pub v_dnu_m: f64,
    /// `∫_{D∖D₀} M dν_v`.
    pub m_dnu_v: f64,
    /// `(1/2π) ∮_{∂D₀} (v ∂M/∂n − M ∂v/∂n) ds`, `n` pointing into `D₀`.
    pub boundary_term: f64,
    pub h: f64,
    pub nodes: usize,
}

/// `|∫ v dν_M − ∫ M dν_v − (1/2π)∮_{∂D₀}(v ∂ₙM − M ∂ₙv) ds|` over `D ∖ D₀`.
///
/// Computed in the chart, where `D` is the unit disk and `D₀` must be a
/// concentric disk `D(0, ρ₀)`; both sides are conformally invariant.
/// Laplacians and normal derivatives use central differences of step `h`,
/// and the area and contour integrals use polar Gauss–Legendre and
/// trapezoidal rules. The residual is `O(h²)` for smooth `M` and `v`.
pub fn green_identity_residual<M: ScalarField + ?Sized>(
    m: &M,
    v: &TestFunction,
    h: f64,
) -> Result<IdentityReport, ConditionError> {
    if !(v.flags.vanishes_on_boundary && v.flags.normal_derivative_vanishes) {
        return Err(ConditionError::FlagsNotSet);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(ConditionError::BadParameter("h must be positive"));
    }
    let domain = &v.domain;
    let d0 = domain.inner().ok_or(ConditionError::NoInnerDomain)?;
    let phi = domain.chart().ok_or(ConditionError::UnsupportedDomain)?;
    let t = phi.inverse();
    let mut radii = Vec::new();
    for s in d0.boundary_samples(BOUNDARY_SAMPLES)? {
        radii.push(phi.apply_finite(s.point).finite().ok_or(ConditionError::UnsupportedDomain)?.norm());
    }
    let rho0 = radii.iter().copied().fold(0.0, f64::max);
    if radii.iter().any(|r| (r - rho0).abs() > 1e-9 * rho0) {
        return Err(ConditionError::UnsupportedDomain);
    }

    let to_z = |w: Complex| t.apply_finite(w).finite().ok_or(ConditionError::UnsupportedDomain);
    let mv = |w: Complex| -> Result<f64, ConditionError> { finite(m.value(to_z(w)?)?) };
    let vv = |w: Complex| -> Result<f64, ConditionError> { finite(v.continued_value(to_z(w)?)?) };
    let lap = |f: &dyn Fn(Complex) -> Result<f64, ConditionError>, w: Complex| -> Result<f64, ConditionError> {
        let (e, x, n, s) = (f(w + h)?, f(w - h)?, f(w + Complex::new(0.0, h))?, f(w - Complex::new(0.0, h))?);
        Ok(((e + x) + (n + s) - 4.0 * f(w)?) / (h * h))
    };

    let rule = GaussLegendre::new(RADIAL_NODES);
    let panel = (1.0 - rho0) / RADIAL_PANELS as f64;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let dtheta = 2.0 * PI / ANGULAR_NODES as f64;
    for p in 0..RADIAL_PANELS {
        let lo = rho0 + p as f64 * panel;
        for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
            let rho = lo + 0.5 * panel * (1.0 + x);
            let weight = 0.5 * panel * wx * rho * dtheta / (2.0 * PI);
            for k in 0..ANGULAR_NODES {
                let w = Complex::from_polar(rho, (k as f64 + 0.5) * dtheta);
                a1.push(weight * vv(w)? * lap(&mv, w)?);
                a2.push(weight * mv(w)? * lap(&vv, w)?);
            }
        }
    }
    let mut bt = Vec::new();
    for k in 0..ANGULAR_NODES {
        let u = Complex::from_polar(1.0, (k as f64 + 0.5) * dtheta);
        let w = u * rho0;
        // derivative along n = −u (into D₀)
        let dn = |f: &dyn Fn(Complex) -> Result<f64, ConditionError>| -> Result<f64, ConditionError> {
            Ok((f(w - u * h)? - f(w + u * h)?) / (2.0 * h))
        };
        let term = vv(w)? * dn(&mv)? - mv(w)? * dn(&vv)?;
        bt.push(term * rho0 * dtheta / (2.0 * PI));
    }
    let v_dnu_m = pairwise_sum(&a1);
    let m_dnu_v = pairwise_sum(&a2);
    let boundary_term = pairwise_sum(&bt);
    Ok(IdentityReport {
        residual: (v_dnu_m - m_dnu_v - boundary_term).abs(),
        v_dnu_m,
        m_dnu_v,
        boundary_term,
        h,
        nodes: a1.len() + bt.len(),
    })
}

fn finite(x: ExtReal) -> Result<f64, ConditionError> {
    x.finite().ok_or(ConditionError::BadParameter("the identity needs finite M and v"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{make_test_function, TestKind};
    use crate::domain::DomainSpec;
    use crate::expr::{parse_function, RealField};

    fn power() -> TestFunction {
        let d = DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.75).unwrap()).unwrap();
        make_test_function(TestKind::BoundaryPower(2.0), d).unwrap()
    }

    #[test]
    fn smooth_corpus() {
        let v = power();
        for text in ["re(z)^2 - im(z)^2 + 3*re(z)", "2.5", "abs(z)^4 + abs(z)^2"] {
            let m = parse_function(text).unwrap();
            let r1 = green_identity_residual(&RealField(&m), &v, 1.0 / 256.0).unwrap();
            let r2 = green_identity_residual(&RealField(&m), &v, 1.0 / 512.0).unwrap();
            assert!(r1.residual < 1e-3, "{text}: {}", r1.residual);
            assert!(r2.residual <= 0.5 * r1.residual + 1e-6, "{text}: {} vs {}", r2.residual, r1.residual);
        }
    }

    #[test]
    fn harmonic_m_has_no_charge() {
        let m = parse_function("re(z)^2 - im(z)^2 + 2").unwrap();
        let r = green_identity_residual(&RealField(&m), &power(), 1.0 / 256.0).unwrap();
        assert!(r.v_dnu_m.abs() < 1e-9);
        assert!(r.m_dnu_v.abs() > 1e-3);
    }

    #[test]
    fn m_equal_to_v() {
        let v = power();
        let m = crate::expr::FnField(|z| v.continued_value(z).unwrap().to_f64());
        let r = green_identity_residual(&m, &v, 1.0 / 128.0).unwrap();
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn flags_are_required() {
        let d = DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.5).unwrap()).unwrap();
        let v = make_test_function(TestKind::LogInverse, d).unwrap();
        let m = parse_function("1").unwrap();
        assert_eq!(green_identity_residual(&RealField(&m), &v, 0.01), Err(ConditionError::FlagsNotSet));
    }
}
