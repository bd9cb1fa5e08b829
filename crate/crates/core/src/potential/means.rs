#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;


use super::measure::{log_potential_at, MeasureEstimate};
use super::PotentialError;
use crate::expr::{EvalError, ScalarField};
use crate::ext::ExtReal;
use crate::quad::{pairwise_sum, GaussLegendre};
use crate::Complex;

/// Default radial and angular node counts of [`disk_mean`].
pub const DISK_RADIAL_NODES: usize = 48;
pub const DISK_ANGULAR_NODES: usize = 96;

/// Singular terms `(a, w)` within `reach` of `z`.
fn near_singularities<F: ScalarField + ?Sized>(m: &F, z: Complex, reach: f64) -> Vec<(Complex, f64)> {
    m.log_singularities()
        .unwrap_or_default()
        .into_iter()
        .filter(|(a, w)| *w != 0.0 && (a - z).norm() < reach)
        .collect()
}

fn map_eval(e: EvalError) -> PotentialError {
    match e {
        EvalError::OutsideDomain => PotentialError::ExitsDomain,
        e => PotentialError::Eval(e),
    }
}

/// `M(ζ) − Σ w log|ζ − a|`, or `None` at a non-finite sample.
fn remainder<F: ScalarField + ?Sized>(
    m: &F,
    zeta: Complex,
    sing: &[(Complex, f64)],
) -> Result<Option<f64>, PotentialError> {
    let v = match m.value(zeta).map_err(map_eval)? {
        ExtReal::Finite(v) => v,
        _ => return Ok(None),
    };
    let mut s = v;
    for (a, w) in sing {
        let d = (zeta - a).norm();
        if d == 0.0 {
            return Ok(None);
        }
        s -= w * d.ln();
    }
    Ok(s.is_finite().then_some(s))
}

/// `(1/2π) ∫ M(z + r e^{iθ}) dθ` by the trapezoidal rule on `nodes` angles.
///
/// Known log singularities near the circle are integrated in closed form
/// (`log max(r, |a − z|)`) and only the smooth remainder is sampled. Samples
/// at `±∞` are dropped from the average.
pub fn circular_mean<F: ScalarField + ?Sized>(m: &F, z: Complex, r: f64, nodes: usize) -> Result<f64, PotentialError> {
    if !(r > 0.0 && r.is_finite()) || nodes == 0 {
        return Err(PotentialError::BadRadius(r));
    }
    let sing = near_singularities(m, z, 2.0 * r);
    let mut terms = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let zeta = z + Complex::from_polar(r, 2.0 * PI * k as f64 / nodes as f64);
        if let Some(s) = remainder(m, zeta, &sing)? {
            terms.push(s);
        }
    }
    if terms.is_empty() {
        return Err(PotentialError::AllSamplesInfinite);
    }
    let smooth = pairwise_sum(&terms) / terms.len() as f64;
    let exact: Vec<f64> = sing.iter().map(|(a, w)| w * r.max((a - z).norm()).ln()).collect();
    Ok(smooth + pairwise_sum(&exact))
}

/// Area mean of `log|ζ − a|` over `D(z, r)`.
pub fn log_disk_mean(a: Complex, z: Complex, r: f64) -> f64 {
    let s = (a - z).norm();
    if s >= r {
        s.ln()
    } else {
        r.ln() - (r * r - s * s) / (2.0 * r * r)
    }
}

/// `(1/πr²) ∫_{D(z,r)} M dλ` with default node counts.
pub fn disk_mean<F: ScalarField + ?Sized>(m: &F, z: Complex, r: f64) -> Result<f64, PotentialError> {
    disk_mean_with(m, z, r, DISK_RADIAL_NODES, DISK_ANGULAR_NODES)
}

/// Gauss–Legendre in the radius times the trapezoidal rule in the angle,
/// with the same singularity subtraction as [`circular_mean`].
pub fn disk_mean_with<F: ScalarField + ?Sized>(
    m: &F,
    z: Complex,
    r: f64,
    radial: usize,
    angular: usize,
) -> Result<f64, PotentialError> {
    if !(r > 0.0 && r.is_finite()) || radial == 0 || angular == 0 {
        return Err(PotentialError::BadRadius(r));
    }
    let sing = near_singularities(m, z, 2.0 * r);
    let rule = GaussLegendre::new(radial);
    let mut terms = Vec::with_capacity(radial * angular);
    let mut weights = Vec::with_capacity(radial * angular);
    for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
        let rho = 0.5 * r * (1.0 + x);
        let w = wx * rho;
        for k in 0..angular {
            let theta = 2.0 * PI * (k as f64 + 0.5) / angular as f64;
            if let Some(s) = remainder(m, z + Complex::from_polar(rho, theta), &sing)? {
                terms.push(w * s);
                weights.push(w);
            }
        }
    }
    if terms.is_empty() {
        return Err(PotentialError::AllSamplesInfinite);
    }
    let smooth = pairwise_sum(&terms) / pairwise_sum(&weights);
    let exact: Vec<f64> = sing.iter().map(|(a, w)| w * log_disk_mean(*a, z, r)).collect();
    Ok(smooth + pairwise_sum(&exact))
}

/// Recovers `M(z)` as the limit of disk means (Richardson extrapolation in
/// `r²` over `r, r/2, r/4`). Returns `+∞` when the local log potential of
/// `|ν_M|` (if given) or a known singularity of `M` makes `z ∉ dom_M`.
pub fn recover_value<F: ScalarField + ?Sized>(
    m: &F,
    charge: Option<&MeasureEstimate>,
    z: Complex,
    r: f64,
) -> Result<ExtReal, PotentialError> {
    if let Some(nu) = charge {
        if log_potential_at(&nu.abs(), z, r) == ExtReal::NegInf {
            return Ok(ExtReal::PosInf);
        }
    }
    if !m.value(z).map_err(map_eval)?.is_finite() {
        return Ok(ExtReal::PosInf);
    }
    let sing = m.log_singularities().unwrap_or_default();
    let mut r_eff = r;
    for (a, w) in &sing {
        let d = (a - z).norm();
        if *w != 0.0 {
            if d == 0.0 {
                return Ok(ExtReal::PosInf);
            }
            r_eff = r_eff.min(0.5 * d);
        }
    }
    let m0 = disk_mean(m, z, r_eff)?;
    let m1 = disk_mean(m, z, 0.5 * r_eff)?;
    let m2 = disk_mean(m, z, 0.25 * r_eff)?;
    let r1 = (4.0 * m1 - m0) / 3.0;
    let r2 = (4.0 * m2 - m1) / 3.0;
    Ok(ExtReal::Finite((16.0 * r2 - r1) / 15.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_function, FnField, LogModulus, RealField};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn harmonic_means() {
        let m = parse_function("re(z)").unwrap();
        let v = circular_mean(&RealField(&m), c(0.2, 0.0), 0.1, 64).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
        let v = disk_mean(&RealField(&m), c(0.2, 0.0), 0.1).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
    }

    #[test]
    fn log_kernel_means() {
        let m = parse_function("logabs(z)").unwrap();
        let v = circular_mean(&RealField(&m), c(0.0, 0.0), 0.5, 64).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        let v = disk_mean(&RealField(&m), c(0.0, 0.0), 1.0).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
        let m = parse_function("logabs(z - 0.3)").unwrap();
        let v = circular_mean(&RealField(&m), c(0.0, 0.0), 0.5, 64).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn unregistered_singularity_converges_slowly() {
        // without subtraction the trapezoid rule still converges (to ~1e-3 here)
        let v = circular_mean(&FnField(|z: Complex| (z - 0.3).norm().ln()), c(0.0, 0.0), 0.5, 256).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn constant_disk_mean() {
        let v = disk_mean(&FnField(|_| 3.25), c(0.1, 0.1), 0.3).unwrap();
        assert!((v - 3.25).abs() < 1e-14);
    }

    #[test]
    fn circle_outside_domain() {
        let b = parse_function("blaschke(0.2)").unwrap();
        assert_eq!(circular_mean(&LogModulus(&b), c(0.5, 0.0), 0.6, 64), Err(PotentialError::ExitsDomain));
    }

    #[test]
    fn recovery_of_smooth_and_singular_values() {
        let m = parse_function("abs(z)^2 + logabs(z - 0.3)").unwrap();
        let v = recover_value(&RealField(&m), None, c(0.1, 0.2), 0.1).unwrap().to_f64();
        let exact = 0.05 + (c(0.1, 0.2) - 0.3).norm().ln();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
        assert_eq!(recover_value(&RealField(&m), None, c(0.3, 0.0), 0.1).unwrap(), ExtReal::PosInf);
        let nu = MeasureEstimate::from_atoms(alloc::vec![(c(0.0, 0.0), 1.0)]);
        assert_eq!(recover_value(&FnField(|_| 0.0), Some(&nu), c(0.0, 0.0), 0.1).unwrap(), ExtReal::PosInf);
    }
}
