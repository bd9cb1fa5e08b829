use super::series::{blaschke_functional, SeriesVerdict, SumTrace};
use super::{domain_grid, ConditionError, TestFunction, Verdict};
use crate::domain::DomainSpec;
use crate::expr::ScalarField;
use crate::ext::ExtReal;
use crate::potential::{integrate_measure, MeasureEstimate};
use crate::zeros::ZeroSequence;
use crate::Complex;

/// Slack allowed in `u ≤ M`.
pub const TOL_MAJORANT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantReport {
    pub holds: bool,
    /// `max (u − M)` over the checked nodes (`-∞` when every node has
    /// `u = −∞` or `M = +∞`).
    pub worst_violation: f64,
    pub worst_at: Option<Complex>,
    pub nodes: usize,
    pub h: f64,
    pub tol: f64,
}

/// Checks `u ≤ M + tol` at the grid nodes of `D ∖ D₀` where both evaluate.
pub fn verify_majorant<U, M>(u: &U, m: &M, domain: &DomainSpec, h: f64) -> Result<MajorantReport, ConditionError>
where
    U: ScalarField + ?Sized,
    M: ScalarField + ?Sized,
{
    let grid = domain_grid(domain, h)?;
    let (nx, ny) = grid.dims();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = None;
    let mut nodes = 0;
    for j in 0..ny {
        for i in 0..nx {
            let z = grid.node(i, j);
            if !domain.in_shell(z) {
                continue;
            }
            let (Ok(a), Ok(b)) = (u.value(z), m.value(z)) else {
                continue;
            };
            nodes += 1;
            let d = match (a, b) {
                (ExtReal::NegInf, _) | (_, ExtReal::PosInf) => f64::NEG_INFINITY,
                (ExtReal::PosInf, _) | (_, ExtReal::NegInf) => f64::INFINITY,
                (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
            };
            if d > worst {
                worst = d;
                worst_at = Some(z);
            }
        }
    }
    Ok(MajorantReport { holds: worst <= TOL_MAJORANT, worst_violation: worst, worst_at, nodes, h, tol: TOL_MAJORANT })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicationReport {
    pub majorant: MajorantReport,
    /// `I = ∫_{D∖D₀} v dν_M`.
    pub integral: f64,
    pub trace: SumTrace,
    /// Smallest `C′ ≥ 0` with `S_N ≤ I + C′`.
    pub c_prime: f64,
    pub verdict: Verdict,
    /// The trace diverges while `I` is finite and `log|f| ≤ M`: `f` would
    /// have to vanish identically.
    pub uniqueness_flag: bool,
}

/// The two sides of `log|f| ≤ M ⇒ Σ v(z_k) < ∞` on concrete data.
///
/// `zeros` are the zeros of `f` (located or supplied), `nu_m` the charge of
/// `M` and `majorant` the outcome of [`verify_majorant`]. The bound `b` of the
/// class is not needed here.
pub fn check_implication(
    zeros: &ZeroSequence,
    nu_m: &MeasureEstimate,
    v: &TestFunction,
    majorant: MajorantReport,
) -> Result<ImplicationReport, ConditionError> {
    if !majorant.holds {
        return Err(ConditionError::MajorantFails {
            violation: majorant.worst_violation,
            at: majorant.worst_at.unwrap_or_default(),
        });
    }
    let shell = |z: Complex| v.domain.in_shell(z);
    let integral = integrate_measure(v, nu_m, shell)?;
    let trace = blaschke_functional(v, zeros)?;
    let c_prime = (trace.total() - integral).max(0.0);
    let (verdict, uniqueness_flag) = match trace.verdict {
        SeriesVerdict::Convergent => (Verdict::Holds, false),
        SeriesVerdict::Divergent => (Verdict::Fails, integral.is_finite()),
        SeriesVerdict::Inconclusive => (Verdict::Inconclusive, false),
    };
    Ok(ImplicationReport { majorant, integral, trace, c_prime, verdict, uniqueness_flag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{make_test_function, TestKind};
    use crate::expr::{parse_function, FnField, LogModulus, RealField};
    use crate::zeros::{zero_counting_measure, ZeroEntry};
    use alloc::vec::Vec;

    fn shell() -> DomainSpec {
        DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.5).unwrap()).unwrap()
    }

    fn seq(points: &[f64]) -> ZeroSequence {
        let entries = points
            .iter()
            .map(|&r| ZeroEntry { location: Complex::new(r, 0.0), multiplicity: 1, refinement_error: 0.0 })
            .collect();
        ZeroSequence::new(entries, DomainSpec::unit_disk()).unwrap()
    }

    #[test]
    fn blaschke_below_zero() {
        let b = parse_function("blaschke(0.6; -0.3+0.7i; 0.1)").unwrap();
        let r = verify_majorant(&LogModulus(&b), &FnField(|_| 0.0), &shell(), 1.0 / 64.0).unwrap();
        assert!(r.holds && r.worst_violation < 0.0);
        let two = parse_function("2").unwrap();
        let r = verify_majorant(&LogModulus(&two), &FnField(|_| 0.0), &shell(), 1.0 / 64.0).unwrap();
        assert!(!r.holds);
        assert!((r.worst_violation - core::f64::consts::LN_2).abs() < 1e-15);
        let m = parse_function("logabs(blaschke(0.6; -0.3+0.7i; 0.1))").unwrap();
        let r = verify_majorant(&LogModulus(&b), &RealField(&m), &shell(), 1.0 / 64.0).unwrap();
        assert!(r.holds && r.worst_violation.abs() < 1e-12);
    }

    #[test]
    fn coinciding_sides() {
        let pts: Vec<f64> = (1..=12).map(|k| 1.0 - 2f64.powi(-k)).collect();
        let z = seq(&pts);
        let v = make_test_function(TestKind::LogInverse, shell()).unwrap();
        let maj = MajorantReport { holds: true, worst_violation: 0.0, worst_at: None, nodes: 0, h: 0.0, tol: TOL_MAJORANT };
        let r = check_implication(&z, &zero_counting_measure(&z), &v, maj).unwrap();
        assert!((r.integral - r.trace.total()).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_implication(&z, &MeasureEstimate::zero(), &v, maj).unwrap();
        assert_eq!(r.integral, 0.0);
        assert_eq!(r.c_prime, r.trace.total());
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn divergent_trace_raises_uniqueness_flag() {
        let pts: Vec<f64> = (2..=2000).map(|k| 1.0 - 1.0 / k as f64).collect();
        let v = make_test_function(TestKind::LogInverse, shell()).unwrap();
        let maj = MajorantReport { holds: true, worst_violation: 0.0, worst_at: None, nodes: 0, h: 0.0, tol: TOL_MAJORANT };
        let r = check_implication(&seq(&pts), &MeasureEstimate::zero(), &v, maj).unwrap();
        assert!(r.uniqueness_flag);
        assert_eq!(r.verdict, Verdict::Fails);
    }
}
