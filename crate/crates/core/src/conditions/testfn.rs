#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::{domain_grid, ConditionError, Verdict};
use crate::domain::{BoundaryCurve, DomainSpec, BOUNDARY_SAMPLES};
use crate::expr::{EvalError, FunctionSpec, ScalarField};
use crate::ext::{ComplexPoint, ExtReal};
use crate::potential::green_unit_disk;
use crate::Complex;

/// Nodes across the gap `dist(∂D₀, ∂D)` needed by [`validate_test_function`].
pub const MIN_GAP_NODES: usize = 32;
/// Default resolution of the validation run in [`make_test_function`].
const DEFAULT_GAP_NODES: f64 = 64.0;
/// Inflation of the sampled supremum on `∂D₀`.
const B_INFLATION: f64 = 1.01;
const O_LEVELS: usize = 1024;
const LEVEL_SAMPLES: usize = 512;
const COLLAR_STEPS: i32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// `g_D(·, z0)` with `z0 ∈ D₀`.
    GreenPole(Complex),
    /// `(1 − |φ(z)|²)^q`, `q ≥ 2`, for the chart `φ: D → 𝔻`.
    BoundaryPower(f64),
    /// `log 1/|φ(z)|`.
    LogInverse,
    /// A real expression in `z`.
    Custom(FunctionSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TestFlags {
    pub vanishes_on_boundary: bool,
    pub normal_derivative_vanishes: bool,
}

/// A test function on `D ∖ D₀`, extended by `0` outside `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    /// `D` with its inner domain `D₀`.
    pub domain: DomainSpec,
    pub scale: f64,
    /// Sampled supremum over `∂D₀`.
    pub b: f64,
    /// `b` inflated by 1%, the bound used for the class `sbh₀⁺(D∖D₀; ≤ b)`.
    pub b_bound: f64,
    pub flags: TestFlags,
}

impl TestFunction {
    /// Builds `v` and measures `b` on `∂D₀`, without validation.
    pub fn new(kind: TestKind, domain: DomainSpec) -> Result<TestFunction, ConditionError> {
        let d0 = domain.inner().ok_or(ConditionError::NoInnerDomain)?.clone();
        let t = domain.parametrisation().ok_or(ConditionError::UnsupportedDomain)?;
        let centre = t.apply_finite(Complex::new(0.0, 0.0)).finite();
        match &kind {
            TestKind::GreenPole(z0) => {
                if !d0.contains(*z0) {
                    return Err(ConditionError::PoleOutsideInner);
                }
            }
            TestKind::LogInverse => {
                if !centre.is_some_and(|c| d0.contains(c)) {
                    return Err(ConditionError::PoleOutsideInner);
                }
            }
            TestKind::BoundaryPower(q) => {
                if !(q.is_finite() && *q >= 2.0) {
                    return Err(ConditionError::BadParameter("the boundary power needs q >= 2"));
                }
                // Δ(1 − r²)^q = 4q(1 − r²)^(q−2)(q r² − 1): D₀ must cover r < 1/√q
                let core = 1.0 / q.sqrt();
                let phi = domain.chart().ok_or(ConditionError::UnsupportedDomain)?;
                let covered = centre.is_some_and(|c| d0.contains(c))
                    && d0.boundary_samples(BOUNDARY_SAMPLES)?.iter().all(|s| {
                        phi.apply_finite(s.point).finite().is_none_or(|w| w.norm() >= core)
                    });
                if !covered {
                    return Err(ConditionError::CoreNotExcluded(core));
                }
            }
            TestKind::Custom(_) => {}
        }
        let mut v = TestFunction { kind, domain, scale: 1.0, b: 0.0, b_bound: 0.0, flags: TestFlags::default() };
        let mut b: f64 = 0.0;
        for s in d0.boundary_samples(BOUNDARY_SAMPLES)? {
            match v.value(s.point)? {
                ExtReal::Finite(x) => b = b.max(x),
                ExtReal::PosInf => return Err(ConditionError::Validation("v is unbounded on the boundary of D0")),
                ExtReal::NegInf => {}
            }
        }
        v.b = b;
        v.b_bound = B_INFLATION * b;
        Ok(v)
    }

    /// `a·v` for `a > 0`.
    pub fn scaled(&self, a: f64) -> TestFunction {
        assert!(a > 0.0 && a.is_finite(), "scale must be positive");
        TestFunction {
            scale: self.scale * a,
            b: self.b * a,
            b_bound: self.b_bound * a,
            ..self.clone()
        }
    }

    /// The point where `v` has its logarithmic pole, if any.
    pub fn pole(&self) -> Option<Complex> {
        match &self.kind {
            TestKind::GreenPole(z0) => Some(*z0),
            TestKind::LogInverse => self.domain.parametrisation()?.apply_finite(Complex::new(0.0, 0.0)).finite(),
            _ => None,
        }
    }

    pub fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        if !self.domain.contains(z) {
            return Ok(ExtReal::Finite(0.0));
        }
        self.base(z, false)
    }

    /// The formula of `v` continued smoothly across `∂D` (for stencils that
    /// straddle the boundary).
    pub(crate) fn continued_value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        self.base(z, true)
    }

    fn base(&self, z: Complex, continued: bool) -> Result<ExtReal, EvalError> {
        let phi = self.domain.chart().ok_or(EvalError::OutsideDomain)?;
        let w = match phi.apply_finite(z) {
            ComplexPoint::Finite(w) => w,
            ComplexPoint::Infinity => return Err(EvalError::OutsideDomain),
        };
        let raw = match &self.kind {
            TestKind::GreenPole(z0) => {
                let w0 = phi.apply_finite(*z0).finite().ok_or(EvalError::OutsideDomain)?;
                let d2 = (w - w0).norm_sqr();
                if d2 == 0.0 {
                    ExtReal::PosInf
                } else if continued {
                    let (a, a0) = (w.norm(), w0.norm());
                    ExtReal::Finite(0.5 * ((1.0 - a) * (1.0 + a) * (1.0 - a0) * (1.0 + a0) / d2).ln_1p())
                } else {
                    ExtReal::Finite(green_unit_disk(w, w0).map_err(|_| EvalError::OutsideDomain)?)
                }
            }
            TestKind::LogInverse => match w.norm() {
                0.0 => ExtReal::PosInf,
                r => ExtReal::Finite(-r.ln()),
            },
            TestKind::BoundaryPower(q) => {
                let t = 1.0 - w.norm_sqr();
                if continued && q.fract() == 0.0 {
                    ExtReal::Finite(t.powi(*q as i32))
                } else {
                    ExtReal::Finite(t.max(0.0).powf(*q))
                }
            }
            TestKind::Custom(spec) => spec.real(z)?,
        };
        Ok(match raw {
            ExtReal::Finite(x) => ExtReal::Finite(self.scale * x),
            other => other,
        })
    }
}

impl ScalarField for TestFunction {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        TestFunction::value(self, z)
    }

    fn log_singularities(&self) -> Option<Vec<(Complex, f64)>> {
        match &self.kind {
            TestKind::GreenPole(_) | TestKind::LogInverse => self.pole().map(|p| vec![(p, -self.scale)]),
            TestKind::BoundaryPower(_) => Some(Vec::new()),
            TestKind::Custom(spec) => spec
                .real_log_charge()
                .map(|c| c.into_iter().map(|(a, w)| (a, w * self.scale)).collect()),
        }
    }
}

/// Outcome of [`validate_test_function`]; failures are entries, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub h: f64,
    pub nodes_across_gap: f64,
    /// At least [`MIN_GAP_NODES`] nodes across the gap.
    pub resolved: bool,
    /// Grid nodes of `D ∖ D₀` where `v` was sampled.
    pub nodes: usize,
    pub min_value: f64,
    pub max_value: f64,
    pub nonnegative: bool,
    /// Smallest undivided five-point Laplacian over stencils inside `D ∖ D₀`.
    pub worst_laplacian: f64,
    pub tol_sh: f64,
    pub subharmonic: bool,
    /// `(δ, max v)` on the level sets at distance `δ` from `∂D`.
    pub collars: Vec<(f64, f64)>,
    pub vanishes_on_boundary: bool,
    /// Largest `|∂v/∂n_in|` over sampled `∂D`.
    pub normal_derivative: f64,
    pub normal_derivative_vanishes: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.resolved && self.nonnegative && self.subharmonic && self.vanishes_on_boundary
    }

    pub fn flags(&self) -> TestFlags {
        TestFlags {
            vanishes_on_boundary: self.vanishes_on_boundary,
            normal_derivative_vanishes: self.normal_derivative_vanishes,
        }
    }

    /// The first failed check, for error messages.
    pub fn failure(&self) -> Option<&'static str> {
        if !self.resolved {
            Some("grid does not resolve the gap between D0 and the boundary")
        } else if !self.nonnegative {
            Some("v is negative")
        } else if !self.subharmonic {
            Some("discrete Laplacian below the subharmonicity tolerance")
        } else if !self.vanishes_on_boundary {
            Some("v does not tend to zero at the boundary")
        } else {
            None
        }
    }
}

/// Checks class membership of `v` on a grid of step `h`.
pub fn validate_test_function(v: &TestFunction, h: f64) -> ValidationReport {
    let domain = &v.domain;
    let gap = domain.shell_gap().unwrap_or(0.0);
    let mut report = ValidationReport {
        h,
        nodes_across_gap: gap / h,
        resolved: h > 0.0 && gap / h >= MIN_GAP_NODES as f64,
        nodes: 0,
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
        nonnegative: false,
        worst_laplacian: f64::INFINITY,
        tol_sh: 0.0,
        subharmonic: false,
        collars: Vec::new(),
        vanishes_on_boundary: false,
        normal_derivative: f64::NAN,
        normal_derivative_vanishes: false,
    };
    let grid = match (report.resolved, domain_grid(domain, h)) {
        (true, Ok(g)) => g,
        _ => {
            report.resolved = false;
            return report;
        }
    };
    let (nx, ny) = grid.dims();
    let sample = |i: usize, j: usize| -> Option<f64> {
        let z = grid.node(i, j);
        if !domain.in_shell(z) {
            return None;
        }
        v.value(z).ok().and_then(ExtReal::finite)
    };
    let mut rows: Vec<Vec<Option<f64>>> = Vec::with_capacity(ny);
    for j in 0..ny {
        rows.push((0..nx).map(|i| sample(i, j)).collect());
    }
    let mut nonneg_violation: f64 = 0.0;
    for row in &rows {
        for x in row.iter().flatten() {
            report.nodes += 1;
            report.min_value = report.min_value.min(*x);
            report.max_value = report.max_value.max(*x);
            nonneg_violation = nonneg_violation.min(*x);
        }
    }
    let scale = 1.0 + report.min_value.abs().max(report.max_value.abs());
    report.nonnegative = report.nodes > 0 && nonneg_violation >= -1e-12 * scale;
    report.tol_sh = 1e-6 * scale;
    for j in 1..ny.saturating_sub(1) {
        for i in 1..nx.saturating_sub(1) {
            let st = [rows[j][i], rows[j][i - 1], rows[j][i + 1], rows[j - 1][i], rows[j + 1][i]];
            if let [Some(c), Some(w), Some(e), Some(s), Some(n)] = st {
                report.worst_laplacian = report.worst_laplacian.min((w + e) + (s + n) - 4.0 * c);
            }
        }
    }
    report.subharmonic = report.nodes > 0 && report.worst_laplacian >= -report.tol_sh;

    let samples = domain.boundary_samples(BOUNDARY_SAMPLES).unwrap_or_default();
    let collar_max = |delta: f64| -> f64 {
        samples
            .iter()
            .map(|s| match v.value(s.point + s.inward_normal * delta) {
                Ok(x) => x.to_f64(),
                Err(_) => f64::INFINITY,
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    for k in 1..=COLLAR_STEPS {
        let delta = gap * 2f64.powi(-k);
        report.collars.push((delta, collar_max(delta)));
    }
    report.vanishes_on_boundary =
        !samples.is_empty() && report.collars.last().is_some_and(|&(_, m)| m.abs() <= 1e-6 * scale);

    // second-order one-sided difference along the inward normal
    let delta = 1e-4 * gap;
    let mut worst: f64 = 0.0;
    for s in &samples {
        let at = |t: f64| v.value(s.point + s.inward_normal * t).map(ExtReal::to_f64).unwrap_or(f64::NAN);
        let d = (-3.0 * at(0.0) + 4.0 * at(delta) - at(2.0 * delta)) / (2.0 * delta);
        worst = if d.is_nan() { f64::NAN } else { worst.max(d.abs()) };
        if worst.is_nan() {
            break;
        }
    }
    report.normal_derivative = worst;
    report.normal_derivative_vanishes = !samples.is_empty() && worst <= 1e-6 * scale;
    report
}

/// [`TestFunction::new`] followed by validation on a grid with 64 nodes
/// across the gap; the returned function carries the measured flags.
pub fn make_test_function(kind: TestKind, domain: DomainSpec) -> Result<TestFunction, ConditionError> {
    let mut v = TestFunction::new(kind, domain)?;
    let gap = v.domain.shell_gap()?;
    let report = validate_test_function(&v, gap / DEFAULT_GAP_NODES);
    if let Some(reason) = report.failure() {
        return Err(ConditionError::Validation(reason));
    }
    v.flags = report.flags();
    Ok(v)
}

/// Collar for one `ε`: `v < ε` on `{z : dist(z, ∂D) < margin}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collar {
    pub eps: f64,
    pub margin: Option<f64>,
    /// Radius of the inner edge of the collar, `R − margin` for `∂D` a circle
    /// of radius `R`.
    pub level_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OReport {
    pub collars: Vec<Collar>,
    pub verdict: Verdict,
}

/// For each `ε`, the widest collar along `∂D` on which `v < ε`.
///
/// Level sets `{dist(z, ∂D) = δ}` are scanned at 1024 depths and the first
/// crossing is bisected. The scan continues into `D₀` wherever `v` is
/// defined there.
pub fn check_o_condition(v: &TestFunction, epsilons: &[f64]) -> Result<OReport, ConditionError> {
    let Some(BoundaryCurve::Circle { radius, interior: true, .. }) = v.domain.boundary() else {
        return Err(ConditionError::UnsupportedDomain);
    };
    let mut collars = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ConditionError::BadParameter("epsilon must be positive"));
        }
        let bad = |delta: f64| -> Result<bool, ConditionError> {
            for z in v.domain.level_curve(delta, LEVEL_SAMPLES)? {
                match v.value(z) {
                    Ok(ExtReal::Finite(x)) if x < eps => {}
                    Ok(ExtReal::NegInf) => {}
                    _ => return Ok(true),
                }
            }
            Ok(false)
        };
        let step = radius / O_LEVELS as f64;
        let mut bracket = None;
        for k in 1..O_LEVELS {
            if bad(step * k as f64)? {
                bracket = Some((step * (k - 1) as f64, step * k as f64));
                break;
            }
        }
        let margin = match bracket {
            None => Some(radius),
            Some((lo, hi)) if lo > 0.0 => Some(bisect(&bad, lo, hi, radius)?),
            Some((_, hi)) => {
                let mut found = None;
                for m in 1..=40 {
                    let d = hi * 2f64.powi(-m);
                    if !bad(d)? {
                        found = Some(bisect(&bad, d, 2.0 * d, radius)?);
                        break;
                    }
                }
                found
            }
        };
        collars.push(Collar { eps, margin, level_radius: margin.map(|m| radius - m) });
    }
    let verdict = if collars.iter().all(|c| c.margin.is_some()) { Verdict::Holds } else { Verdict::Fails };
    Ok(OReport { collars, verdict })
}

/// `lo` good, `hi` bad; returns the good end of the final bracket.
fn bisect(
    bad: &impl Fn(f64) -> Result<bool, ConditionError>,
    mut lo: f64,
    mut hi: f64,
    scale: f64,
) -> Result<f64, ConditionError> {
    while hi - lo > 1e-13 * scale {
        let mid = 0.5 * (lo + hi);
        if bad(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}
