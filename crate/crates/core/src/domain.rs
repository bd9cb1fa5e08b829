//! Sub-domains of the extended plane that are Möbius images of the unit disk.
//!
//! Every bounded kind carries a chart `φ: D → 𝔻`; Green's functions,
//! boundary distances and collars are all computed through it.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::ext::ComplexPoint;
use crate::Complex;

/// Number of boundary samples used for containment and suprema on `∂D₀`.
pub const BOUNDARY_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("Möbius coefficients are degenerate (ad - bc = 0)")]
    DegenerateMoebius,
    #[error("disk radius must be finite and positive, got {0}")]
    BadRadius(f64),
    #[error("inner domain is not compactly contained in the outer domain")]
    NotCompactlyContained,
    #[error("inner domain must be bounded")]
    UnboundedInner,
    #[error("operation needs a bounded domain")]
    Unbounded,
    #[error("operation is not supported for the whole plane")]
    WholePlane,
}

/// `w ↦ (a w + b) / (c w + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Moebius {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Moebius, DomainError> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(DomainError::DegenerateMoebius);
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Moebius {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Moebius { a: one, b: zero, c: zero, d: one }
    }

    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        match z {
            ComplexPoint::Finite(z) => self.apply_finite(z),
            ComplexPoint::Infinity => {
                if self.c.norm() == 0.0 {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::from(self.a / self.c)
                }
            }
        }
    }

    pub fn apply_finite(&self, z: Complex) -> ComplexPoint {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return ComplexPoint::Infinity;
        }
        ComplexPoint::from((self.a * z + self.b) / den)
    }

    pub fn inverse(&self) -> Moebius {
        Moebius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn derivative(&self, w: Complex) -> Complex {
        let den = self.c * w + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    UnitDisk,
    Disk { center: Complex, radius: f64 },
    /// `T(𝔻)` for the map `T` (not its inverse).
    MoebiusImageOfDisk(Moebius),
    WholePlane,
}

/// The boundary of a disk-type domain: a circle or a straight line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCurve {
    /// `interior` is true when the domain lies inside the circle.
    Circle { center: Complex, radius: f64, interior: bool },
    /// `normal` is a unit vector pointing into the domain.
    Line { point: Complex, normal: Complex },
}

impl BoundaryCurve {
    pub fn distance(&self, z: Complex) -> f64 {
        match *self {
            BoundaryCurve::Circle { center, radius, .. } => ((z - center).norm() - radius).abs(),
            BoundaryCurve::Line { point, normal } => {
                let d = z - point;
                (d.re * normal.re + d.im * normal.im).abs()
            }
        }
    }
}

/// A point of a domain boundary with the inward unit normal and `|dζ/dθ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: Complex,
    pub inward_normal: Complex,
    pub speed: f64,
}

/// A domain `D ⊂ ℂ∞` with an optional excluded sub-domain `D₀ ⋐ D`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub inner: Option<Box<DomainSpec>>,
    pub regular: bool,
}

impl DomainSpec {
    pub fn unit_disk() -> DomainSpec {
        DomainSpec { kind: DomainKind::UnitDisk, inner: None, regular: true }
    }

    pub fn disk(center: Complex, radius: f64) -> Result<DomainSpec, DomainError> {
        if !(radius.is_finite() && radius > 0.0) || !center.is_finite() {
            return Err(DomainError::BadRadius(radius));
        }
        Ok(DomainSpec { kind: DomainKind::Disk { center, radius }, inner: None, regular: true })
    }

    pub fn moebius_image(map: Moebius) -> Result<DomainSpec, DomainError> {
        let map = Moebius::new(map.a, map.b, map.c, map.d)?;
        Ok(DomainSpec { kind: DomainKind::MoebiusImageOfDisk(map), inner: None, regular: true })
    }

    pub fn whole_plane() -> DomainSpec {
        DomainSpec { kind: DomainKind::WholePlane, inner: None, regular: false }
    }

    /// Attaches `D₀` after checking `D₀ ⋐ D` on sampled boundary points.
    pub fn with_inner(mut self, inner: DomainSpec) -> Result<DomainSpec, DomainError> {
        if !inner.is_bounded() {
            return Err(DomainError::UnboundedInner);
        }
        let samples = inner.boundary_samples(BOUNDARY_SAMPLES)?;
        let mut min_gap = f64::INFINITY;
        for s in &samples {
            if !self.contains(s.point) {
                return Err(DomainError::NotCompactlyContained);
            }
            min_gap = min_gap.min(self.dist_to_boundary(s.point));
        }
        if !(min_gap > 0.0) {
            return Err(DomainError::NotCompactlyContained);
        }
        self.inner = Some(Box::new(inner.without_inner()));
        Ok(self)
    }

    pub fn without_inner(&self) -> DomainSpec {
        DomainSpec { kind: self.kind.clone(), inner: None, regular: self.regular }
    }

    pub fn inner(&self) -> Option<&DomainSpec> {
        self.inner.as_deref()
    }

    /// The chart `φ` sending `D` onto the unit disk.
    pub fn chart(&self) -> Option<Moebius> {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match &self.kind {
            DomainKind::UnitDisk => Some(Moebius::identity()),
            DomainKind::Disk { center, radius } => Some(Moebius {
                a: one,
                b: -*center,
                c: zero,
                d: Complex::new(*radius, 0.0),
            }),
            DomainKind::MoebiusImageOfDisk(t) => Some(t.inverse()),
            DomainKind::WholePlane => None,
        }
    }

    /// The parametrisation `T: 𝔻 → D` (inverse of the chart).
    pub fn parametrisation(&self) -> Option<Moebius> {
        self.chart().map(|m| m.inverse())
    }

    pub fn contains_point(&self, z: ComplexPoint) -> bool {
        match self.chart() {
            None => matches!(z, ComplexPoint::Finite(_)),
            Some(phi) => match phi.apply(z) {
                ComplexPoint::Finite(w) => w.norm() < 1.0,
                ComplexPoint::Infinity => false,
            },
        }
    }

    pub fn contains(&self, z: Complex) -> bool {
        match &self.kind {
            DomainKind::UnitDisk => z.norm() < 1.0,
            DomainKind::Disk { center, radius } => (z - center).norm() < *radius,
            DomainKind::WholePlane => z.is_finite(),
            DomainKind::MoebiusImageOfDisk(_) => self.contains_point(ComplexPoint::Finite(z)),
        }
    }

    /// Membership in `D̄`, with a relative slack of `1e-12` in the chart.
    pub fn contains_closure(&self, z: Complex) -> bool {
        match &self.kind {
            DomainKind::UnitDisk => z.norm() <= 1.0 + 1e-12,
            DomainKind::Disk { center, radius } => (z - center).norm() <= radius * (1.0 + 1e-12),
            DomainKind::WholePlane => z.is_finite(),
            DomainKind::MoebiusImageOfDisk(t) => match t.inverse().apply_finite(z) {
                ComplexPoint::Finite(w) => w.norm() <= 1.0 + 1e-12,
                ComplexPoint::Infinity => false,
            },
        }
    }

    /// `z ∈ D ∖ D₀` (points of `∂D₀` belong to the shell).
    pub fn in_shell(&self, z: Complex) -> bool {
        self.contains(z) && !self.inner().is_some_and(|d0| d0.contains(z))
    }

    pub fn boundary(&self) -> Option<BoundaryCurve> {
        match &self.kind {
            DomainKind::UnitDisk => Some(BoundaryCurve::Circle {
                center: Complex::new(0.0, 0.0),
                radius: 1.0,
                interior: true,
            }),
            DomainKind::Disk { center, radius } => Some(BoundaryCurve::Circle {
                center: *center,
                radius: *radius,
                interior: true,
            }),
            DomainKind::WholePlane => None,
            DomainKind::MoebiusImageOfDisk(t) => Some(moebius_boundary(t)),
        }
    }

    /// Euclidean distance to `∂D` (`+∞` for the whole plane).
    pub fn dist_to_boundary(&self, z: Complex) -> f64 {
        match self.boundary() {
            Some(curve) => curve.distance(z),
            None => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self.boundary(),
            Some(BoundaryCurve::Circle { interior: true, .. })
        )
    }

    /// Axis-aligned bounding box `(lower_left, upper_right)` of `D̄`.
    pub fn bounding_box(&self) -> Result<(Complex, Complex), DomainError> {
        match self.boundary() {
            Some(BoundaryCurve::Circle { center, radius, interior: true }) => Ok((
                center - Complex::new(radius, radius),
                center + Complex::new(radius, radius),
            )),
            None => Err(DomainError::WholePlane),
            _ => Err(DomainError::Unbounded),
        }
    }

    /// `n` equispaced (in the chart) samples of `∂D`, dropping `∞`.
    pub fn boundary_samples(&self, n: usize) -> Result<Vec<BoundarySample>, DomainError> {
        let t = self.parametrisation().ok_or(DomainError::WholePlane)?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let w = Complex::from_polar(1.0, theta);
            let ComplexPoint::Finite(point) = t.apply_finite(w) else {
                continue;
            };
            let dt = t.derivative(w);
            // T maps the inward normal -w at w to T'(w)·(-w).
            let n_dir = dt * (-w);
            let speed = dt.norm();
            if !(speed.is_finite() && speed > 0.0) {
                continue;
            }
            out.push(BoundarySample { point, inward_normal: n_dir / n_dir.norm(), speed });
        }
        Ok(out)
    }

    /// Points of `D` at distance `delta` from a circular `∂D`.
    pub fn level_curve(&self, delta: f64, n: usize) -> Result<Vec<Complex>, DomainError> {
        match self.boundary() {
            Some(BoundaryCurve::Circle { center, radius, interior }) => {
                let rho = if interior { radius - delta } else { radius + delta };
                if rho <= 0.0 {
                    return Ok(Vec::new());
                }
                Ok((0..n)
                    .map(|k| center + Complex::from_polar(rho, 2.0 * PI * k as f64 / n as f64))
                    .collect())
            }
            Some(BoundaryCurve::Line { .. }) => Err(DomainError::Unbounded),
            None => Err(DomainError::WholePlane),
        }
    }

    /// `T(D(0, s))` for the parametrisation `T`, `0 < s < 1`.
    pub fn concentric_subdomain(&self, s: f64) -> Result<DomainSpec, DomainError> {
        if !(s > 0.0 && s < 1.0) {
            return Err(DomainError::BadRadius(s));
        }
        match &self.kind {
            DomainKind::UnitDisk => DomainSpec::disk(Complex::new(0.0, 0.0), s),
            DomainKind::Disk { center, radius } => DomainSpec::disk(*center, radius * s),
            DomainKind::MoebiusImageOfDisk(t) => DomainSpec::moebius_image(Moebius {
                a: t.a * s,
                b: t.b,
                c: t.c * s,
                d: t.d,
            }),
            DomainKind::WholePlane => Err(DomainError::WholePlane),
        }
    }

    /// Largest chart modulus over sampled `∂D₀`.
    pub fn inner_chart_radius(&self) -> Result<f64, DomainError> {
        let phi = self.chart().ok_or(DomainError::WholePlane)?;
        let d0 = self.inner().ok_or(DomainError::UnboundedInner)?;
        let mut rho: f64 = 0.0;
        for s in d0.boundary_samples(BOUNDARY_SAMPLES)? {
            if let ComplexPoint::Finite(w) = phi.apply_finite(s.point) {
                rho = rho.max(w.norm());
            }
        }
        Ok(rho)
    }

    /// Smallest distance from sampled `∂D₀` to `∂D`.
    pub fn shell_gap(&self) -> Result<f64, DomainError> {
        let d0 = self.inner().ok_or(DomainError::UnboundedInner)?;
        let samples = d0.boundary_samples(BOUNDARY_SAMPLES)?;
        Ok(samples
            .iter()
            .map(|s| self.dist_to_boundary(s.point))
            .fold(f64::INFINITY, f64::min))
    }
}

fn moebius_boundary(t: &Moebius) -> BoundaryCurve {
    let img = |w: Complex| t.apply_finite(w).finite();
    let pts = [
        img(Complex::new(1.0, 0.0)),
        img(Complex::new(0.0, 1.0)),
        img(Complex::new(-1.0, 0.0)),
        img(Complex::new(0.0, -1.0)),
    ];
    let interior_point = [0.0, 0.5, -0.5]
        .iter()
        .find_map(|&x| img(Complex::new(x, 0.0)))
        .expect("a Möbius map has a single pole");
    let finite: Vec<Complex> = pts.iter().flatten().copied().collect();
    let (p, q, r) = (finite[0], finite[1], finite[2]);
    let cross = (q - p).re * (r - p).im - (q - p).im * (r - p).re;
    let scale = (q - p).norm() * (r - p).norm();
    if finite.len() < 4 || cross.abs() <= 1e-12 * scale {
        // the image of the circle passes through ∞: a line
        let dir = (q - p) / (q - p).norm();
        let mut normal = Complex::new(-dir.im, dir.re);
        let side = (interior_point - p).re * normal.re + (interior_point - p).im * normal.im;
        if side < 0.0 {
            normal = -normal;
        }
        return BoundaryCurve::Line { point: p, normal };
    }
    let d = 2.0 * cross;
    let (b, c) = (q - p, r - p);
    let b2 = b.norm_sqr();
    let c2 = c.norm_sqr();
    let ux = (c.im * b2 - b.im * c2) / d;
    let uy = (b.re * c2 - c.re * b2) / d;
    let center = p + Complex::new(ux, uy);
    let radius = Complex::new(ux, uy).norm();
    let interior = (interior_point - center).norm() < radius;
    BoundaryCurve::Circle { center, radius, interior }
}
