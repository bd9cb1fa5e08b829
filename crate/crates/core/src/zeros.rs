//! Zero counting by the argument principle and zero location by recursive
//! subdivision.
//!
//! [`winding_number`] tracks `arg f` along a closed contour, bisecting any
//! segment whose argument increment reaches `π/2`. [`locate_zeros`] runs a
//! quadtree over the search region: boxes with winding number 0 are dropped,
//! boxes with winding number 1 are refined by damped Newton, and larger
//! counts are split until the zeros separate or the box is smaller than
//! `h_min`.

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::domain::DomainSpec;
use crate::expr::{EvalError, FunctionSpec};
use crate::potential::MeasureEstimate;
use crate::Complex;

/// Smallest admissible contour node count.
pub const MIN_CONTOUR_NODES: usize = 64;
const MAX_BISECTION_DEPTH: u32 = 40;
const MAX_JITTER_ATTEMPTS: usize = 5;
const NEWTON_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ZeroError {
    #[error("|f| <= tol on the contour near {at}")]
    ZeroOnContour { at: Complex },
    #[error("argument continuation did not converge near {at}")]
    NonConvergent { at: Complex },
    #[error("contour leaves the function's domain near {at}")]
    ContourOutsideDomain { at: Complex },
    #[error("contour needs at least 64 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("contour parameters are degenerate")]
    DegenerateContour,
    #[error("zero on a subdivision contour in box [{lower_left}, {upper_right}] after 5 jitters")]
    PersistentZeroOnContour { lower_left: Complex, upper_right: Complex },
    #[error("subdivision budget of {0} boxes exceeded")]
    BudgetExceeded(usize),
    #[error("invalid zero entry: {0}")]
    InvalidEntry(&'static str),
    #[error("evaluation failed: {0}")]
    Eval(EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape {
    Circle { center: Complex, radius: f64 },
    Rectangle { lower_left: Complex, upper_right: Complex },
    /// The boundary of a rectangle intersected with an open disk.
    ClippedRectangle { lower_left: Complex, upper_right: Complex, center: Complex, radius: f64 },
}

/// A closed, positively oriented contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub shape: ContourShape,
    pub node_count: usize,
    /// Interior point used for the radial parametrisation of clipped boxes.
    anchor: Complex,
}

impl Contour {
    pub fn circle(center: Complex, radius: f64, node_count: usize) -> Result<Contour, ZeroError> {
        check_nodes(node_count)?;
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(ZeroError::DegenerateContour);
        }
        Ok(Contour { shape: ContourShape::Circle { center, radius }, node_count, anchor: center })
    }

    pub fn rectangle(lower_left: Complex, upper_right: Complex, node_count: usize) -> Result<Contour, ZeroError> {
        check_nodes(node_count)?;
        if !valid_rect(lower_left, upper_right) {
            return Err(ZeroError::DegenerateContour);
        }
        Ok(Contour {
            shape: ContourShape::Rectangle { lower_left, upper_right },
            node_count,
            anchor: (lower_left + upper_right) * 0.5,
        })
    }

    /// Fails when the rectangle and the disk do not overlap.
    pub fn clipped_rectangle(
        lower_left: Complex,
        upper_right: Complex,
        center: Complex,
        radius: f64,
        node_count: usize,
    ) -> Result<Contour, ZeroError> {
        check_nodes(node_count)?;
        if !valid_rect(lower_left, upper_right) || !(radius > 0.0) {
            return Err(ZeroError::DegenerateContour);
        }
        let anchor = clipped_anchor(lower_left, upper_right, center, radius).ok_or(ZeroError::DegenerateContour)?;
        Ok(Contour {
            shape: ContourShape::ClippedRectangle { lower_left, upper_right, center, radius },
            node_count,
            anchor,
        })
    }

    /// The point at parameter `t ∈ [0, 1]`; `t = 0` and `t = 1` coincide.
    pub fn point(&self, t: f64) -> Complex {
        match self.shape {
            ContourShape::Circle { center, radius } => center + Complex::from_polar(radius, 2.0 * PI * t),
            ContourShape::Rectangle { lower_left, upper_right } => {
                let w = upper_right.re - lower_left.re;
                let h = upper_right.im - lower_left.im;
                let s = (t - t.floor()) * 2.0 * (w + h);
                if s < w {
                    lower_left + Complex::new(s, 0.0)
                } else if s < w + h {
                    Complex::new(upper_right.re, lower_left.im + (s - w))
                } else if s < 2.0 * w + h {
                    Complex::new(upper_right.re - (s - w - h), upper_right.im)
                } else {
                    Complex::new(lower_left.re, upper_right.im - (s - 2.0 * w - h))
                }
            }
            ContourShape::ClippedRectangle { lower_left, upper_right, center, radius } => {
                let u = Complex::from_polar(1.0, 2.0 * PI * t);
                let p = self.anchor;
                let rho = ray_exit_rect(p, u, lower_left, upper_right).min(ray_exit_disk(p, u, center, radius));
                p + u * rho
            }
        }
    }

    /// A point strictly inside the contour.
    pub fn interior_point(&self) -> Complex {
        self.anchor
    }

    pub fn encloses(&self, z: Complex) -> bool {
        match self.shape {
            ContourShape::Circle { center, radius } => (z - center).norm() < radius,
            ContourShape::Rectangle { lower_left, upper_right } => in_rect(z, lower_left, upper_right),
            ContourShape::ClippedRectangle { lower_left, upper_right, center, radius } => {
                in_rect(z, lower_left, upper_right) && (z - center).norm() < radius
            }
        }
    }
}

fn check_nodes(n: usize) -> Result<(), ZeroError> {
    if n < MIN_CONTOUR_NODES {
        Err(ZeroError::TooFewNodes(n))
    } else {
        Ok(())
    }
}

fn valid_rect(ll: Complex, ur: Complex) -> bool {
    ll.is_finite() && ur.is_finite() && ur.re > ll.re && ur.im > ll.im
}

fn in_rect(z: Complex, ll: Complex, ur: Complex) -> bool {
    z.re > ll.re && z.re < ur.re && z.im > ll.im && z.im < ur.im
}

fn ray_exit_rect(p: Complex, u: Complex, ll: Complex, ur: Complex) -> f64 {
    let mut t = f64::INFINITY;
    if u.re > 0.0 {
        t = t.min((ur.re - p.re) / u.re);
    } else if u.re < 0.0 {
        t = t.min((ll.re - p.re) / u.re);
    }
    if u.im > 0.0 {
        t = t.min((ur.im - p.im) / u.im);
    } else if u.im < 0.0 {
        t = t.min((ll.im - p.im) / u.im);
    }
    t
}

fn ray_exit_disk(p: Complex, u: Complex, c: Complex, r: f64) -> f64 {
    let d = p - c;
    let b = d.re * u.re + d.im * u.im;
    let q = d.norm_sqr() - r * r;
    -b + (b * b - q).max(0.0).sqrt()
}

/// A point strictly inside `rect ∩ disk`, if the intersection is non-empty.
fn clipped_anchor(ll: Complex, ur: Complex, c: Complex, r: f64) -> Option<Complex> {
    let mid = (ll + ur) * 0.5;
    if (mid - c).norm() < r {
        return Some(mid);
    }
    let q = Complex::new(c.re.clamp(ll.re, ur.re), c.im.clamp(ll.im, ur.im));
    if (q - c).norm() >= r {
        return None;
    }
    // walk from the box point nearest the disk centre toward the box centre
    let mut s = 0.5;
    for _ in 0..60 {
        let p = q + (mid - q) * s;
        if (p - c).norm() < r && in_rect(p, ll, ur) {
            return Some(p);
        }
        s *= 0.5;
    }
    None
}

fn eval_on_contour<F>(f: &F, z: Complex, tol: f64) -> Result<Complex, ZeroError>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let w = match f(z) {
        Ok(w) => w,
        Err(EvalError::OutsideDomain) => return Err(ZeroError::ContourOutsideDomain { at: z }),
        Err(EvalError::Pole | EvalError::Infinite) => return Err(ZeroError::NonConvergent { at: z }),
        Err(e) => return Err(ZeroError::Eval(e)),
    };
    if w.norm() <= tol {
        return Err(ZeroError::ZeroOnContour { at: z });
    }
    Ok(w)
}

/// Winding number of `f` along `contour`; see [`winding_number_with`].
pub fn winding_number(f: &FunctionSpec, contour: &Contour, tol: f64) -> Result<i64, ZeroError> {
    winding_number_with(&|z| f.value(z), contour, tol)
}

/// Counts zeros minus poles of `f` inside `contour`.
///
/// Every base segment is bisected until the argument increment across each
/// piece is below `π/2`.
pub fn winding_number_with<F>(f: &F, contour: &Contour, tol: f64) -> Result<i64, ZeroError>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let n = contour.node_count;
    let mut total = 0.0;
    let mut t0 = 0.0;
    let mut w0 = eval_on_contour(f, contour.point(0.0), tol)?;
    let first = w0;
    for k in 1..=n {
        let t1 = k as f64 / n as f64;
        let w1 = if k == n { first } else { eval_on_contour(f, contour.point(t1), tol)? };
        total += segment_increment(f, contour, tol, (t0, w0), (t1, w1), 0)?;
        t0 = t1;
        w0 = w1;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(ZeroError::NonConvergent { at: contour.point(0.0) });
    }
    Ok(rounded as i64)
}

fn segment_increment<F>(
    f: &F,
    contour: &Contour,
    tol: f64,
    (ta, wa): (f64, Complex),
    (tb, wb): (f64, Complex),
    depth: u32,
) -> Result<f64, ZeroError>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let delta = (wb / wa).arg();
    if delta.abs() < PI / 2.0 {
        return Ok(delta);
    }
    if depth >= MAX_BISECTION_DEPTH {
        return Err(ZeroError::NonConvergent { at: contour.point(ta) });
    }
    let tm = 0.5 * (ta + tb);
    let wm = eval_on_contour(f, contour.point(tm), tol)?;
    Ok(segment_increment(f, contour, tol, (ta, wa), (tm, wm), depth + 1)?
        + segment_increment(f, contour, tol, (tm, wm), (tb, wb), depth + 1)?)
}

/// Where to look for zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchRegion {
    Rect { lower_left: Complex, upper_right: Complex },
    Disk { center: Complex, radius: f64 },
}

impl SearchRegion {
    pub fn contains(&self, z: Complex) -> bool {
        match *self {
            SearchRegion::Rect { lower_left, upper_right } => in_rect(z, lower_left, upper_right),
            SearchRegion::Disk { center, radius } => (z - center).norm() < radius,
        }
    }

    fn bounds(&self) -> (Complex, Complex, Option<(Complex, f64)>) {
        match *self {
            SearchRegion::Rect { lower_left, upper_right } => (lower_left, upper_right, None),
            SearchRegion::Disk { center, radius } => (
                center - Complex::new(radius, radius),
                center + Complex::new(radius, radius),
                Some((center, radius)),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    /// Boxes holding several zeros are not split below this side length.
    pub h_min: f64,
    pub refine_tol: f64,
    /// `|f| ≤ contour_tol` on a contour counts as a zero on the contour.
    pub contour_tol: f64,
    pub max_boxes: usize,
    pub contour_nodes: usize,
}

impl Default for LocateOptions {
    fn default() -> LocateOptions {
        LocateOptions {
            h_min: 1e-5,
            refine_tol: 1e-10,
            contour_tol: 1e-12,
            max_boxes: 200_000,
            contour_nodes: MIN_CONTOUR_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEntry {
    pub location: Complex,
    pub multiplicity: u32,
    pub refinement_error: f64,
}

/// Located zeros in canonical order: decreasing distance to `∂region`,
/// ties broken by real then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSequence {
    pub entries: Vec<ZeroEntry>,
    pub region: DomainSpec,
}

impl ZeroSequence {
    /// Validates and sorts externally supplied zeros.
    pub fn new(mut entries: Vec<ZeroEntry>, region: DomainSpec) -> Result<ZeroSequence, ZeroError> {
        for e in &entries {
            if !e.location.is_finite() {
                return Err(ZeroError::InvalidEntry("location must be finite"));
            }
            if !region.contains(e.location) {
                return Err(ZeroError::InvalidEntry("location outside the region"));
            }
            if e.multiplicity == 0 {
                return Err(ZeroError::InvalidEntry("multiplicity must be positive"));
            }
            if !(e.refinement_error >= 0.0 && e.refinement_error.is_finite()) {
                return Err(ZeroError::InvalidEntry("refinement error must be finite and non-negative"));
            }
        }
        sort_canonical(&mut entries, &region);
        Ok(ZeroSequence { entries, region })
    }

    pub fn empty(region: DomainSpec) -> ZeroSequence {
        ZeroSequence { entries: Vec::new(), region }
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity sum of entries enclosed by `contour`.
    pub fn count_inside(&self, contour: &Contour) -> u64 {
        self.entries
            .iter()
            .filter(|e| contour.encloses(e.location))
            .map(|e| e.multiplicity as u64)
            .sum()
    }
}

fn sort_canonical(entries: &mut [ZeroEntry], region: &DomainSpec) {
    entries.sort_by(|a, b| {
        let da = region.dist_to_boundary(a.location);
        let db = region.dist_to_boundary(b.location);
        db.total_cmp(&da)
            .then(a.location.re.total_cmp(&b.location.re))
            .then(a.location.im.total_cmp(&b.location.im))
    });
}

/// The zero-counting measure: an atom of mass `m` at each zero.
pub fn zero_counting_measure(z: &ZeroSequence) -> MeasureEstimate {
    MeasureEstimate::from_atoms(z.entries.iter().map(|e| (e.location, e.multiplicity as f64)).collect())
}

/// Locates the zeros of `f` in `region`.
pub fn locate_zeros(f: &FunctionSpec, region: SearchRegion, opts: &LocateOptions) -> Result<ZeroSequence, ZeroError> {
    let domain = match region {
        SearchRegion::Disk { center, radius } => {
            DomainSpec::disk(center, radius).map_err(|_| ZeroError::DegenerateContour)?
        }
        SearchRegion::Rect { .. } => f.domain.without_inner(),
    };
    locate_zeros_with(&|z| f.value(z), region, domain, opts)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    ll: Complex,
    ur: Complex,
}

impl Cell {
    fn side(&self) -> f64 {
        (self.ur.re - self.ll.re).max(self.ur.im - self.ll.im)
    }

    fn diagonal(&self) -> f64 {
        (self.ur - self.ll).norm()
    }

    fn contour(&self, clip: Option<(Complex, f64)>, nodes: usize) -> Result<Option<Contour>, ZeroError> {
        match clip {
            None => Contour::rectangle(self.ll, self.ur, nodes).map(Some),
            Some((c, r)) => {
                let corners = [self.ll, self.ur, Complex::new(self.ll.re, self.ur.im), Complex::new(self.ur.re, self.ll.im)];
                if corners.iter().all(|z| (z - c).norm() < r) {
                    return Contour::rectangle(self.ll, self.ur, nodes).map(Some);
                }
                match Contour::clipped_rectangle(self.ll, self.ur, c, r, nodes) {
                    Ok(k) => Ok(Some(k)),
                    Err(ZeroError::DegenerateContour) => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

/// [`locate_zeros`] for an arbitrary evaluator; `domain` orders the output.
pub fn locate_zeros_with<F>(
    f: &F,
    region: SearchRegion,
    domain: DomainSpec,
    opts: &LocateOptions,
) -> Result<ZeroSequence, ZeroError>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    if !(opts.h_min > 0.0) {
        return Err(ZeroError::DegenerateContour);
    }
    let (ll, ur, clip) = region.bounds();
    let root = Cell { ll, ur };
    let root_contour = root.contour(clip, opts.contour_nodes)?.ok_or(ZeroError::DegenerateContour)?;
    let n_root = winding_number_with(f, &root_contour, opts.contour_tol)?;
    let mut stack = alloc::vec![(root, root_contour, n_root)];
    let mut out = Vec::new();
    let mut boxes = 0usize;
    while let Some((cell, contour, n)) = stack.pop() {
        boxes += 1;
        if boxes > opts.max_boxes {
            return Err(ZeroError::BudgetExceeded(opts.max_boxes));
        }
        if n <= 0 {
            continue;
        }
        if n == 1 {
            if let Some((z, err)) = newton(f, &contour, opts.refine_tol) {
                out.push(ZeroEntry { location: z, multiplicity: 1, refinement_error: err });
                continue;
            }
            if cell.diagonal() <= opts.refine_tol {
                out.push(ZeroEntry { location: centre(&cell, &contour), multiplicity: 1, refinement_error: cell.diagonal() });
                continue;
            }
        } else if cell.side() < opts.h_min {
            out.push(ZeroEntry {
                location: centre(&cell, &contour),
                multiplicity: n as u32,
                refinement_error: cell.diagonal(),
            });
            continue;
        }
        let children = split(f, &cell, n, clip, opts)?;
        // reverse so that the lower-left child is processed first
        stack.extend(children.into_iter().rev());
    }
    let out = merge_clusters(out, opts.h_min);
    ZeroSequence::new(out, domain).map_err(|_| ZeroError::NonConvergent { at: (ll + ur) * 0.5 })
}

/// Collapses entries closer than `h_min` (single linkage) into one entry at
/// the multiplicity-weighted centre; rounding splits multiple zeros this way.
fn merge_clusters(entries: Vec<ZeroEntry>, h_min: f64) -> Vec<ZeroEntry> {
    let n = entries.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn root(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            if (entries[a].location - entries[b].location).norm() < h_min {
                let (ra, rb) = (root(&mut group, a), root(&mut group, b));
                group[rb] = ra;
            }
        }
    }
    let mut out = Vec::new();
    for r in 0..n {
        if root(&mut group, r) != r {
            continue;
        }
        let members: Vec<&ZeroEntry> = (0..n).filter(|&i| root(&mut group, i) == r).map(|i| &entries[i]).collect();
        if members.len() == 1 {
            out.push(*members[0]);
            continue;
        }
        let mult: u32 = members.iter().map(|e| e.multiplicity).sum();
        let at = members.iter().map(|e| e.location * e.multiplicity as f64).sum::<Complex>() / mult as f64;
        let err = members.iter().map(|e| (e.location - at).norm() + e.refinement_error).fold(0.0, f64::max);
        out.push(ZeroEntry { location: at, multiplicity: mult, refinement_error: err });
    }
    out
}

fn centre(cell: &Cell, contour: &Contour) -> Complex {
    let mid = (cell.ll + cell.ur) * 0.5;
    if contour.encloses(mid) {
        mid
    } else {
        contour.interior_point()
    }
}

type Child = (Cell, Contour, i64);

fn split<F>(f: &F, cell: &Cell, n: i64, clip: Option<(Complex, f64)>, opts: &LocateOptions) -> Result<Vec<Child>, ZeroError>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let mid = (cell.ll + cell.ur) * 0.5;
    let s = cell.side();
    for attempt in 0..=MAX_JITTER_ATTEMPTS {
        let offset = if attempt == 0 {
            Complex::new(0.0, 0.0)
        } else {
            // deterministic jitter of size s/7 on a golden-angle spiral
            Complex::from_polar(s / 7.0, 2.399_963_229_728_653 * attempt as f64)
        };
        let m = mid + offset;
        let quads = [
            Cell { ll: cell.ll, ur: m },
            Cell { ll: Complex::new(m.re, cell.ll.im), ur: Complex::new(cell.ur.re, m.im) },
            Cell { ll: Complex::new(cell.ll.re, m.im), ur: Complex::new(m.re, cell.ur.im) },
            Cell { ll: m, ur: cell.ur },
        ];
        let mut children = Vec::with_capacity(4);
        let mut ok = true;
        for q in quads {
            let contour = match q.contour(clip, opts.contour_nodes)? {
                Some(c) => c,
                None => continue,
            };
            match winding_number_with(f, &contour, opts.contour_tol) {
                Ok(k) => children.push((q, contour, k)),
                Err(ZeroError::ZeroOnContour { .. } | ZeroError::NonConvergent { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok && children.iter().map(|c| c.2).sum::<i64>() == n {
            return Ok(children);
        }
    }
    Err(ZeroError::PersistentZeroOnContour { lower_left: cell.ll, upper_right: cell.ur })
}

fn fd_derivative<F>(f: &F, z: Complex) -> Option<Complex>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let eta = 1e-7 * (1.0 + z.norm());
    let fp = f(z + eta).ok()?;
    let fm = f(z - eta).ok()?;
    let d = (fp - fm) / (2.0 * eta);
    (d.norm() > 0.0 && d.is_finite()).then_some(d)
}

/// Damped Newton from the contour's interior point; `None` if it leaves the
/// contour or stalls above `tol`.
fn newton<F>(f: &F, contour: &Contour, tol: f64) -> Option<(Complex, f64)>
where
    F: Fn(Complex) -> Result<Complex, EvalError>,
{
    let mut z = contour.interior_point();
    let mut fz = f(z).ok()?;
    for _ in 0..NEWTON_ITERATIONS {
        if fz.norm() == 0.0 {
            return Some((z, 0.0));
        }
        let step = fz / fd_derivative(f, z)?;
        if step.norm() <= tol {
            let z_new = z - step;
            if contour.encloses(z_new) {
                return Some((z_new, step.norm()));
            }
            return contour.encloses(z).then_some((z, step.norm()));
        }
        let mut lambda = 1.0;
        loop {
            let cand = z - step * lambda;
            if contour.encloses(cand) {
                if let Ok(fc) = f(cand) {
                    if fc.norm() < fz.norm() {
                        z = cand;
                        fz = fc;
                        break;
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return None;
            }
        }
    }
    None
}
