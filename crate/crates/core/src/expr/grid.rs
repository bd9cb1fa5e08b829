#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;


use super::field::{LogModulus, RealField, ScalarField};
use super::{EvalError, FunctionSpec};
use crate::ext::ExtReal;
use crate::Complex;

/// A sampling rectangle with uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRect {
    pub lower_left: Complex,
    pub upper_right: Complex,
    pub h: f64,
}

impl GridRect {
    pub fn new(lower_left: Complex, upper_right: Complex, h: f64) -> Result<GridRect, EvalError> {
        let ok = lower_left.is_finite()
            && upper_right.is_finite()
            && upper_right.re > lower_left.re
            && upper_right.im > lower_left.im
            && h.is_finite()
            && h > 0.0;
        if !ok {
            return Err(EvalError::InvalidConstructor("grid needs h > 0 and a non-degenerate rectangle"));
        }
        Ok(GridRect { lower_left, upper_right, h })
    }

    /// The square `[-a, a]²` around `center`.
    pub fn square(center: Complex, a: f64, h: f64) -> Result<GridRect, EvalError> {
        GridRect::new(center - Complex::new(a, a), center + Complex::new(a, a), h)
    }

    /// Node counts `(nx, ny)`; the last node may fall short of the upper edge.
    pub fn dims(&self) -> (usize, usize) {
        let n = |w: f64| (w / self.h + 1e-9).floor() as usize + 1;
        (n(self.upper_right.re - self.lower_left.re), n(self.upper_right.im - self.lower_left.im))
    }

    pub fn node(&self, i: usize, j: usize) -> Complex {
        self.lower_left + Complex::new(i as f64 * self.h, j as f64 * self.h)
    }
}

/// Samples on a uniform grid, row-major with rows ordered by increasing `im`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub rect: GridRect,
    pub nx: usize,
    pub ny: usize,
    pub samples: Vec<ExtReal>,
    /// `true` for nodes inside the region of interest.
    pub mask: Vec<bool>,
}

impl GridField {
    /// Assembles a field from per-row samples, e.g. computed in parallel.
    pub fn from_rows(rect: GridRect, rows: Vec<Vec<Option<ExtReal>>>) -> GridField {
        let (nx, ny) = rect.dims();
        assert_eq!(rows.len(), ny, "row count does not match the rectangle");
        let mut samples = Vec::with_capacity(nx * ny);
        let mut mask = Vec::with_capacity(nx * ny);
        for row in rows {
            assert_eq!(row.len(), nx, "row length does not match the rectangle");
            for v in row {
                mask.push(v.is_some());
                samples.push(v.unwrap_or(ExtReal::ZERO));
            }
        }
        GridField { rect, nx, ny, samples, mask }
    }

    pub fn h(&self) -> f64 {
        self.rect.h
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn node(&self, i: usize, j: usize) -> Complex {
        self.rect.node(i, j)
    }

    /// The sample at `(i, j)` when the node is unmasked.
    pub fn get(&self, i: usize, j: usize) -> Option<ExtReal> {
        let k = self.index(i, j);
        self.mask[k].then_some(self.samples[k])
    }

    pub fn mask_count(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }

    /// Masks out nodes for which `keep` is false.
    pub fn restrict(mut self, keep: impl Fn(Complex) -> bool) -> GridField {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.index(i, j);
                if !keep(self.rect.node(i, j)) {
                    self.mask[k] = false;
                }
            }
        }
        self
    }
}

/// Bilinear interpolation; `-∞` if a contributing corner is `-∞`.
impl ScalarField for GridField {
    fn value(&self, z: Complex) -> Result<ExtReal, EvalError> {
        let h = self.rect.h;
        let x = (z.re - self.rect.lower_left.re) / h;
        let y = (z.im - self.rect.lower_left.im) / h;
        if !(x >= 0.0 && y >= 0.0 && x <= (self.nx - 1) as f64 && y <= (self.ny - 1) as f64) {
            return Err(EvalError::OutsideDomain);
        }
        let i = (x.floor() as usize).min(self.nx.saturating_sub(2));
        let j = (y.floor() as usize).min(self.ny.saturating_sub(2));
        let (tx, ty) = (x - i as f64, y - j as f64);
        let mut acc = 0.0;
        for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
            for (dj, wy) in [(0, 1.0 - ty), (1, ty)] {
                let w = wx * wy;
                if w == 0.0 {
                    continue;
                }
                match self.get((i + di).min(self.nx - 1), (j + dj).min(self.ny - 1)) {
                    None => return Err(EvalError::OutsideDomain),
                    Some(ExtReal::Finite(v)) => acc += w * v,
                    Some(other) => return Ok(other),
                }
            }
        }
        Ok(ExtReal::Finite(acc))
    }
}

/// Samples one row of a field; evaluation errors become masked nodes.
pub fn sample_row<F: ScalarField + ?Sized>(field: &F, rect: &GridRect, j: usize) -> Vec<Option<ExtReal>> {
    let (nx, _) = rect.dims();
    (0..nx).map(|i| field.value(rect.node(i, j)).ok()).collect()
}

/// Samples any field on `rect`.
pub fn sample_field<F: ScalarField + ?Sized>(field: &F, rect: GridRect) -> GridField {
    let (_, ny) = rect.dims();
    let rows = (0..ny).map(|j| sample_row(field, &rect, j)).collect();
    GridField::from_rows(rect, rows)
}

/// Samples `log|f|`.
pub fn sample_grid(spec: &FunctionSpec, rect: GridRect) -> GridField {
    sample_field(&LogModulus(spec), rect)
}

/// Samples a real-valued expression.
pub fn sample_real_grid(spec: &FunctionSpec, rect: GridRect) -> GridField {
    sample_field(&RealField(spec), rect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_function;

    #[test]
    fn identity_on_three_by_three() {
        let f = parse_function("z").unwrap();
        let rect = GridRect::square(Complex::new(0.0, 0.0), 1.0, 1.0).unwrap();
        let g = sample_grid(&f, rect);
        assert_eq!((g.nx, g.ny), (3, 3));
        assert_eq!(g.get(1, 1), Some(ExtReal::NegInf));
        assert_eq!(g.get(0, 0), Some(ExtReal::Finite(2f64.sqrt().ln())));
        assert_eq!(g.mask_count(), 0);
    }

    #[test]
    fn constant_one_is_zero_field() {
        let f = parse_function("1").unwrap();
        let rect = GridRect::new(Complex::new(-0.3, 0.1), Complex::new(0.7, 0.4), 0.05).unwrap();
        let g = sample_grid(&f, rect);
        assert_eq!(g.samples.len(), g.nx * g.ny);
        assert!(g.samples.iter().all(|v| *v == ExtReal::ZERO));
    }

    #[test]
    fn errors_become_masked_nodes() {
        let f = parse_function("blaschke(0.5)").unwrap();
        let rect = GridRect::square(Complex::new(0.0, 0.0), 1.0, 0.5).unwrap();
        let g = sample_grid(&f, rect);
        // corners lie outside the closed unit disk
        assert_eq!(g.get(0, 0), None);
        assert_eq!(g.get(4, 2), Some(ExtReal::Finite(0.0)));
    }

    #[test]
    fn bilinear_reproduces_linear_fields() {
        let f = parse_function("re(z) + 2*im(z)").unwrap();
        let rect = GridRect::square(Complex::new(0.0, 0.0), 1.0, 0.25).unwrap();
        let g = sample_real_grid(&f, rect);
        let v = g.value(Complex::new(0.13, -0.41)).unwrap().to_f64();
        assert!((v - (0.13 - 0.82)).abs() < 1e-14);
    }
}
