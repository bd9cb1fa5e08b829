#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;


use super::PotentialError;
use crate::expr::ScalarField;
use crate::ext::ExtReal;
use crate::quad::pairwise_sum;
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub at: Complex,
    pub mass: f64,
}

/// Per-cell masses on a uniform grid of square cells of side `h`; cell
/// `(i, j)` is centred at `origin + h·(i, j)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    pub origin: Complex,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub mass: Vec<f64>,
}

impl CellGrid {
    pub fn zeros(origin: Complex, h: f64, nx: usize, ny: usize) -> CellGrid {
        CellGrid { origin, h, nx, ny, mass: alloc::vec![0.0; nx * ny] }
    }

    pub fn center(&self, i: usize, j: usize) -> Complex {
        self.origin + Complex::new(i as f64 * self.h, j as f64 * self.h)
    }

    /// `(lower_left, upper_right)` of cell `(i, j)`.
    pub fn rect(&self, i: usize, j: usize) -> (Complex, Complex) {
        let c = self.center(i, j);
        let d = Complex::new(0.5 * self.h, 0.5 * self.h);
        (c - d, c + d)
    }

    /// `(center, mass)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Complex, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.center(i, j), self.mass[j * self.nx + i])))
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> CellGrid {
        CellGrid { mass: self.mass.iter().map(|m| f(*m)).collect(), ..self.clone() }
    }
}

/// A measure made of point masses and/or grid cells with constant density.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    pub atoms: Vec<Atom>,
    pub cells: Option<CellGrid>,
    pub signed: bool,
}

impl MeasureEstimate {
    pub fn zero() -> MeasureEstimate {
        MeasureEstimate { atoms: Vec::new(), cells: None, signed: false }
    }

    /// Atoms at coincident points are merged, in order of first appearance.
    pub fn from_atoms(atoms: Vec<(Complex, f64)>) -> MeasureEstimate {
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (at, mass) in atoms {
            match merged.iter_mut().find(|a| a.at == at) {
                Some(a) => a.mass += mass,
                None => merged.push(Atom { at, mass }),
            }
        }
        let signed = merged.iter().any(|a| a.mass < 0.0);
        MeasureEstimate { atoms: merged, cells: None, signed }
    }

    pub fn from_cells(cells: CellGrid) -> MeasureEstimate {
        let signed = cells.mass.iter().any(|m| *m < 0.0);
        MeasureEstimate { atoms: Vec::new(), cells: Some(cells), signed }
    }

    /// Every carrier as `(point, mass)`: atoms first, then cells row-major.
    pub fn carriers(&self) -> impl Iterator<Item = (Complex, f64)> + '_ {
        self.atoms
            .iter()
            .map(|a| (a.at, a.mass))
            .chain(self.cells.iter().flat_map(|c| c.iter()))
    }

    pub fn total_mass(&self) -> f64 {
        let m: Vec<f64> = self.carriers().map(|(_, m)| m).collect();
        pairwise_sum(&m)
    }

    pub fn total_variation(&self) -> f64 {
        let m: Vec<f64> = self.carriers().map(|(_, m)| m.abs()).collect();
        pairwise_sum(&m)
    }

    /// Mass of carriers accepted by `filter`.
    pub fn mass_where(&self, filter: impl Fn(Complex) -> bool) -> f64 {
        let m: Vec<f64> = self.carriers().filter(|(z, _)| filter(*z)).map(|(_, m)| m).collect();
        pairwise_sum(&m)
    }

    pub fn scaled(&self, a: f64) -> MeasureEstimate {
        MeasureEstimate {
            atoms: self.atoms.iter().map(|x| Atom { at: x.at, mass: a * x.mass }).collect(),
            cells: self.cells.as_ref().map(|c| c.map(|m| a * m)),
            signed: self.signed || a < 0.0,
        }
    }

    /// The absolute variation `|ν|`.
    pub fn abs(&self) -> MeasureEstimate {
        MeasureEstimate {
            atoms: self.atoms.iter().map(|x| Atom { at: x.at, mass: x.mass.abs() }).collect(),
            cells: self.cells.as_ref().map(|c| c.map(f64::abs)),
            signed: false,
        }
    }

    /// `self + other`; cell grids must share their geometry.
    pub fn add(&self, other: &MeasureEstimate) -> Result<MeasureEstimate, PotentialError> {
        let mut atoms: Vec<(Complex, f64)> = self.atoms.iter().map(|a| (a.at, a.mass)).collect();
        atoms.extend(other.atoms.iter().map(|a| (a.at, a.mass)));
        let mut out = MeasureEstimate::from_atoms(atoms);
        out.cells = match (&self.cells, &other.cells) {
            (None, None) => None,
            (Some(c), None) | (None, Some(c)) => Some(c.clone()),
            (Some(a), Some(b)) => {
                if a.origin != b.origin || a.h != b.h || a.nx != b.nx || a.ny != b.ny {
                    return Err(PotentialError::GridMismatch);
                }
                Some(CellGrid { mass: a.mass.iter().zip(&b.mass).map(|(x, y)| x + y).collect(), ..a.clone() })
            }
        };
        let signed = out.carriers().any(|(_, m)| m < 0.0);
        out.signed = signed;
        Ok(out)
    }
}

/// `ν = ν⁺ − ν⁻` with both parts carried on the same atoms and cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSplit {
    pub positive: MeasureEstimate,
    pub negative: MeasureEstimate,
}

impl ChargeSplit {
    /// `ν⁺ − ν⁻`, reproducing the split measure exactly.
    pub fn recombine(&self) -> MeasureEstimate {
        let atoms = self
            .positive
            .atoms
            .iter()
            .zip(&self.negative.atoms)
            .map(|(p, n)| Atom { at: p.at, mass: p.mass - n.mass })
            .collect::<Vec<_>>();
        let cells = match (&self.positive.cells, &self.negative.cells) {
            (Some(p), Some(n)) => Some(CellGrid {
                mass: p.mass.iter().zip(&n.mass).map(|(a, b)| a - b).collect(),
                ..p.clone()
            }),
            _ => None,
        };
        let signed = atoms.iter().any(|a| a.mass < 0.0) || cells.as_ref().is_some_and(|c| c.mass.iter().any(|m| *m < 0.0));
        MeasureEstimate { atoms, cells, signed }
    }
}

/// Per-carrier Hahn–Jordan split.
pub fn hahn_jordan_split(nu: &MeasureEstimate) -> ChargeSplit {
    let part = |sign: f64| MeasureEstimate {
        atoms: nu.atoms.iter().map(|a| Atom { at: a.at, mass: (sign * a.mass).max(0.0) }).collect(),
        cells: nu.cells.as_ref().map(|c| c.map(|m| (sign * m).max(0.0))),
        signed: false,
    };
    ChargeSplit { positive: part(1.0), negative: part(-1.0) }
}

/// `∫ v dν` over carriers accepted by `filter`: exact on atoms, midpoint rule
/// on cells.
pub fn integrate_measure<F: ScalarField + ?Sized>(
    v: &F,
    nu: &MeasureEstimate,
    filter: impl Fn(Complex) -> bool,
) -> Result<f64, PotentialError> {
    let mut terms = Vec::new();
    for (z, m) in nu.carriers() {
        if m == 0.0 || !filter(z) {
            continue;
        }
        match v.value(z).map_err(PotentialError::Eval)? {
            ExtReal::Finite(x) => terms.push(x * m),
            _ => return Err(PotentialError::InfiniteAtCarrier { at: z }),
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `∫_{D(z,r)} log|ζ − z| d|ν|(ζ)`; `-∞` when an atom of `|ν|` sits at `z`.
///
/// Cells near `z` use the exact integral of the log kernel over the cell.
pub fn log_potential_at(nu: &MeasureEstimate, z: Complex, r: f64) -> ExtReal {
    let mut terms = Vec::new();
    for a in &nu.atoms {
        let d = (a.at - z).norm();
        if a.mass == 0.0 || d >= r {
            continue;
        }
        if d == 0.0 {
            return ExtReal::NegInf;
        }
        terms.push(a.mass.abs() * d.ln());
    }
    if let Some(cells) = &nu.cells {
        let h = cells.h;
        for j in 0..cells.ny {
            for i in 0..cells.nx {
                let m = cells.mass[j * cells.nx + i].abs();
                let c = cells.center(i, j);
                let d = (c - z).norm();
                if m == 0.0 || d >= r {
                    continue;
                }
                if d <= 2.0 * h {
                    let (ll, ur) = cells.rect(i, j);
                    terms.push(m / (h * h) * log_kernel_rect(ll - z, ur - z));
                } else {
                    terms.push(m * d.ln());
                }
            }
        }
    }
    ExtReal::Finite(pairwise_sum(&terms))
}

/// `∫∫_{[x1,x2]×[y1,y2]} log|ζ| dλ(ζ)` in closed form.
pub fn log_kernel_rect(ll: Complex, ur: Complex) -> f64 {
    let f = |x: f64, y: f64| {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return 0.0;
        }
        let mut v = x * y * r2.ln() - 3.0 * x * y;
        if x != 0.0 {
            v += x * x * (y / x).atan();
        }
        if y != 0.0 {
            v += y * y * (x / y).atan();
        }
        v
    };
    0.5 * (f(ur.re, ur.im) - f(ll.re, ur.im) - f(ur.re, ll.im) + f(ll.re, ll.im))
}
