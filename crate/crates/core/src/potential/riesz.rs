use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;


use super::measure::{CellGrid, MeasureEstimate};
use super::PotentialError;
use crate::expr::{FunctionSpec, GridField};
use crate::ext::ExtReal;
use crate::zeros::{winding_number, Contour, MIN_CONTOUR_NODES};
use crate::Complex;

/// Discrete Riesz charge of a sampled field.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszGrid {
    /// One cell per node, centred on it; signed.
    pub measure: MeasureEstimate,
    /// Interior nodes whose stencil touches a non-finite sample; their mass
    /// is zero until patched.
    pub flagged: Vec<(usize, usize)>,
}

/// `(1/2π)` times the undivided five-point Laplacian at every interior node
/// whose stencil is unmasked and finite. Boundary nodes carry no mass.
pub fn riesz_measure_grid(m: &GridField) -> Result<RieszGrid, PotentialError> {
    if m.nx < 5 || m.ny < 5 {
        return Err(PotentialError::GridTooSmall);
    }
    let mut cells = CellGrid::zeros(m.rect.lower_left, m.h(), m.nx, m.ny);
    let mut flagged = Vec::new();
    for j in 1..m.ny - 1 {
        for i in 1..m.nx - 1 {
            let stencil = [m.get(i, j), m.get(i - 1, j), m.get(i + 1, j), m.get(i, j - 1), m.get(i, j + 1)];
            if stencil.iter().any(Option::is_none) {
                continue;
            }
            let vals: Vec<ExtReal> = stencil.iter().flatten().copied().collect();
            if vals.iter().any(|v| !v.is_finite()) {
                flagged.push((i, j));
                continue;
            }
            let v: Vec<f64> = vals.iter().map(|x| x.to_f64()).collect();
            let lap = (v[1] + v[2]) + (v[3] + v[4]) - 4.0 * v[0];
            cells.mass[j * m.nx + i] = lap / (2.0 * PI);
        }
    }
    Ok(RieszGrid { measure: MeasureEstimate::from_cells(cells), flagged })
}

impl RieszGrid {
    /// Groups flagged nodes into 4-connected components, in scan order.
    pub fn flagged_components(&self) -> Vec<Vec<(usize, usize)>> {
        let set: alloc::collections::BTreeSet<(usize, usize)> = self.flagged.iter().map(|&(i, j)| (j, i)).collect();
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &(j, i) in &set {
            if !seen.insert((j, i)) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([(j, i)]);
            while let Some((j, i)) = queue.pop_front() {
                comp.push((i, j));
                let nbrs = [(j, i.wrapping_sub(1)), (j, i + 1), (j.wrapping_sub(1), i), (j + 1, i)];
                for n in nbrs {
                    if set.contains(&n) && seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
            comp.sort_by_key(|&(i, j)| (j, i));
            out.push(comp);
        }
        out
    }

    fn assign(&mut self, comp: &[(usize, usize)], m: &GridField, mass: f64) {
        let cells = self.measure.cells.as_mut().expect("riesz grids carry cells");
        let singular: Vec<(usize, usize)> =
            comp.iter().copied().filter(|&(i, j)| m.get(i, j).is_some_and(|v| !v.is_finite())).collect();
        let targets = if singular.is_empty() { &comp[..1] } else { &singular[..] };
        for &(i, j) in targets {
            cells.mass[j * cells.nx + i] = mass / targets.len() as f64;
        }
    }

    /// Recovers the mass of each flagged component from the discrete flux
    /// across its boundary, which keeps the telescoping identity
    /// `Σ cells = boundary flux` exact. Components whose boundary touches a
    /// non-finite or masked node are left unpatched and returned.
    pub fn patch_by_flux(&mut self, m: &GridField) -> Vec<Vec<(usize, usize)>> {
        let mut unpatched = Vec::new();
        for comp in self.flagged_components() {
            match component_flux(&comp, m) {
                Some(mass) => self.assign(&comp, m, mass),
                None => unpatched.push(comp),
            }
        }
        let signed = self.measure.carriers().any(|(_, x)| x < 0.0);
        self.measure.signed = signed;
        unpatched
    }

    /// Sets the mass of each flagged component to the zero count of `f` inside
    /// the component's cells, by the argument principle. `m` must be the
    /// sampled `log|f|`.
    pub fn patch_by_winding(&mut self, m: &GridField, f: &FunctionSpec) -> Result<(), PotentialError> {
        let h = m.h();
        for comp in self.flagged_components() {
            let (mut i0, mut j0, mut i1, mut j1) = (usize::MAX, usize::MAX, 0, 0);
            for &(i, j) in &comp {
                i0 = i0.min(i);
                j0 = j0.min(j);
                i1 = i1.max(i);
                j1 = j1.max(j);
            }
            let half = Complex::new(0.5 * h, 0.5 * h);
            let contour = Contour::rectangle(m.node(i0, j0) - half, m.node(i1, j1) + half, MIN_CONTOUR_NODES)
                .map_err(PotentialError::Zero)?;
            let n = winding_number(f, &contour, 1e-14).map_err(PotentialError::Zero)?;
            // the unflagged cells inside the box already carry part of the charge
            let cells = self.measure.cells.as_ref().expect("riesz grids carry cells");
            let mut rest = 0.0;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if !comp.contains(&(i, j)) {
                        rest += cells.mass[j * cells.nx + i];
                    }
                }
            }
            self.assign(&comp, m, n as f64 - rest);
        }
        let signed = self.measure.carriers().any(|(_, x)| x < 0.0);
        self.measure.signed = signed;
        Ok(())
    }
}

fn component_flux(comp: &[(usize, usize)], m: &GridField) -> Option<f64> {
    let set: alloc::collections::BTreeSet<(usize, usize)> = comp.iter().copied().collect();
    let mut terms = Vec::new();
    for &(i, j) in comp {
        let nbrs = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)];
        for n in nbrs {
            if set.contains(&n) {
                continue;
            }
            let a = m.get(n.0, n.1)?.finite()?;
            let b = m.get(i, j)?.finite()?;
            terms.push(a - b);
        }
    }
    Some(crate::quad::pairwise_sum(&terms) / (2.0 * PI))
}
