#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::{ConditionError, TestFunction};
use crate::ext::ExtReal;
use crate::quad::CompensatedSum;
use crate::zeros::ZeroSequence;

/// Terms needed before a tail model is fitted.
pub const MIN_TAIL_TERMS: usize = 16;
/// Fitted log-log slopes at or above this classify the series as divergent.
const DIVERGENT_SLOPE: f64 = -1.02;
/// Fitted log-log slopes at or below this classify it as convergent.
const CONVERGENT_SLOPE: f64 = -1.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    /// 1-based position among the summed zeros.
    pub k: usize,
    pub abs_z: f64,
    /// `multiplicity · v(z_k)`.
    pub term: f64,
    pub partial_sum: f64,
}

/// Least-squares slope of `log term` against `log k` over the last half of
/// the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub slope: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumTrace {
    pub entries: Vec<TraceEntry>,
    /// Zeros in `D₀` (or outside `D`) left out of the sum.
    pub skipped: usize,
    pub tail: Option<TailFit>,
    /// From the tail model; a trace shorter than [`MIN_TAIL_TERMS`] is a
    /// complete finite sum and counts as convergent.
    pub verdict: SeriesVerdict,
}

impl SumTrace {
    pub fn total(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.partial_sum)
    }

    /// The first `k` whose partial sum exceeds `bound`.
    pub fn exceeds(&self, bound: f64) -> Option<usize> {
        self.entries.iter().find(|e| e.partial_sum > bound).map(|e| e.k)
    }
}

/// Partial sums of `v(z_k)` over the zeros in `D ∖ D₀`, in canonical order.
pub fn blaschke_functional(v: &TestFunction, zeros: &ZeroSequence) -> Result<SumTrace, ConditionError> {
    let mut sum = CompensatedSum::default();
    let mut entries = Vec::new();
    let mut skipped = 0;
    for e in &zeros.entries {
        if !v.domain.in_shell(e.location) {
            skipped += 1;
            continue;
        }
        let x = match v.value(e.location)? {
            ExtReal::Finite(x) => x,
            _ => return Err(ConditionError::InfiniteAtZero { at: e.location }),
        };
        let term = e.multiplicity as f64 * x;
        sum.add(term);
        entries.push(TraceEntry { k: entries.len() + 1, abs_z: e.location.norm(), term, partial_sum: sum.value() });
    }
    let tail = fit_tail(&entries);
    let verdict = match tail {
        None if entries.len() < MIN_TAIL_TERMS => SeriesVerdict::Convergent,
        None => SeriesVerdict::Inconclusive,
        Some(t) if t.slope >= DIVERGENT_SLOPE => SeriesVerdict::Divergent,
        Some(t) if t.slope <= CONVERGENT_SLOPE => SeriesVerdict::Convergent,
        Some(_) => SeriesVerdict::Inconclusive,
    };
    Ok(SumTrace { entries, skipped, tail, verdict })
}

fn fit_tail(entries: &[TraceEntry]) -> Option<TailFit> {
    if entries.len() < MIN_TAIL_TERMS {
        return None;
    }
    let pts: Vec<(f64, f64)> = entries[entries.len() / 2..]
        .iter()
        .filter(|e| e.term > 0.0)
        .map(|e| ((e.k as f64).ln(), e.term.ln()))
        .collect();
    if pts.len() < MIN_TAIL_TERMS / 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| TailFit { slope: sxy / sxx, terms_used: pts.len() })
}
