//! Row-parallel grid sampling on scoped threads.
//!
//! Rows are split into contiguous blocks, one per thread, and reassembled in
//! order, so the result does not depend on the thread count.

use std::num::NonZeroUsize;
use std::thread;

use blaschke_core::conditions::{domain_grid, ConditionError};
use blaschke_core::expr::{sample_row, GridField, GridRect, ScalarField};
use blaschke_core::potential::{riesz_measure_grid, MeasureEstimate};
use blaschke_core::DomainSpec;

/// Caps the number of sampling threads.
pub const THREADS_VAR: &str = "BLASCHKE_LAB_THREADS";

/// `BLASCHKE_LAB_THREADS` if set to a positive integer, else the available
/// parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

/// [`blaschke_core::expr::sample_field`] spread over [`thread_count`] threads.
pub fn sample_field_par<F: ScalarField + Sync + ?Sized>(field: &F, rect: GridRect) -> GridField {
    sample_field_threads(field, rect, thread_count())
}

pub fn sample_field_threads<F: ScalarField + Sync + ?Sized>(field: &F, rect: GridRect, threads: usize) -> GridField {
    let (_, ny) = rect.dims();
    let block = ny.div_ceil(threads.clamp(1, ny.max(1)));
    let mut rows = vec![Vec::new(); ny];
    thread::scope(|s| {
        for (b, chunk) in rows.chunks_mut(block.max(1)).enumerate() {
            s.spawn(move || {
                for (k, row) in chunk.iter_mut().enumerate() {
                    *row = sample_row(field, &rect, b * block + k);
                }
            });
        }
    });
    GridField::from_rows(rect, rows)
}

/// [`blaschke_core::conditions::grid_charge`] with parallel sampling.
pub fn grid_charge_par<F: ScalarField + Sync + ?Sized>(
    m: &F,
    domain: &DomainSpec,
    h: f64,
) -> Result<MeasureEstimate, ConditionError> {
    let grid = sample_field_par(m, domain_grid(domain, h)?);
    let mut rg = riesz_measure_grid(&grid)?;
    rg.patch_by_flux(&grid);
    Ok(rg.measure)
}
