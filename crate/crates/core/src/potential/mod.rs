//! Green's functions, circle and disk means, discrete Riesz charges,
//! Hahn–Jordan splitting and integration against measures.

mod green;
mod means;
mod measure;
mod riesz;

use thiserror::Error;

use crate::expr::EvalError;
use crate::zeros::ZeroError;
use crate::Complex;

pub use green::{green_domain, green_unit_disk, GreenField};
pub use means::{
    circular_mean, disk_mean, disk_mean_with, log_disk_mean, recover_value, DISK_ANGULAR_NODES,
    DISK_RADIAL_NODES,
};
pub use measure::{
    hahn_jordan_split, integrate_measure, log_kernel_rect, log_potential_at, Atom, CellGrid, ChargeSplit,
    MeasureEstimate,
};
pub use riesz::{riesz_measure_grid, RieszGrid};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PotentialError {
    #[error("evaluation at the pole")]
    Pole,
    #[error("the pole must lie inside the domain")]
    PoleOutsideDomain,
    #[error("Green's functions need a disk-type domain")]
    UnsupportedDomain,
    #[error("the circle or disk leaves the domain")]
    ExitsDomain,
    #[error("radius and node counts must be positive, got r = {0}")]
    BadRadius(f64),
    #[error("every sample is infinite")]
    AllSamplesInfinite,
    #[error("grid needs at least 3x3 interior nodes")]
    GridTooSmall,
    #[error("cell grids have different geometry")]
    GridMismatch,
    #[error("integrand is infinite at a carrier with nonzero mass at {at}")]
    InfiniteAtCarrier { at: Complex },
    #[error("evaluation failed: {0}")]
    Eval(EvalError),
    #[error("zero counting failed: {0}")]
    Zero(ZeroError),
}
