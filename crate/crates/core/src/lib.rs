//! Numerical toolkit for Blaschke-type conditions on zero sets of holomorphic
//! functions.
//!
//! The crate is `no_std` (it needs `alloc`). It is organised bottom-up:
//!
//! * [`expr`] parses and evaluates function specifications (`blaschke(...)`,
//!   polynomials, real-valued expressions) and samples them on grids.
//! * [`zeros`] counts zeros by the argument principle and locates them by
//!   recursive subdivision.
//! * [`potential`] holds Green's functions, circle and disk means, discrete
//!   Riesz charges, Hahn–Jordan splitting and integration against measures.
//! * [`conditions`] builds test functions `v` and evaluates the Blaschke-type
//!   functionals and inequalities on concrete data.
//!
//! Everything is a pure function of immutable inputs.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod conditions;
pub mod domain;
pub mod expr;
pub mod ext;
pub mod potential;
pub mod quad;
pub mod zeros;

pub use num_complex::Complex64 as Complex;

pub use domain::{DomainSpec, DomainKind, Moebius};
pub use expr::{EvalError, FunctionSpec, GridField, ParseError};
pub use ext::{ComplexPoint, ExtReal};
