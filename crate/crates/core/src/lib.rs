//! Numerical core for the relativistic Thomas–Fermi–Weizsäcker functional.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cutoff_radii;
pub mod error;
pub mod ionization_analysis;
pub mod quadrature;
pub mod radial_solver;
pub mod solve1d;
pub mod special_functions;
pub mod stability_bound;
pub mod thomas_fermi_atom;

pub use error::{Error, Result};
