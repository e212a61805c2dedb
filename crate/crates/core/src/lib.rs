//! Parametric reduced-order modelling by subspace interpolation on the
//! Grassmann manifold.
//!
//! The crate builds up from dense kernels ([`linalg`]) to manifold geometry
//! ([`grassmann`]), POD bases ([`pod`]), tangent-space interpolation of
//! parametrized subspaces ([`itsgm`]), a bi-calibrated snapshot
//! reconstruction with an offline/online split ([`bicitsgm`]) and a
//! real-coded genetic algorithm that uses the reconstruction as a fitness
//! oracle ([`ga`]). [`toyflow`] provides analytic parametric fields with
//! closed-form answers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bicitsgm;
pub mod error;
pub mod ga;
pub mod grassmann;
pub mod interp;
pub mod io;
pub mod itsgm;
pub mod linalg;
pub mod manifest;
pub mod pod;
pub mod toyflow;

pub use error::{Error, ErrorKind, Result};
