//! Geometry and analysis of constant-curvature cone-manifolds.
//!
//! The crate is organised by subsystem:
//!
//! - [`geom`]: curvature-parametrised trigonometry and the local model metrics
//!   (edge cylinders, vertex cones, space-form boxes).
//! - [`germ`]: singular-germ data model, validation, and the doubling of convex
//!   polyhedra.
//! - [`spectra`]: Friedrichs spectra of spherical footballs with a shooting
//!   oracle, and the spectral-gap checks used by the vertex calculus.
//! - [`indicial`]: indicial-root lattices at cone points, edges and vertices,
//!   critical windows and the Friedrichs filter.
//! - [`normal_op`]: modified Bessel functions, edge normal-operator mode
//!   solutions, weighted-L² membership and the no-log Green solve.
//! - [`tensor`]: finite-difference tensor calculus on model charts, the
//!   operator identity suite and the L² classification of standard-form
//!   deformations.
//! - [`polyrig`]: infinitesimal rigidity of convex polyhedra in Euclidean and
//!   hyperbolic space.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dual;
pub mod error;
pub mod geom;
pub mod germ;
pub mod indicial;
pub mod normal_op;
pub mod ode;
pub mod par;
pub mod polyrig;
pub mod spectra;
pub mod tensor;

pub use error::{Error, Result};
pub use geom::Curvature;
