//! Weighted minimal graphs in R³, weighted maximal spacelike graphs in L³, and
//! the Calabi-type correspondence that maps one family onto the other.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod par;

pub mod ode;
pub mod quadrature;
pub mod grid;
pub mod interp;
pub mod numeric;

pub mod weights;
pub mod diffgeom;
pub mod calabi;
pub mod radial;
pub mod mesh;
pub mod hyperbolic;

pub mod convergence;
pub mod io;

pub use diffgeom::{geometry, gradient_and_hessian, pde_residual, GeometryFields, GraphSurface, Signature};
pub use error::{Error, Result};
pub use grid::{FieldStats, Grid2D, ScalarField};
pub use weights::{WeightFunction, WeightKind};
