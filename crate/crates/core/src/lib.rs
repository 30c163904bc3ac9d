//! Fractional perimeters, nonlocal mean curvature and exact discrete
//! s-minimal sets in the plane.

pub mod asymptotics;
pub mod boundary;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod interaction;
pub mod mincut;
pub mod par;
pub mod quadrature;
pub mod verify;

pub use domain::{make_problem, ExteriorDatum, FractionalOrder, GridSpec, Image, Mask, OmegaDesc, PixelProblem};
pub use error::{Error, Result};
pub use par::Exec;
